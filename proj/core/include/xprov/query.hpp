#pragma once

#include <set>
#include <string>
#include <vector>

#include "xprov/kb.hpp"
#include "xprov/workflow.hpp"

namespace xprov {

struct ProvQueryResult {
  std::set<IndexTuple> indices;
  // Of the composed relation, for the requested kind.
  Completeness completeness = Completeness::Unknown;
  Origin origin;
};

// Traces cells of container `from` to their counterparts in container `to`
// by composing the recorded lineage tables along the node chain between
// them: forward when `from` is upstream of `to`, backward when downstream.
// UnknownTarget when the record holds no chain between the two.
ProvQueryResult prov_query(const RunRecord& rec, const std::string& from,
                           const std::vector<IndexTuple>& indices,
                           const std::string& to, InfluenceKind kind);

struct TagAssertion {
  bool holds = false;
  // The concrete tags that hold; for a fully parameterized query this is
  // the tag itself or empty, for a bare kind ("Slice") every satisfying
  // parameterization.
  std::vector<ConstraintTag> satisfying;
  // "kb" when every satisfied tag was already known, "instance" otherwise.
  std::string source = "instance";
};

// Checks a tag (or every parameterization of a bare tag kind) against one
// node of a run. Tags already stored for the op short-circuit; the rest are
// asserted against the node's recorded lineage.
TagAssertion assert_tag(const RunRecord& rec, const std::string& node_id,
                        const std::string& tag_text,
                        const KnowledgeBase* kb = nullptr);

struct LeakageFinding {
  std::string node_id;
  std::string detail;
};

// Flags nodes whose influence escapes dimension-0 slices (information
// crossing records), including nodes whose lineage is too weak to rule
// that out.
std::vector<LeakageFinding> check_row_leakage(const RunRecord& rec);

// Whether parent and child each confine influence to the same dimension's
// slices while preserving values, making the pair order-insensitive.
// Tags stored in `kb` are authoritative for the ops they cover; the nodes'
// recorded lineage is consulted only for ops the store has never seen, and
// then attests only to the recorded input.
bool double_slice(const RunRecord& rec, const std::string& parent_id,
                  const std::string& child_id,
                  const KnowledgeBase* kb = nullptr);

// Executes the two operations in both orders over `input` and compares
// results. Execution errors propagate: a swap that cannot run is not a
// counterexample.
bool reorder_commutes(const OperationSignature& parent_op,
                      const ExecSpec& parent_exec,
                      const OperationSignature& child_op,
                      const ExecSpec& child_exec, const Container& input);

// reorder_commutes over a recorded adjacent node pair, using the parent's
// recorded input.
bool verify_reorder(const RunRecord& rec, const std::string& parent_id,
                    const std::string& child_id);

}  // namespace xprov
