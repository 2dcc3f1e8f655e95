#include "xprov/query.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <utility>

#include "xprov/error.hpp"

namespace xprov {

namespace {

const NodeRun& node_by_id(const RunRecord& rec, const std::string& id) {
  for (const auto& nr : rec.nodes) {
    if (nr.node.id == id) return nr;
  }
  fail(ErrorCode::UnknownTarget, "no node '" + id + "' in the run");
}

const Container& container_by_id(const RunRecord& rec, const std::string& id) {
  auto it = rec.containers.find(id);
  if (it == rec.containers.end()) {
    fail(ErrorCode::UnknownTarget, "no container '" + id + "' in the run");
  }
  return it->second;
}

std::map<std::string, std::size_t> producer_index(const RunRecord& rec) {
  std::map<std::string, std::size_t> by_output;
  for (std::size_t i = 0; i < rec.nodes.size(); ++i) {
    by_output[rec.nodes[i].node.output] = i;
  }
  return by_output;
}

bool reaches(const RunRecord& rec,
             const std::map<std::string, std::size_t>& by_output,
             const std::string& src, const std::string& dst) {
  if (src == dst) return true;
  auto it = by_output.find(dst);
  if (it == by_output.end()) return false;
  for (const auto& in : rec.nodes[it->second].node.inputs) {
    if (reaches(rec, by_output, src, in)) return true;
  }
  return false;
}

// Node indices whose lineage tables compose src -> ... -> dst, or nullopt
// when dst is not downstream of src.
std::optional<std::vector<std::size_t>> chain_between(
    const RunRecord& rec, const std::map<std::string, std::size_t>& by_output,
    const std::string& src, const std::string& dst) {
  if (src == dst) return std::nullopt;
  std::vector<std::size_t> chain;
  std::string cur = dst;
  while (cur != src) {
    auto it = by_output.find(cur);
    if (it == by_output.end()) return std::nullopt;
    const NodeRun& nr = rec.nodes[it->second];
    const std::string* next = nullptr;
    for (const auto& in : nr.node.inputs) {
      if (reaches(rec, by_output, src, in)) {
        next = &in;
        break;
      }
    }
    if (next == nullptr) return std::nullopt;
    chain.push_back(it->second);
    cur = *next;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

LineageTable compose_chain(const RunRecord& rec,
                           const std::vector<std::size_t>& chain) {
  LineageTable composed = rec.nodes[chain[0]].lineage;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    composed = compose_tables(composed, rec.nodes[chain[i]].lineage);
  }
  return composed;
}

}  // namespace

ProvQueryResult prov_query(const RunRecord& rec, const std::string& from,
                           const std::vector<IndexTuple>& indices,
                           const std::string& to, InfluenceKind kind) {
  container_by_id(rec, from);
  container_by_id(rec, to);
  if (from == to) {
    fail(ErrorCode::Precondition, "query endpoints are the same container");
  }
  auto by_output = producer_index(rec);
  ProvQueryResult result;
  if (auto down = chain_between(rec, by_output, from, to)) {
    LineageTable composed = compose_chain(rec, *down);
    result.indices = query_table(composed, QuerySide::Forward, indices, kind);
    result.completeness = composed.completeness(kind);
    result.origin = composed.origin();
    return result;
  }
  if (auto up = chain_between(rec, by_output, to, from)) {
    LineageTable composed = compose_chain(rec, *up);
    result.indices = query_table(composed, QuerySide::Backward, indices, kind);
    result.completeness = composed.completeness(kind);
    result.origin = composed.origin();
    return result;
  }
  fail(ErrorCode::UnknownTarget,
       "no lineage chain between '" + from + "' and '" + to + "'");
}

TagAssertion assert_tag(const RunRecord& rec, const std::string& node_id,
                        const std::string& tag_text,
                        const KnowledgeBase* kb) {
  const NodeRun& nr = node_by_id(rec, node_id);
  std::vector<Container> inputs;
  for (const auto& id : nr.node.inputs) {
    inputs.push_back(container_by_id(rec, id));
  }
  const Container& output = container_by_id(rec, nr.node.output);

  // A bare "Slice" or "Condition" asks for every satisfying
  // parameterization; anything else must parse as one concrete tag.
  std::vector<ConstraintTag> asked;
  bool bare = tag_text == "Slice" || tag_text == "Condition";
  if (bare) {
    if (inputs.size() == 1) {
      TagKind want =
          tag_text == "Slice" ? TagKind::Slice : TagKind::Condition;
      for (const auto& t : enumerate_candidate_tags(nr.node.op, inputs[0])) {
        if (t.kind == want) asked.push_back(t);
      }
    }
  } else {
    asked.push_back(ConstraintTag::parse(tag_text));
  }

  std::vector<ConstraintTag> known;
  if (kb != nullptr) {
    if (auto hit = kb->get_tags(nr.node.op.canonical_key())) {
      known = std::move(hit->tags);
    }
  }

  TagAssertion res;
  bool any_kb = false;
  bool any_instance = false;
  bool any_unassessed = false;
  for (const auto& tag : asked) {
    if (std::find(known.begin(), known.end(), tag) != known.end()) {
      res.satisfying.push_back(tag);
      any_kb = true;
      continue;
    }
    bool ok = false;
    try {
      ok = tag_holds(tag, nr.lineage, inputs, output);
    } catch (const Error& e) {
      bool soft = e.code() == ErrorCode::SchemaMismatch ||
                  e.code() == ErrorCode::InsufficientLineage;
      if (bare && soft) {
        if (e.code() == ErrorCode::InsufficientLineage) any_unassessed = true;
        continue;
      }
      throw;
    }
    if (ok) {
      res.satisfying.push_back(tag);
      any_instance = true;
    }
  }
  if (bare && res.satisfying.empty() && any_unassessed) {
    fail(ErrorCode::InsufficientLineage,
         "lineage of node '" + node_id + "' is too weak to assess " +
             tag_text + " parameterizations");
  }
  res.holds = !res.satisfying.empty();
  res.source = any_kb ? (any_instance ? "mixed" : "kb") : "instance";
  return res;
}

std::vector<LeakageFinding> check_row_leakage(const RunRecord& rec) {
  std::vector<LeakageFinding> findings;
  for (const auto& nr : rec.nodes) {
    std::vector<Container> inputs;
    for (const auto& id : nr.node.inputs) {
      inputs.push_back(container_by_id(rec, id));
    }
    const Container& output = container_by_id(rec, nr.node.output);
    std::string detail;
    try {
      if (tag_holds(ConstraintTag::slice(0), nr.lineage, inputs, output)) {
        continue;
      }
      detail = "output shape changes outside dimension 0";
      for (const auto& r : nr.lineage.records()) {
        if (!r.out_idx.empty() && !r.in_idx.empty() &&
            r.out_idx[0] != r.in_idx[0]) {
          detail = "cell " + index_repr(r.out_idx) + " draws on record '" +
                   r.in_idx[0] + "' via " + index_repr(r.in_idx);
          break;
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InsufficientLineage) {
        detail = "lineage too weak to bound influence to single records";
      } else if (e.code() == ErrorCode::SchemaMismatch) {
        detail = std::string("not assessable: ") + e.what();
      } else {
        throw;
      }
    }
    findings.push_back({nr.node.id, detail});
  }
  return findings;
}

namespace {

// Adjacent single-input pair lookup shared by the reorder checks.
std::pair<const NodeRun*, const NodeRun*> adjacent_pair(
    const RunRecord& rec, const std::string& parent_id,
    const std::string& child_id) {
  const NodeRun& parent = node_by_id(rec, parent_id);
  const NodeRun& child = node_by_id(rec, child_id);
  if (parent.node.inputs.size() != 1 || child.node.inputs.size() != 1 ||
      child.node.inputs[0] != parent.node.output) {
    fail(ErrorCode::Precondition,
         "'" + parent_id + "' -> '" + child_id +
             "' is not a single-input producer/consumer pair");
  }
  return {&parent, &child};
}

}  // namespace

bool double_slice(const RunRecord& rec, const std::string& parent_id,
                  const std::string& child_id, const KnowledgeBase* kb) {
  auto [parent, child] = adjacent_pair(rec, parent_id, child_id);
  const Container& parent_in = container_by_id(rec, parent->node.inputs[0]);
  const Container& mid = container_by_id(rec, parent->node.output);
  const Container& child_out = container_by_id(rec, child->node.output);

  auto known_for = [kb](const OperationSignature& op) {
    std::vector<ConstraintTag> tags;
    if (kb != nullptr) {
      if (auto hit = kb->get_tags(op.canonical_key())) {
        tags = std::move(hit->tags);
      }
    }
    return tags;
  };
  // Stored tags describe the operation over every input, so when the store
  // knows an op they decide outright; a single node's recorded lineage is
  // only evidence about one input (a no-op instance can look sliced) and is
  // consulted only for ops the store has never seen.
  auto satisfied = [](const std::vector<ConstraintTag>& known,
                      const ConstraintTag& tag, const LineageTable& table,
                      const Container& in, const Container& out) {
    if (!known.empty()) {
      return std::find(known.begin(), known.end(), tag) != known.end();
    }
    try {
      return tag_holds(tag, table, {in}, out);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaMismatch) return false;
      throw;
    }
  };

  auto parent_known = known_for(parent->node.op);
  auto child_known = known_for(child->node.op);
  if (!satisfied(parent_known, ConstraintTag::identity(), parent->lineage,
                 parent_in, mid) ||
      !satisfied(child_known, ConstraintTag::identity(), child->lineage, mid,
                 child_out)) {
    return false;
  }
  for (std::size_t d = 0; d < parent_in.rank(); ++d) {
    if (satisfied(parent_known, ConstraintTag::slice(d), parent->lineage,
                  parent_in, mid) &&
        satisfied(child_known, ConstraintTag::slice(d), child->lineage, mid,
                  child_out)) {
      return true;
    }
  }
  return false;
}

bool reorder_commutes(const OperationSignature& parent_op,
                      const ExecSpec& parent_exec,
                      const OperationSignature& child_op,
                      const ExecSpec& child_exec, const Container& input) {
  RunFn parent = node_run_fn(parent_op, parent_exec, "~reorder");
  RunFn child = node_run_fn(child_op, child_exec, "~reorder");
  Container original = child({parent({input})});
  Container swapped = parent({child({input})});
  return containers_equal(original, swapped);
}

bool verify_reorder(const RunRecord& rec, const std::string& parent_id,
                    const std::string& child_id) {
  auto [parent, child] = adjacent_pair(rec, parent_id, child_id);
  const Container& input = container_by_id(rec, parent->node.inputs[0]);
  return reorder_commutes(parent->node.op, parent->node.exec, child->node.op,
                          child->node.exec, input);
}

}  // namespace xprov
