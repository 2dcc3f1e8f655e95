#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "xprov/container.hpp"

namespace xprov {

// Direct: every admissible change to the input cell changes (or removes) the
// output cell. Indirect: some admissible change does. Direct records are
// always accompanied by their Indirect twin ("any influence" reads take the
// union of both kinds).
enum class InfluenceKind { Direct, Indirect };

const char* influence_kind_name(InfluenceKind k);
InfluenceKind influence_kind_from(const std::string& name);

// How much of the true influence relation a table's records of one kind
// claim to cover. Ordered by decreasing precision.
enum class Completeness { Exact, OverApprox, Unknown };

const char* completeness_name(Completeness c);
Completeness completeness_from(const std::string& name);
// The less precise of the two.
Completeness weakest_completeness(Completeness a, Completeness b);

// Where a table (or tag) came from. Strength order, strongest first:
// CapturedExact, Oracle, Declared, Learnt.
struct Origin {
  enum class Kind { Declared, CapturedExact, Oracle, Learnt };

  Kind kind = Kind::Declared;
  // Number of observed examples backing a Learnt origin; 0 otherwise.
  std::uint64_t example_count = 0;
  // Unix seconds; recorded at capture time, never printed on query stdout.
  std::int64_t timestamp = 0;

  static Origin declared(std::int64_t ts = 0) { return {Kind::Declared, 0, ts}; }
  static Origin captured_exact(std::int64_t ts = 0) {
    return {Kind::CapturedExact, 0, ts};
  }
  static Origin oracle(std::int64_t ts = 0) { return {Kind::Oracle, 0, ts}; }
  static Origin learnt(std::uint64_t n, std::int64_t ts = 0) {
    return {Kind::Learnt, n, ts};
  }

  bool operator==(const Origin& other) const = default;

  // "declared", "captured_exact", "oracle", "learnt(n=24)".
  std::string repr() const;
};

const char* origin_kind_name(Origin::Kind k);
Origin::Kind origin_kind_from(const std::string& name);
// Position in the strength order; larger is weaker.
int origin_weakness(Origin::Kind k);
Origin weakest_origin(const Origin& a, const Origin& b);

// One influence fact: output entity <- input entity of a given slot.
struct LineageRecord {
  IndexTuple out_idx;
  std::uint32_t in_slot = 0;
  IndexTuple in_idx;
  InfluenceKind kind = InfluenceKind::Indirect;

  // Canonical order: out labels, slot, in labels, Direct before Indirect.
  auto operator<=>(const LineageRecord& other) const = default;
};

// Deduplicated set of lineage records bound to the schemas they quantify
// over, with per-kind completeness and a provenance origin.
class LineageTable {
 public:
  LineageTable() = default;

  // Validates every record against the schemas (SchemaViolation on a bad
  // out index, slot, or in index). Records are deduplicated and held in
  // canonical order.
  static LineageTable build(std::vector<ContainerSchema> input_schemas,
                            ContainerSchema output_schema,
                            std::vector<LineageRecord> records,
                            Completeness direct_completeness,
                            Completeness indirect_completeness, Origin origin);

  // Empty-claim table with Unknown completeness for both kinds.
  static LineageTable unknown(std::vector<ContainerSchema> input_schemas,
                              ContainerSchema output_schema, Origin origin);

  const std::vector<ContainerSchema>& input_schemas() const {
    return input_schemas_;
  }
  const ContainerSchema& output_schema() const { return output_schema_; }
  const std::vector<LineageRecord>& records() const { return records_; }
  Completeness completeness(InfluenceKind k) const {
    return k == InfluenceKind::Direct ? direct_ : indirect_;
  }
  const Origin& origin() const { return origin_; }

  bool same_schemas_as(const LineageTable& other) const;

  // Records targeting one output entity. Direct returns Direct records
  // only; Indirect returns the union of both kinds (any influence).
  std::set<IndexTuple> influencers_of(const IndexTuple& out_idx,
                                      InfluenceKind kind) const;

 private:
  std::vector<ContainerSchema> input_schemas_;
  ContainerSchema output_schema_;
  std::vector<LineageRecord> records_;  // sorted, unique
  Completeness direct_ = Completeness::Unknown;
  Completeness indirect_ = Completeness::Unknown;
  Origin origin_;
};

// Record-set, completeness, and origin equality (schemas included).
bool tables_equal(const LineageTable& a, const LineageTable& b);

// Kind-wise set intersection over tables with identical schemas.
// Completeness per kind: OverApprox when every input is Exact or OverApprox,
// Unknown otherwise. Origin: Learnt with the max example_count of the inputs
// and the max timestamp. Errors: EmptyInput, SchemaMismatch.
LineageTable intersect_tables(const std::vector<LineageTable>& tables);

// Relational composition A->M->C over the shared middle schema. Joined
// record kind is Direct only when both hop records are Direct. Completeness
// per kind and origin take the weakest of the two hops. The downstream
// table must be single-slot; upstream slots pass through.
// Errors: SchemaMismatch.
LineageTable compose_tables(const LineageTable& upstream,
                            const LineageTable& downstream);

enum class QuerySide { Forward, Backward };

// Forward: all output entities influenced by any of the given input
// entities. Backward: all input entities influencing any of the given
// output entities. kind=Direct follows Direct records only; kind=Indirect
// follows both kinds. Indices are validated against the relevant schema
// (SchemaViolation). Multi-slot tables are queried across all slots.
std::set<IndexTuple> query_table(const LineageTable& table, QuerySide side,
                                 const std::vector<IndexTuple>& indices,
                                 InfluenceKind kind);

}  // namespace xprov
