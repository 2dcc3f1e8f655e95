#include "xprov/lineage.hpp"

#include <algorithm>
#include <map>

#include "xprov/error.hpp"

namespace xprov {

const char* influence_kind_name(InfluenceKind k) {
  return k == InfluenceKind::Direct ? "direct" : "indirect";
}

InfluenceKind influence_kind_from(const std::string& name) {
  if (name == "direct") return InfluenceKind::Direct;
  if (name == "indirect") return InfluenceKind::Indirect;
  fail(ErrorCode::ParseError, "unknown influence kind '" + name + "'");
}

const char* completeness_name(Completeness c) {
  switch (c) {
    case Completeness::Exact: return "exact";
    case Completeness::OverApprox: return "over_approx";
    case Completeness::Unknown: return "unknown";
  }
  return "unknown";
}

Completeness completeness_from(const std::string& name) {
  if (name == "exact") return Completeness::Exact;
  if (name == "over_approx") return Completeness::OverApprox;
  if (name == "unknown") return Completeness::Unknown;
  fail(ErrorCode::ParseError, "unknown completeness '" + name + "'");
}

Completeness weakest_completeness(Completeness a, Completeness b) {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

const char* origin_kind_name(Origin::Kind k) {
  switch (k) {
    case Origin::Kind::Declared: return "declared";
    case Origin::Kind::CapturedExact: return "captured_exact";
    case Origin::Kind::Oracle: return "oracle";
    case Origin::Kind::Learnt: return "learnt";
  }
  return "declared";
}

Origin::Kind origin_kind_from(const std::string& name) {
  if (name == "declared") return Origin::Kind::Declared;
  if (name == "captured_exact") return Origin::Kind::CapturedExact;
  if (name == "oracle") return Origin::Kind::Oracle;
  if (name == "learnt") return Origin::Kind::Learnt;
  fail(ErrorCode::ParseError, "unknown origin kind '" + name + "'");
}

int origin_weakness(Origin::Kind k) {
  switch (k) {
    case Origin::Kind::CapturedExact: return 0;
    case Origin::Kind::Oracle: return 1;
    case Origin::Kind::Declared: return 2;
    case Origin::Kind::Learnt: return 3;
  }
  return 3;
}

Origin weakest_origin(const Origin& a, const Origin& b) {
  Origin out = origin_weakness(a.kind) >= origin_weakness(b.kind) ? a : b;
  out.timestamp = std::max(a.timestamp, b.timestamp);
  return out;
}

std::string Origin::repr() const {
  if (kind == Kind::Learnt) {
    return "learnt(n=" + std::to_string(example_count) + ")";
  }
  return origin_kind_name(kind);
}

namespace {

void validate_record(const std::vector<ContainerSchema>& inputs,
                     const ContainerSchema& output, const LineageRecord& r) {
  if (!output.contains(r.out_idx)) {
    fail(ErrorCode::SchemaViolation,
         "output index " + index_repr(r.out_idx) + " not in output schema");
  }
  if (r.in_slot >= inputs.size()) {
    fail(ErrorCode::SchemaViolation,
         "input slot " + std::to_string(r.in_slot) + " out of range");
  }
  if (!inputs[r.in_slot].contains(r.in_idx)) {
    fail(ErrorCode::SchemaViolation,
         "input index " + index_repr(r.in_idx) + " not in slot " +
             std::to_string(r.in_slot) + " schema");
  }
}

}  // namespace

LineageTable LineageTable::build(std::vector<ContainerSchema> input_schemas,
                                 ContainerSchema output_schema,
                                 std::vector<LineageRecord> records,
                                 Completeness direct_completeness,
                                 Completeness indirect_completeness,
                                 Origin origin) {
  for (const auto& r : records) {
    validate_record(input_schemas, output_schema, r);
  }
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
  LineageTable t;
  t.input_schemas_ = std::move(input_schemas);
  t.output_schema_ = std::move(output_schema);
  t.records_ = std::move(records);
  t.direct_ = direct_completeness;
  t.indirect_ = indirect_completeness;
  t.origin_ = origin;
  return t;
}

LineageTable LineageTable::unknown(std::vector<ContainerSchema> input_schemas,
                                   ContainerSchema output_schema,
                                   Origin origin) {
  return build(std::move(input_schemas), std::move(output_schema), {},
               Completeness::Unknown, Completeness::Unknown, origin);
}

bool LineageTable::same_schemas_as(const LineageTable& other) const {
  return input_schemas_ == other.input_schemas_ &&
         output_schema_ == other.output_schema_;
}

std::set<IndexTuple> LineageTable::influencers_of(const IndexTuple& out_idx,
                                                  InfluenceKind kind) const {
  std::set<IndexTuple> out;
  for (const auto& r : records_) {
    if (r.out_idx != out_idx) continue;
    if (kind == InfluenceKind::Direct && r.kind != InfluenceKind::Direct) {
      continue;
    }
    out.insert(r.in_idx);
  }
  return out;
}

bool tables_equal(const LineageTable& a, const LineageTable& b) {
  return a.same_schemas_as(b) && a.records() == b.records() &&
         a.completeness(InfluenceKind::Direct) ==
             b.completeness(InfluenceKind::Direct) &&
         a.completeness(InfluenceKind::Indirect) ==
             b.completeness(InfluenceKind::Indirect) &&
         a.origin() == b.origin();
}

LineageTable intersect_tables(const std::vector<LineageTable>& tables) {
  if (tables.empty()) {
    fail(ErrorCode::EmptyInput, "intersect_tables needs at least one table");
  }
  for (std::size_t i = 1; i < tables.size(); ++i) {
    if (!tables[i].same_schemas_as(tables[0])) {
      fail(ErrorCode::SchemaMismatch,
           "intersect_tables inputs must share schemas");
    }
  }
  std::vector<LineageRecord> acc = tables[0].records();
  for (std::size_t i = 1; i < tables.size(); ++i) {
    const auto& next = tables[i].records();
    std::vector<LineageRecord> merged;
    std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(),
                          std::back_inserter(merged));
    acc = std::move(merged);
  }

  auto combined = [&](InfluenceKind k) {
    for (const auto& t : tables) {
      if (t.completeness(k) == Completeness::Unknown) {
        return Completeness::Unknown;
      }
    }
    return Completeness::OverApprox;
  };

  Origin origin = Origin::learnt(0, 0);
  for (const auto& t : tables) {
    origin.example_count =
        std::max(origin.example_count, t.origin().example_count);
    origin.timestamp = std::max(origin.timestamp, t.origin().timestamp);
  }

  return LineageTable::build(tables[0].input_schemas(),
                             tables[0].output_schema(), std::move(acc),
                             combined(InfluenceKind::Direct),
                             combined(InfluenceKind::Indirect), origin);
}

LineageTable compose_tables(const LineageTable& upstream,
                            const LineageTable& downstream) {
  if (downstream.input_schemas().size() != 1) {
    fail(ErrorCode::SchemaMismatch,
         "compose_tables joins single-slot downstream tables");
  }
  if (downstream.input_schemas()[0] != upstream.output_schema()) {
    fail(ErrorCode::SchemaMismatch,
         "downstream input schema must equal upstream output schema");
  }

  // middle index -> upstream records grouped per kind
  std::map<IndexTuple, std::vector<const LineageRecord*>> by_middle;
  for (const auto& r : upstream.records()) {
    by_middle[r.out_idx].push_back(&r);
  }

  std::vector<LineageRecord> joined;
  for (const auto& down : downstream.records()) {
    auto it = by_middle.find(down.in_idx);
    if (it == by_middle.end()) continue;
    for (const LineageRecord* up : it->second) {
      InfluenceKind kind = (up->kind == InfluenceKind::Direct &&
                            down.kind == InfluenceKind::Direct)
                               ? InfluenceKind::Direct
                               : InfluenceKind::Indirect;
      joined.push_back(
          LineageRecord{down.out_idx, up->in_slot, up->in_idx, kind});
    }
  }

  return LineageTable::build(
      upstream.input_schemas(), downstream.output_schema(), std::move(joined),
      weakest_completeness(upstream.completeness(InfluenceKind::Direct),
                           downstream.completeness(InfluenceKind::Direct)),
      weakest_completeness(upstream.completeness(InfluenceKind::Indirect),
                           downstream.completeness(InfluenceKind::Indirect)),
      weakest_origin(upstream.origin(), downstream.origin()));
}

std::set<IndexTuple> query_table(const LineageTable& table, QuerySide side,
                                 const std::vector<IndexTuple>& indices,
                                 InfluenceKind kind) {
  for (const auto& idx : indices) {
    if (side == QuerySide::Backward) {
      if (!table.output_schema().contains(idx)) {
        fail(ErrorCode::SchemaViolation,
             "query index " + index_repr(idx) + " not in output schema");
      }
    } else {
      bool ok = false;
      for (const auto& s : table.input_schemas()) {
        if (s.contains(idx)) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        fail(ErrorCode::SchemaViolation,
             "query index " + index_repr(idx) + " not in any input schema");
      }
    }
  }

  std::set<IndexTuple> wanted(indices.begin(), indices.end());
  std::set<IndexTuple> out;
  for (const auto& r : table.records()) {
    if (kind == InfluenceKind::Direct && r.kind != InfluenceKind::Direct) {
      continue;
    }
    if (side == QuerySide::Forward) {
      if (wanted.count(r.in_idx)) out.insert(r.out_idx);
    } else {
      if (wanted.count(r.out_idx)) out.insert(r.in_idx);
    }
  }
  return out;
}

}  // namespace xprov
