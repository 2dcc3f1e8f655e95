#include "xprov/tags.hpp"

#include <algorithm>
#include <set>

#include "xprov/error.hpp"

namespace xprov {
namespace {

bool is_subsequence(const std::vector<std::string>& sub,
                    const std::vector<std::string>& full) {
  std::size_t i = 0;
  for (const auto& label : full) {
    if (i < sub.size() && sub[i] == label) ++i;
  }
  return i == sub.size();
}

void check_instance(const LineageTable& table,
                    const std::vector<Container>& inputs,
                    const Container& output) {
  if (inputs.size() != 1 || table.input_schemas().size() != 1) {
    fail(ErrorCode::SchemaMismatch,
         "tags quantify over single-input operations");
  }
  if (!(table.input_schemas()[0] == inputs[0].schema()) ||
      !(table.output_schema() == output.schema())) {
    fail(ErrorCode::SchemaMismatch,
         "lineage table does not describe these containers");
  }
}

void check_dim(const ConstraintTag& tag, const ContainerSchema& in,
               const ContainerSchema& out) {
  if (tag.dim >= in.rank() || tag.dim >= out.rank()) {
    fail(ErrorCode::SchemaMismatch,
         tag.repr() + ": dimension out of range for these containers");
  }
}

bool holds_one_to_one(const LineageTable& table, const Container& output) {
  for (const auto& b : output.all_indices()) {
    std::set<IndexTuple> want = {b};
    if (table.influencers_of(b, InfluenceKind::Direct) != want) return false;
    if (table.influencers_of(b, InfluenceKind::Indirect) != want) return false;
  }
  return true;
}

bool holds_slice(const ConstraintTag& tag, const LineageTable& table,
                 const Container& input, const Container& output) {
  const auto& in = input.schema();
  const auto& out = output.schema();
  if (in.rank() != out.rank()) return false;
  for (std::size_t e = 0; e < in.rank(); ++e) {
    if (e == tag.dim) continue;
    if (!(in.dims[e] == out.dims[e])) return false;
  }
  if (!is_subsequence(out.dims[tag.dim].labels, in.dims[tag.dim].labels)) {
    return false;
  }
  for (const auto& r : table.records()) {
    if (r.in_idx[tag.dim] != r.out_idx[tag.dim]) return false;
  }
  return true;
}

bool holds_identity(const LineageTable& table, const Container& input,
                    const Container& output) {
  for (const auto& b : output.all_indices()) {
    std::set<IndexTuple> directs =
        table.influencers_of(b, InfluenceKind::Direct);
    if (directs.size() != 1) return false;
    if (input.get(*directs.begin()) != output.get(b)) return false;
  }
  return true;
}

bool holds_condition(const ConstraintTag& tag, const LineageTable& table,
                     const Container& input, const Container& output) {
  if (input.rank() != output.rank()) return false;
  bool witness = false;
  for (const auto& b : output.all_indices()) {
    std::set<IndexTuple> indirects =
        table.influencers_of(b, InfluenceKind::Indirect);
    bool controlled = false;
    for (const auto& a : indirects) {
      for (std::size_t e = 0; e < b.size(); ++e) {
        if (e == tag.dim) continue;
        if (a[e] != b[e]) return false;
      }
      if (a[tag.dim] != b[tag.dim] && a[tag.dim] != tag.index) return false;
      if (a[tag.dim] == tag.index) controlled = true;
    }
    if (controlled && indirects.size() > 1) witness = true;
  }
  return witness;
}

}  // namespace

std::string ConstraintTag::repr() const {
  switch (kind) {
    case TagKind::OneToOne:
      return "OneToOne";
    case TagKind::Slice:
      return "Slice[" + std::to_string(dim) + "]";
    case TagKind::Identity:
      return "Identity";
    case TagKind::Condition:
      return "Condition[" + std::to_string(dim) + "," + index + "]";
  }
  fail(ErrorCode::Precondition, "bad tag kind");
}

ConstraintTag ConstraintTag::parse(const std::string& text) {
  if (text == "OneToOne") return one_to_one();
  if (text == "Identity") return identity();
  auto parse_dim = [&](const std::string& digits) -> std::size_t {
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::ParseError, "bad tag dimension in '" + text + "'");
    }
    return static_cast<std::size_t>(std::stoull(digits));
  };
  const std::string slice_prefix = "Slice[";
  const std::string cond_prefix = "Condition[";
  if (text.size() > slice_prefix.size() + 1 && text.back() == ']' &&
      text.compare(0, slice_prefix.size(), slice_prefix) == 0) {
    return slice(parse_dim(text.substr(
        slice_prefix.size(), text.size() - slice_prefix.size() - 1)));
  }
  if (text.size() > cond_prefix.size() + 1 && text.back() == ']' &&
      text.compare(0, cond_prefix.size(), cond_prefix) == 0) {
    std::string body =
        text.substr(cond_prefix.size(), text.size() - cond_prefix.size() - 1);
    std::size_t comma = body.find(',');
    if (comma == std::string::npos) {
      fail(ErrorCode::ParseError, "bad tag '" + text + "'");
    }
    return condition(parse_dim(body.substr(0, comma)), body.substr(comma + 1));
  }
  fail(ErrorCode::ParseError, "bad tag '" + text + "'");
}

bool tag_holds(const ConstraintTag& tag, const LineageTable& table,
               const std::vector<Container>& inputs, const Container& output) {
  check_instance(table, inputs, output);
  const Container& input = inputs[0];

  Completeness direct = table.completeness(InfluenceKind::Direct);
  Completeness indirect = table.completeness(InfluenceKind::Indirect);
  auto require_known = [&](Completeness c, const char* side) {
    if (c == Completeness::Unknown) {
      fail(ErrorCode::InsufficientLineage,
           tag.repr() + ": " + side + " influence of this table is unknown");
    }
  };

  switch (tag.kind) {
    case TagKind::OneToOne:
      require_known(direct, "direct");
      require_known(indirect, "indirect");
      return holds_one_to_one(table, output);
    case TagKind::Slice:
      check_dim(tag, input.schema(), output.schema());
      require_known(direct, "direct");
      require_known(indirect, "indirect");
      return holds_slice(tag, table, input, output);
    case TagKind::Identity:
      require_known(direct, "direct");
      return holds_identity(table, input, output);
    case TagKind::Condition: {
      check_dim(tag, input.schema(), output.schema());
      if (!input.has_index_label(tag.dim, tag.index)) {
        fail(ErrorCode::SchemaMismatch,
             tag.repr() + ": no such index on dimension " +
                 std::to_string(tag.dim));
      }
      require_known(indirect, "indirect");
      return holds_condition(tag, table, input, output);
    }
  }
  fail(ErrorCode::Precondition, "bad tag kind");
}

LineageTable max_constraint_lineage(const ConstraintTag& tag,
                                    const std::vector<Container>& inputs,
                                    const Container& output,
                                    const Origin& origin) {
  if (inputs.size() != 1) {
    fail(ErrorCode::SchemaMismatch,
         "tags quantify over single-input operations");
  }
  const Container& input = inputs[0];
  std::vector<LineageRecord> records;
  auto both = [&](const IndexTuple& b, const IndexTuple& a) {
    records.push_back({b, 0, a, InfluenceKind::Direct});
    records.push_back({b, 0, a, InfluenceKind::Indirect});
  };

  switch (tag.kind) {
    case TagKind::OneToOne:
      for (const auto& b : output.all_indices()) {
        if (input.has_index(b)) both(b, b);
      }
      break;
    case TagKind::Slice:
      check_dim(tag, input.schema(), output.schema());
      for (const auto& b : output.all_indices()) {
        for (const auto& a : input.all_indices()) {
          if (a[tag.dim] == b[tag.dim]) both(b, a);
        }
      }
      break;
    case TagKind::Identity:
      for (const auto& b : output.all_indices()) {
        for (const auto& a : input.all_indices()) {
          if (input.get(a) == output.get(b)) {
            records.push_back({b, 0, a, InfluenceKind::Direct});
          }
          records.push_back({b, 0, a, InfluenceKind::Indirect});
        }
      }
      break;
    case TagKind::Condition:
      check_dim(tag, input.schema(), output.schema());
      for (const auto& b : output.all_indices()) {
        for (const auto& a : input.all_indices()) {
          records.push_back({b, 0, a, InfluenceKind::Direct});
          if (a.size() != b.size()) continue;
          bool ok = true;
          for (std::size_t e = 0; e < b.size() && ok; ++e) {
            if (e == tag.dim) continue;
            ok = a[e] == b[e];
          }
          ok = ok && (a[tag.dim] == b[tag.dim] || a[tag.dim] == tag.index);
          if (ok) {
            records.push_back({b, 0, a, InfluenceKind::Indirect});
          }
        }
      }
      break;
  }
  return LineageTable::build({input.schema()}, output.schema(),
                             std::move(records), Completeness::OverApprox,
                             Completeness::OverApprox, origin);
}

std::vector<ConstraintTag> enumerate_candidate_tags(
    const OperationSignature& op, const Container& input) {
  std::vector<ConstraintTag> tags = {ConstraintTag::one_to_one(),
                                     ConstraintTag::identity()};
  for (std::size_t d = 0; d < input.rank(); ++d) {
    tags.push_back(ConstraintTag::slice(d));
  }
  for (std::size_t d = 0; d < input.rank(); ++d) {
    std::set<std::string> labels;
    for (const auto& [key, value] : op.params) {
      if (!value.is_str()) continue;
      for (const auto& part : OperationSignature::split_list(value.as_str())) {
        if (input.has_index_label(d, part)) labels.insert(part);
      }
    }
    if (input.dim(d).labels.size() <= 8) {
      labels.insert(input.dim(d).labels.begin(), input.dim(d).labels.end());
    }
    for (const auto& label : labels) {
      tags.push_back(ConstraintTag::condition(d, label));
    }
  }
  std::sort(tags.begin(), tags.end());
  return tags;
}

}  // namespace xprov
