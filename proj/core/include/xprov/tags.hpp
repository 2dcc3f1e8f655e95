#pragma once

#include <string>
#include <vector>

#include "xprov/container.hpp"
#include "xprov/lineage.hpp"
#include "xprov/op_signature.hpp"

namespace xprov {

// Parameterized constraints on the lineage of a single-input operation.
//
//   OneToOne         every output cell is influenced by exactly the
//                    same-index input cell, and nothing else
//   Slice[d]         influence never crosses slices of dimension d: the
//                    other dimensions pass through unchanged, the output's
//                    d-labels are a subsequence of the input's, and every
//                    influencer shares its output cell's d-label
//   Identity         every output cell has exactly one Direct influencer
//                    and carries its value unchanged
//   Condition[d,i]   influencers stay within the output cell's position
//                    except along dimension d, where only the cell itself
//                    and the controlling index i may appear; at least one
//                    output cell must actually be controlled by i
enum class TagKind { OneToOne, Slice, Identity, Condition };

struct ConstraintTag {
  TagKind kind = TagKind::OneToOne;
  std::size_t dim = 0;     // Slice, Condition
  std::string index;       // Condition

  static ConstraintTag one_to_one() { return {TagKind::OneToOne, 0, {}}; }
  static ConstraintTag slice(std::size_t d) { return {TagKind::Slice, d, {}}; }
  static ConstraintTag identity() { return {TagKind::Identity, 0, {}}; }
  static ConstraintTag condition(std::size_t d, std::string index) {
    return {TagKind::Condition, d, std::move(index)};
  }

  // "OneToOne", "Slice[0]", "Identity", "Condition[1,Age]"
  std::string repr() const;
  static ConstraintTag parse(const std::string& text);

  auto operator<=>(const ConstraintTag& other) const = default;
};

// Whether one observed influence table satisfies the tag. The table must
// describe exactly the given single input and output (SchemaMismatch
// otherwise). Fails with InsufficientLineage when the kinds the tag
// constrains have Unknown completeness (OneToOne and Slice read both kinds,
// Identity the Direct side, Condition the Indirect side).
bool tag_holds(const ConstraintTag& tag, const LineageTable& table,
               const std::vector<Container>& inputs, const Container& output);

// The largest influence table consistent with the tag for these concrete
// containers, as an over-approximation of both kinds. Intersecting these
// across an operation's tags is how lineage is extrapolated without
// probing.
LineageTable max_constraint_lineage(const ConstraintTag& tag,
                                    const std::vector<Container>& inputs,
                                    const Container& output,
                                    const Origin& origin);

// Tags worth testing for one operation on one input: the parameterless
// kinds, Slice over every dimension, and Condition over each dimension
// paired with the labels the op's parameters mention (every label of small
// dimensions, up to 8, is tried too).
std::vector<ConstraintTag> enumerate_candidate_tags(
    const OperationSignature& op, const Container& input);

}  // namespace xprov
