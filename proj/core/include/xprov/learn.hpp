#pragma once

#include <cstdint>
#include <vector>

#include "xprov/container.hpp"
#include "xprov/oracle.hpp"
#include "xprov/tags.hpp"

namespace xprov {

struct LearnConfig {
  // Input subsets drawn per learning run.
  std::size_t n_subsets = 3;
  // Labels kept per dimension in each subset.
  std::size_t subset_size = 3;
  // One-cell variants derived from each subset.
  std::size_t n_perturbations = 8;
  std::uint64_t seed = 42;
};

// One observed application of the operation under study.
struct Example {
  Container input;
  Container output;
};

// Draws n_subsets small containers from `input`, keeping subset_size labels
// per dimension. Labels mentioned by the op's parameters are always kept;
// the rest are a seeded draw, preserving label order. SubsetTooLarge when a
// dimension has fewer labels than subset_size.
std::vector<Container> generate_small_containers(const Container& input,
                                                 const OperationSignature& op,
                                                 const LearnConfig& cfg);

// One-cell variants of the subsets (n_perturbations per subset, seeded),
// each replacing one cell with a value from its perturbation domain.
std::vector<Container> perturb_containers(const std::vector<Container>& subsets,
                                          const LearnConfig& cfg);

// Runs the operation over each candidate input. Failing executions are
// skipped; AllExecutionsFailed when none succeed.
std::vector<Example> collect_examples(const RunFn& run,
                                      const std::vector<Container>& candidates);

struct LearntTags {
  std::vector<ConstraintTag> tags;
  // Parallel to tags: learnt(n = number of examples the tag survived), or
  // whatever origin a stored or declared tag carries.
  std::vector<Origin> origins;
};

// Oracles every example and keeps the candidate tags that hold on all of
// them. Candidates come from the first example; a tag that does not even
// apply to some example (a Condition index missing from a subset, say) is
// discarded rather than reported. NoExamples when the list is empty.
LearntTags infer_tags(const RunFn& run, const OperationSignature& op,
                      const std::vector<Example>& examples);

// generate -> perturb -> collect -> infer, using only the perturbed
// variants as examples.
LearntTags learn_tags(const RunFn& run, const OperationSignature& op,
                      const Container& input, const LearnConfig& cfg);

struct Extrapolation {
  Container output;
  LineageTable lineage;
  // Full-container executions performed; always exactly 1.
  std::size_t executions = 0;
};

// Applies learnt tags to a full-size input: runs the operation once for its
// output, then intersects the tags' maximal consistent tables. With no tags
// the lineage comes back empty with Unknown completeness.
Extrapolation extrapolate_lineage(const RunFn& run,
                                  const std::vector<Container>& inputs,
                                  const LearntTags& learnt);

}  // namespace xprov
