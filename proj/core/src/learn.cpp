#include "xprov/learn.hpp"

#include <algorithm>
#include <ctime>
#include <random>
#include <set>

#include "xprov/error.hpp"

namespace xprov {
namespace {

// Labels of dimension d that the op's parameters mention.
std::set<std::string> referenced_labels(const OperationSignature& op,
                                        const Container& input,
                                        std::size_t d) {
  std::set<std::string> out;
  for (const auto& [key, value] : op.params) {
    if (!value.is_str()) continue;
    for (const auto& part : OperationSignature::split_list(value.as_str())) {
      if (input.has_index_label(d, part)) out.insert(part);
    }
  }
  return out;
}

// k distinct positions from 0..n-1, drawn with the shared rng.
std::vector<std::size_t> draw_positions(std::size_t n, std::size_t k,
                                        std::mt19937_64& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

std::vector<Container> generate_small_containers(const Container& input,
                                                 const OperationSignature& op,
                                                 const LearnConfig& cfg) {
  if (cfg.subset_size == 0) {
    fail(ErrorCode::Precondition, "subset_size must be positive");
  }
  for (std::size_t d = 0; d < input.rank(); ++d) {
    if (input.dim(d).labels.size() < cfg.subset_size) {
      fail(ErrorCode::SubsetTooLarge,
           "dimension '" + input.dim(d).name + "' has " +
               std::to_string(input.dim(d).labels.size()) +
               " labels, need " + std::to_string(cfg.subset_size));
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<Container> subsets;
  for (std::size_t s = 0; s < cfg.n_subsets; ++s) {
    std::vector<std::vector<std::string>> keeps;
    for (std::size_t d = 0; d < input.rank(); ++d) {
      const auto& labels = input.dim(d).labels;
      std::set<std::string> chosen = referenced_labels(op, input, d);
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!chosen.count(labels[i])) pool.push_back(i);
      }
      std::size_t extra =
          cfg.subset_size > chosen.size() ? cfg.subset_size - chosen.size() : 0;
      extra = std::min(extra, pool.size());
      for (std::size_t p : draw_positions(pool.size(), extra, rng)) {
        chosen.insert(labels[pool[p]]);
      }
      std::vector<std::string> keep;
      for (const auto& label : labels) {
        if (chosen.count(label)) keep.push_back(label);
      }
      keeps.push_back(std::move(keep));
    }
    subsets.push_back(
        input.subset(keeps, input.id() + "~s" + std::to_string(s)));
  }
  return subsets;
}

std::vector<Container> perturb_containers(const std::vector<Container>& subsets,
                                          const LearnConfig& cfg) {
  std::mt19937_64 rng(cfg.seed + 1);
  std::vector<Container> variants;
  for (const auto& sub : subsets) {
    std::vector<IndexTuple> cells = sub.all_indices();
    if (cells.empty()) continue;
    for (std::size_t i = 0; i < cfg.n_perturbations; ++i) {
      const IndexTuple& idx = cells[rng() % cells.size()];
      std::vector<Scalar> domain = standard_domain(sub, idx);
      const Scalar& probe = domain[rng() % domain.size()];
      variants.push_back(
          sub.with_cell(idx, probe)
              .with_id(sub.id() + "~p" + std::to_string(i)));
    }
  }
  return variants;
}

std::vector<Example> collect_examples(
    const RunFn& run, const std::vector<Container>& candidates) {
  if (candidates.empty()) {
    fail(ErrorCode::NoExamples, "no candidate inputs to run");
  }
  std::vector<Example> examples;
  std::string first_failure;
  for (const auto& input : candidates) {
    try {
      Container output = run({input});
      examples.push_back({input, std::move(output)});
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  if (examples.empty()) {
    fail(ErrorCode::AllExecutionsFailed,
         "every candidate execution failed; first error: " + first_failure);
  }
  return examples;
}

LearntTags infer_tags(const RunFn& run, const OperationSignature& op,
                      const std::vector<Example>& examples) {
  if (examples.empty()) {
    fail(ErrorCode::NoExamples, "cannot infer tags from zero examples");
  }
  std::vector<ConstraintTag> alive =
      enumerate_candidate_tags(op, examples[0].input);
  for (const auto& ex : examples) {
    if (alive.empty()) break;
    LineageTable oracle = influence_oracle(run, {ex.input});
    std::vector<ConstraintTag> next;
    for (const auto& tag : alive) {
      try {
        if (tag_holds(tag, oracle, {ex.input}, ex.output)) {
          next.push_back(tag);
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SchemaMismatch &&
            e.code() != ErrorCode::InsufficientLineage) {
          throw;
        }
      }
    }
    alive = std::move(next);
  }
  LearntTags result;
  result.origins.assign(alive.size(),
                        Origin::learnt(examples.size(), std::time(nullptr)));
  result.tags = std::move(alive);
  return result;
}

LearntTags learn_tags(const RunFn& run, const OperationSignature& op,
                      const Container& input, const LearnConfig& cfg) {
  std::vector<Container> subsets = generate_small_containers(input, op, cfg);
  std::vector<Container> variants = perturb_containers(subsets, cfg);
  std::vector<Example> examples = collect_examples(run, variants);
  return infer_tags(run, op, examples);
}

Extrapolation extrapolate_lineage(const RunFn& run,
                                  const std::vector<Container>& inputs,
                                  const LearntTags& learnt) {
  Extrapolation result;
  result.output = run(inputs);
  result.executions = 1;

  if (learnt.tags.empty()) {
    std::vector<ContainerSchema> in_schemas;
    for (const auto& in : inputs) in_schemas.push_back(in.schema());
    result.lineage =
        LineageTable::unknown(std::move(in_schemas), result.output.schema(),
                              Origin::learnt(0, std::time(nullptr)));
    return result;
  }
  if (learnt.origins.size() != learnt.tags.size()) {
    fail(ErrorCode::Precondition, "one origin per learnt tag required");
  }
  std::vector<LineageTable> tables;
  for (std::size_t i = 0; i < learnt.tags.size(); ++i) {
    tables.push_back(max_constraint_lineage(learnt.tags[i], inputs,
                                            result.output, learnt.origins[i]));
  }
  result.lineage =
      tables.size() == 1 ? tables[0] : intersect_tables(tables);
  return result;
}

}  // namespace xprov
