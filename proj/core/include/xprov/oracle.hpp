#pragma once

#include <functional>
#include <vector>

#include "xprov/container.hpp"
#include "xprov/lineage.hpp"

namespace xprov {

// Perturbation values tried for one cell when probing influence.
//
// Non-null cells always include Null plus type-preserving variations; for
// numbers those are 0, the negation, the successor, and values just outside
// the container-wide numeric range, minus the current value. Strings get a
// fresh sentinel, booleans their negation. Null cells get non-null probes
// shaped like their column peers (same trailing labels, dimension 0 varying)
// so that filling the hole is actually representable.
//
// Never returns an empty set.
std::vector<Scalar> standard_domain(const Container& c, const IndexTuple& idx);

// Black-box execution of an operation over its inputs.
using RunFn = std::function<Container(const std::vector<Container>&)>;

struct OracleStats {
  // Perturbed-input executions (one per cell/probe pair).
  std::size_t perturbations = 0;
  // All executions including the two baseline runs.
  std::size_t executions = 0;
};

// Derives an influence table for `run` by rerunning it once per cell/probe
// pair. An input cell influences an output cell when the rerun changes the
// output cell's value or removes it (position shifts do not count). A cell
// is a Direct influencer when every probe changes the output cell, Indirect
// when at least one does; Direct records are co-emitted as Indirect.
//
// The result is Exact for Indirect and OverApprox for Direct, with Oracle
// origin. Runs the baseline twice and fails with NonDeterministicOp when
// the two disagree. `baseline` (when given) receives the unperturbed
// output.
LineageTable influence_oracle(const RunFn& run,
                              const std::vector<Container>& inputs,
                              OracleStats* stats = nullptr,
                              Container* baseline = nullptr);

}  // namespace xprov
