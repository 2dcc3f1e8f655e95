#include "xprov/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <map>
#include <optional>

#include "xprov/error.hpp"

namespace xprov {
namespace {

struct NumericRange {
  bool any = false;
  double min = 0.0;
  double max = 0.0;
};

NumericRange numeric_range(const std::vector<Scalar>& cells) {
  NumericRange r;
  for (const auto& v : cells) {
    if (!v.is_number()) continue;
    double x = v.number();
    if (!r.any) {
      r.any = true;
      r.min = r.max = x;
    } else {
      r.min = std::min(r.min, x);
      r.max = std::max(r.max, x);
    }
  }
  return r;
}

void push_unique(std::vector<Scalar>& probes, Scalar v) {
  if (std::find(probes.begin(), probes.end(), v) == probes.end()) {
    probes.push_back(std::move(v));
  }
}

std::string fresh_sentinel(const Scalar& current) {
  for (int k = 0;; ++k) {
    std::string s = "⊥#" + std::to_string(k);
    if (!current.is_str() || current.as_str() != s) return s;
  }
}

// Cells sharing every label of idx except the one on dimension 0.
std::vector<Scalar> column_peers(const Container& c, const IndexTuple& idx) {
  std::vector<Scalar> peers;
  if (c.rank() == 0) return peers;
  for (const auto& label : c.dim(0).labels) {
    if (label == idx[0]) continue;
    IndexTuple peer = idx;
    peer[0] = label;
    peers.push_back(c.get(peer));
  }
  return peers;
}

std::vector<Scalar> probes_for_null(const Container& c, const IndexTuple& idx) {
  std::vector<Scalar> peers = column_peers(c, idx);
  std::vector<Scalar> probes;

  bool any_number = false;
  bool all_int = true;
  for (const auto& p : peers) {
    if (p.is_number()) {
      any_number = true;
      if (!p.is_int()) all_int = false;
    }
  }
  if (any_number) {
    NumericRange r = numeric_range(peers);
    if (all_int) {
      push_unique(probes, Scalar::of(std::int64_t{0}));
      push_unique(probes,
                  Scalar::of(static_cast<std::int64_t>(std::floor(r.min)) - 1));
      push_unique(probes,
                  Scalar::of(static_cast<std::int64_t>(std::ceil(r.max)) + 1));
    } else {
      push_unique(probes, Scalar::of(0.0));
      push_unique(probes, Scalar::of(r.min - 1.0));
      push_unique(probes, Scalar::of(r.max + 1.0));
    }
    return probes;
  }
  for (const auto& p : peers) {
    if (p.is_str()) {
      probes.push_back(Scalar::of(fresh_sentinel(Scalar::null())));
      return probes;
    }
  }
  for (const auto& p : peers) {
    if (p.is_bool()) {
      probes.push_back(Scalar::of(true));
      probes.push_back(Scalar::of(false));
      return probes;
    }
  }
  probes.push_back(Scalar::of(std::int64_t{0}));
  return probes;
}

}  // namespace

std::vector<Scalar> standard_domain(const Container& c, const IndexTuple& idx) {
  const Scalar& v = c.get(idx);
  std::vector<Scalar> probes;

  if (v.is_null()) return probes_for_null(c, idx);

  if (v.is_int()) {
    NumericRange r = numeric_range(c.cells());
    std::int64_t iv = v.as_int();
    std::vector<std::int64_t> raw = {
        0, -iv, iv + 1, static_cast<std::int64_t>(std::floor(r.min)) - 1,
        static_cast<std::int64_t>(std::ceil(r.max)) + 1};
    for (std::int64_t x : raw) {
      if (x == iv) continue;
      push_unique(probes, Scalar::of(x));
    }
    push_unique(probes, Scalar::null());
    return probes;
  }
  if (v.is_float()) {
    NumericRange r = numeric_range(c.cells());
    double fv = v.as_float();
    std::vector<double> raw = {0.0, -fv, fv + 1.0, r.min - 1.0, r.max + 1.0};
    for (double x : raw) {
      Scalar s = Scalar::of(x);
      if (s == v) continue;
      push_unique(probes, std::move(s));
    }
    push_unique(probes, Scalar::null());
    return probes;
  }
  if (v.is_str()) {
    probes.push_back(Scalar::of(fresh_sentinel(v)));
    probes.push_back(Scalar::null());
    return probes;
  }
  probes.push_back(Scalar::of(!v.as_bool()));
  probes.push_back(Scalar::null());
  return probes;
}

LineageTable influence_oracle(const RunFn& run,
                              const std::vector<Container>& inputs,
                              OracleStats* stats, Container* baseline) {
  if (inputs.empty()) fail(ErrorCode::EmptyInput, "influence_oracle: no inputs");

  OracleStats local;
  OracleStats& st = stats ? *stats : local;

  Container base = run(inputs);
  Container again = run(inputs);
  st.executions += 2;
  if (!containers_equal(base, again)) {
    fail(ErrorCode::NonDeterministicOp,
         "operation produced two different baseline outputs");
  }

  const std::vector<IndexTuple> out_cells = base.all_indices();

  struct Influence {
    bool any = false;
    bool all = true;
  };
  // (slot, in_idx, out_idx) -> aggregate across probes
  std::map<std::tuple<std::uint32_t, IndexTuple, IndexTuple>, Influence> agg;

  for (std::uint32_t slot = 0; slot < inputs.size(); ++slot) {
    const Container& in = inputs[slot];
    for (const auto& a : in.all_indices()) {
      const std::vector<Scalar> domain = standard_domain(in, a);
      for (const auto& probe : domain) {
        std::vector<Container> perturbed = inputs;
        perturbed[slot] = in.with_cell(a, probe);
        Container out = run(perturbed);
        ++st.perturbations;
        ++st.executions;
        for (const auto& b : out_cells) {
          bool changed = !out.has_index(b) || out.get(b) != base.get(b);
          Influence& f = agg[{slot, a, b}];
          f.any = f.any || changed;
          f.all = f.all && changed;
        }
      }
      if (domain.empty()) {
        for (const auto& b : out_cells) {
          agg[{slot, a, b}].all = false;
        }
      }
    }
  }

  std::vector<LineageRecord> records;
  for (const auto& [key, f] : agg) {
    if (!f.any) continue;
    const auto& [slot, a, b] = key;
    records.push_back({b, slot, a, InfluenceKind::Indirect});
    if (f.all) records.push_back({b, slot, a, InfluenceKind::Direct});
  }

  std::vector<ContainerSchema> in_schemas;
  for (const auto& in : inputs) in_schemas.push_back(in.schema());
  LineageTable table = LineageTable::build(
      std::move(in_schemas), base.schema(), std::move(records),
      Completeness::OverApprox, Completeness::Exact,
      Origin::oracle(std::time(nullptr)));
  if (baseline) *baseline = std::move(base);
  return table;
}

}  // namespace xprov
