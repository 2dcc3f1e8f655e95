#include "xprov/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <numeric>
#include <set>

#include "xprov/error.hpp"
#include "xprov/oracle.hpp"

namespace xprov {
namespace {

std::string resolve_name(const std::string& name) {
  if (name == "dropna" || name == "drop_null_rows") return "dropna";
  if (name == "filter" || name == "filter_rows") return "filter";
  if (name == "minmax_scale" || name == "minmax_scale_columns") {
    return "minmax_scale";
  }
  if (name == "map_add_constant") return "map_add_constant";
  if (name == "sort" || name == "sort_by_column") return "sort";
  if (name == "project" || name == "project_columns") return "project";
  return {};
}

const Container& sole_input(const OperationSignature& op,
                            const std::vector<Container>& inputs) {
  if (inputs.size() != 1) {
    fail(ErrorCode::Precondition,
         op.name + ": expects exactly one input, got " +
             std::to_string(inputs.size()));
  }
  if (inputs[0].rank() != 2) {
    fail(ErrorCode::Precondition, op.name + ": expects a 2-D container");
  }
  return inputs[0];
}

std::vector<std::string> split_columns(const std::string& joined) {
  return OperationSignature::split_list(joined);
}

void check_cmp(const std::string& cmp) {
  if (cmp != "<" && cmp != ">" && cmp != "=" && cmp != "!=") {
    fail(ErrorCode::Precondition, "filter: cmp must be one of < > = !=");
  }
}

// Null cells and mixed-type comparisons never satisfy the predicate.
bool pred_holds(const Scalar& x, const std::string& cmp, const Scalar& v) {
  if (x.is_null() || v.is_null()) return false;
  bool comparable = (x.is_number() && v.is_number()) ||
                    (x.is_str() && v.is_str()) || (x.is_bool() && v.is_bool());
  if (!comparable) return false;
  int c = scalar_compare(x, v);
  if (cmp == "<") return c < 0;
  if (cmp == ">") return c > 0;
  if (cmp == "=") return c == 0;
  return c != 0;
}

Container exec_dropna(const OperationSignature&, const Container& a,
                      const std::string& out_id) {
  std::size_t nr = a.dim(0).labels.size();
  std::size_t nc = a.dim(1).labels.size();
  std::vector<std::string> keep;
  std::vector<Scalar> cells;
  for (std::size_t r = 0; r < nr; ++r) {
    bool has_null = false;
    for (std::size_t c = 0; c < nc; ++c) {
      if (a.get_at({r, c}).is_null()) {
        has_null = true;
        break;
      }
    }
    if (has_null) continue;
    keep.push_back(a.dim(0).labels[r]);
    for (std::size_t c = 0; c < nc; ++c) cells.push_back(a.get_at({r, c}));
  }
  return Container::create(out_id, {Dimension{a.dim(0).name, keep}, a.dim(1)},
                           std::move(cells));
}

Container exec_filter(const OperationSignature& op, const Container& a,
                      const std::string& out_id) {
  const std::string column = op.require_str("column");
  const std::string cmp = op.require_str("cmp");
  const Scalar& value = op.require("value");
  check_cmp(cmp);
  if (value.is_null()) {
    fail(ErrorCode::Precondition, "filter: value must be non-null");
  }
  std::size_t pcol = a.label_position(1, column);
  std::size_t nr = a.dim(0).labels.size();
  std::size_t nc = a.dim(1).labels.size();
  std::vector<std::string> keep;
  std::vector<Scalar> cells;
  for (std::size_t r = 0; r < nr; ++r) {
    if (!pred_holds(a.get_at({r, pcol}), cmp, value)) continue;
    keep.push_back(a.dim(0).labels[r]);
    for (std::size_t c = 0; c < nc; ++c) cells.push_back(a.get_at({r, c}));
  }
  return Container::create(out_id, {Dimension{a.dim(0).name, keep}, a.dim(1)},
                           std::move(cells));
}

struct Pool {
  bool any = false;
  double min = 0.0;
  double max = 0.0;

  void add(const Scalar& v) {
    if (!v.is_number()) return;
    double x = v.number();
    if (!any) {
      any = true;
      min = max = x;
    } else {
      min = std::min(min, x);
      max = std::max(max, x);
    }
  }

  Scalar scale(const Scalar& v) const {
    if (!v.is_number()) return v;
    if (max == min) return Scalar::of(0.0);
    return Scalar::of((v.number() - min) / (max - min));
  }
};

std::set<std::size_t> scaled_positions(const OperationSignature& op,
                                       const Container& a) {
  std::set<std::size_t> scaled;
  for (const auto& col : split_columns(op.require_str("columns"))) {
    scaled.insert(a.label_position(1, col));
  }
  return scaled;
}

Container exec_minmax(const OperationSignature& op, const Container& a,
                      const std::string& out_id) {
  std::set<std::size_t> scaled = scaled_positions(op, a);
  std::size_t nr = a.dim(0).labels.size();
  std::size_t nc = a.dim(1).labels.size();
  std::vector<Pool> pools(nc);
  for (std::size_t c : scaled) {
    for (std::size_t r = 0; r < nr; ++r) pools[c].add(a.get_at({r, c}));
  }
  std::vector<Scalar> cells;
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      const Scalar& v = a.get_at({r, c});
      cells.push_back(scaled.count(c) ? pools[c].scale(v) : v);
    }
  }
  return Container::create(out_id, {a.dim(0), a.dim(1)}, std::move(cells));
}

Container exec_map_add(const OperationSignature& op, const Container& a,
                       const std::string& out_id) {
  const Scalar& k = op.require("k");
  if (!k.is_number()) {
    fail(ErrorCode::Precondition, "map_add_constant: k must be a number");
  }
  std::vector<Scalar> cells;
  cells.reserve(a.cell_count());
  for (const auto& v : a.cells()) {
    if (v.is_int() && k.is_int()) {
      cells.push_back(Scalar::of(v.as_int() + k.as_int()));
    } else if (v.is_number()) {
      cells.push_back(Scalar::of(v.number() + k.number()));
    } else {
      cells.push_back(v);
    }
  }
  return Container::create(out_id, {a.dim(0), a.dim(1)}, std::move(cells));
}

// Stable comparator used by sort: Nulls always order last, everything else
// by value in the requested direction.
std::vector<std::size_t> sort_order(const std::vector<Scalar>& keys,
                                    bool asc) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     const Scalar& ki = keys[i];
                     const Scalar& kj = keys[j];
                     if (ki.is_null()) return false;
                     if (kj.is_null()) return true;
                     int c = scalar_compare(ki, kj);
                     return asc ? c < 0 : c > 0;
                   });
  return order;
}

Container exec_sort(const OperationSignature& op, const Container& a,
                    const std::string& out_id) {
  const std::string column = op.require_str("column");
  const Scalar& asc_v = op.require("asc");
  if (!asc_v.is_bool()) {
    fail(ErrorCode::Precondition, "sort: asc must be a boolean");
  }
  std::size_t kpos = a.label_position(1, column);
  std::size_t nr = a.dim(0).labels.size();
  std::size_t nc = a.dim(1).labels.size();
  std::vector<Scalar> keys;
  for (std::size_t r = 0; r < nr; ++r) keys.push_back(a.get_at({r, kpos}));
  std::vector<std::size_t> order = sort_order(keys, asc_v.as_bool());

  std::vector<std::string> labels;
  std::vector<Scalar> cells;
  for (std::size_t j = 0; j < nr; ++j) {
    labels.push_back(std::to_string(j));
    for (std::size_t c = 0; c < nc; ++c) {
      cells.push_back(a.get_at({order[j], c}));
    }
  }
  return Container::create(out_id, {Dimension{a.dim(0).name, labels}, a.dim(1)},
                           std::move(cells));
}

Container exec_project(const OperationSignature& op, const Container& a,
                       const std::string& out_id) {
  std::vector<std::string> cols = split_columns(op.require_str("columns"));
  std::vector<std::size_t> pos;
  for (const auto& col : cols) pos.push_back(a.label_position(1, col));
  std::size_t nr = a.dim(0).labels.size();
  std::vector<Scalar> cells;
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t p : pos) cells.push_back(a.get_at({r, p}));
  }
  return Container::create(
      out_id, {a.dim(0), Dimension{a.dim(1).name, std::move(cols)}},
      std::move(cells));
}

void emit_both(std::vector<LineageRecord>& records, IndexTuple out,
               IndexTuple in) {
  records.push_back({out, 0, in, InfluenceKind::Direct});
  records.push_back({std::move(out), 0, std::move(in), InfluenceKind::Indirect});
}

// dropna: a surviving cell is pinned to itself and kept alive by its whole
// row (any row cell can turn Null and remove it).
std::vector<LineageRecord> capture_dropna(const Container& a,
                                          const Container& out) {
  std::vector<LineageRecord> records;
  for (const auto& row : out.dim(0).labels) {
    for (const auto& col : out.dim(1).labels) {
      emit_both(records, {row, col}, {row, col});
      for (const auto& col2 : a.dim(1).labels) {
        records.push_back(
            {{row, col}, 0, {row, col2}, InfluenceKind::Indirect});
      }
    }
  }
  return records;
}

// filter: like dropna but only the predicate cell keeps a row alive. The
// predicate cell is a Direct influencer of its row only when no admissible
// replacement value would still satisfy the predicate (always true for =,
// never for the open comparisons, whose domains include a passing probe).
std::vector<LineageRecord> capture_filter(const OperationSignature& op,
                                          const Container& a,
                                          const Container& out) {
  const std::string column = op.require_str("column");
  const std::string cmp = op.require_str("cmp");
  const Scalar& value = op.require("value");
  std::vector<LineageRecord> records;
  for (const auto& row : out.dim(0).labels) {
    bool keep_alt = false;
    for (const auto& probe : standard_domain(a, {row, column})) {
      if (pred_holds(probe, cmp, value)) {
        keep_alt = true;
        break;
      }
    }
    for (const auto& col : out.dim(1).labels) {
      emit_both(records, {row, col}, {row, col});
      records.push_back(
          {{row, col}, 0, {row, column}, InfluenceKind::Indirect});
      if (!keep_alt) {
        records.push_back(
            {{row, col}, 0, {row, column}, InfluenceKind::Direct});
      }
    }
  }
  return records;
}

// minmax_scale: influence never crosses columns. Within a scaled column the
// effect of replacing one cell is simulated directly against the scaling
// formula for every probe, which catches the value-dependent cases (pool
// boundary cells, Nulls that a probe pulls into the pool, collapses to a
// constant column).
std::vector<LineageRecord> capture_minmax(const OperationSignature& op,
                                          const Container& a,
                                          const Container& out) {
  std::set<std::size_t> scaled = scaled_positions(op, a);
  std::size_t nr = a.dim(0).labels.size();
  std::size_t nc = a.dim(1).labels.size();
  std::vector<LineageRecord> records;
  for (std::size_t c = 0; c < nc; ++c) {
    const std::string& col = a.dim(1).labels[c];
    if (!scaled.count(c)) {
      for (const auto& row : a.dim(0).labels) {
        emit_both(records, {row, col}, {row, col});
      }
      continue;
    }
    std::vector<Scalar> column_vals;
    for (std::size_t r = 0; r < nr; ++r) {
      column_vals.push_back(a.get_at({r, c}));
    }
    for (std::size_t rs = 0; rs < nr; ++rs) {
      const std::string& src_row = a.dim(0).labels[rs];
      std::vector<Scalar> domain = standard_domain(a, {src_row, col});
      std::vector<bool> any(nr, false);
      std::vector<bool> all(nr, true);
      for (const auto& probe : domain) {
        std::vector<Scalar> w = column_vals;
        w[rs] = probe;
        Pool pool;
        for (const auto& v : w) pool.add(v);
        for (std::size_t rt = 0; rt < nr; ++rt) {
          bool changed = pool.scale(w[rt]) != out.get_at({rt, c});
          any[rt] = any[rt] || changed;
          all[rt] = all[rt] && changed;
        }
      }
      for (std::size_t rt = 0; rt < nr; ++rt) {
        if (!any[rt]) continue;
        const std::string& dst_row = a.dim(0).labels[rt];
        records.push_back(
            {{dst_row, col}, 0, {src_row, col}, InfluenceKind::Indirect});
        if (all[rt]) {
          records.push_back(
              {{dst_row, col}, 0, {src_row, col}, InfluenceKind::Direct});
        }
      }
    }
  }
  return records;
}

// map_add_constant: strictly cell-local, and every probe (including Null)
// moves the output cell, so each cell maps to itself with both kinds.
std::vector<LineageRecord> capture_map_add(const Container& a) {
  std::vector<LineageRecord> records;
  for (const auto& idx : a.all_indices()) {
    emit_both(records, idx, idx);
  }
  return records;
}

// sort: non-key cells travel with their row. Key cells can move any row, so
// their effect is simulated by re-ranking the key column once per probe and
// comparing the permuted outputs (this also catches ties, where a probe can
// leave the arrangement unchanged).
std::vector<LineageRecord> capture_sort(const OperationSignature& op,
                                        const Container& a,
                                        const Container& out) {
  const std::string column = op.require_str("column");
  bool asc = op.require("asc").as_bool();
  std::size_t kpos = a.label_position(1, column);
  std::size_t nr = a.dim(0).labels.size();
  std::size_t nc = a.dim(1).labels.size();
  std::vector<Scalar> keys;
  for (std::size_t r = 0; r < nr; ++r) keys.push_back(a.get_at({r, kpos}));
  std::vector<std::size_t> order = sort_order(keys, asc);
  std::vector<std::size_t> out_pos_of(nr);
  for (std::size_t j = 0; j < nr; ++j) out_pos_of[order[j]] = j;

  std::vector<LineageRecord> records;
  for (std::size_t r = 0; r < nr; ++r) {
    const std::string& in_row = a.dim(0).labels[r];
    const std::string& dst_row = out.dim(0).labels[out_pos_of[r]];
    for (std::size_t c = 0; c < nc; ++c) {
      if (c == kpos) continue;
      emit_both(records, {dst_row, a.dim(1).labels[c]},
                {in_row, a.dim(1).labels[c]});
    }
  }

  for (std::size_t rs = 0; rs < nr; ++rs) {
    const std::string& src_row = a.dim(0).labels[rs];
    std::vector<Scalar> domain = standard_domain(a, {src_row, column});
    std::vector<bool> any(nr * nc, false);
    std::vector<bool> all(nr * nc, true);
    for (const auto& probe : domain) {
      std::vector<Scalar> w = keys;
      w[rs] = probe;
      std::vector<std::size_t> reordered = sort_order(w, asc);
      for (std::size_t j = 0; j < nr; ++j) {
        for (std::size_t c = 0; c < nc; ++c) {
          const Scalar& now = (c == kpos) ? w[reordered[j]]
                                          : a.get_at({reordered[j], c});
          bool changed = now != out.get_at({j, c});
          any[j * nc + c] = any[j * nc + c] || changed;
          all[j * nc + c] = all[j * nc + c] && changed;
        }
      }
    }
    for (std::size_t j = 0; j < nr; ++j) {
      for (std::size_t c = 0; c < nc; ++c) {
        if (!any[j * nc + c]) continue;
        IndexTuple dst = {out.dim(0).labels[j], a.dim(1).labels[c]};
        records.push_back({dst, 0, {src_row, column}, InfluenceKind::Indirect});
        if (all[j * nc + c]) {
          records.push_back({dst, 0, {src_row, column}, InfluenceKind::Direct});
        }
      }
    }
  }
  return records;
}

// project: kept cells map to themselves; dropped columns vanish entirely.
std::vector<LineageRecord> capture_project(const Container& out) {
  std::vector<LineageRecord> records;
  for (const auto& row : out.dim(0).labels) {
    for (const auto& col : out.dim(1).labels) {
      emit_both(records, {row, col}, {row, col});
    }
  }
  return records;
}

}  // namespace

bool is_builtin(const std::string& op_name) {
  return !resolve_name(op_name).empty();
}

std::vector<std::string> builtin_names() {
  return {"dropna", "filter", "minmax_scale", "map_add_constant", "sort",
          "project"};
}

Container execute_builtin(const OperationSignature& op,
                          const std::vector<Container>& inputs,
                          const std::string& output_id) {
  const std::string name = resolve_name(op.name);
  if (name.empty()) {
    fail(ErrorCode::UnknownOperation, "not a built-in: " + op.name);
  }
  const Container& a = sole_input(op, inputs);
  if (name == "dropna") return exec_dropna(op, a, output_id);
  if (name == "filter") return exec_filter(op, a, output_id);
  if (name == "minmax_scale") return exec_minmax(op, a, output_id);
  if (name == "map_add_constant") return exec_map_add(op, a, output_id);
  if (name == "sort") return exec_sort(op, a, output_id);
  return exec_project(op, a, output_id);
}

LineageTable capture_exact_lineage(const OperationSignature& op,
                                   const std::vector<Container>& inputs,
                                   const Container& output) {
  const std::string name = resolve_name(op.name);
  if (name.empty()) {
    fail(ErrorCode::NotBuiltin, "cannot capture lineage for " + op.name);
  }
  const Container& a = sole_input(op, inputs);
  Container expected = execute_builtin(op, inputs, output.id());
  if (!containers_equal(expected, output)) {
    fail(ErrorCode::OutputMismatch,
         op.name + ": output does not match this input");
  }

  std::vector<LineageRecord> records;
  if (name == "dropna") {
    records = capture_dropna(a, output);
  } else if (name == "filter") {
    records = capture_filter(op, a, output);
  } else if (name == "minmax_scale") {
    records = capture_minmax(op, a, output);
  } else if (name == "map_add_constant") {
    records = capture_map_add(a);
  } else if (name == "sort") {
    records = capture_sort(op, a, output);
  } else {
    records = capture_project(output);
  }
  return LineageTable::build({a.schema()}, output.schema(), std::move(records),
                             Completeness::Exact, Completeness::Exact,
                             Origin::captured_exact(std::time(nullptr)));
}

}  // namespace xprov
