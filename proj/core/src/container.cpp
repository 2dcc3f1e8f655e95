#include "xprov/container.hpp"

#include <algorithm>
#include <unordered_set>

#include "xprov/error.hpp"

namespace xprov {

std::size_t ContainerSchema::cell_count() const {
  std::size_t n = 1;
  for (const auto& d : dims) n *= d.labels.size();
  return dims.empty() ? 0 : n;
}

bool ContainerSchema::contains(const IndexTuple& idx) const {
  if (idx.size() != dims.size()) return false;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    const auto& labels = dims[d].labels;
    if (std::find(labels.begin(), labels.end(), idx[d]) == labels.end()) {
      return false;
    }
  }
  return true;
}

Container Container::create(std::string id, std::vector<Dimension> dims,
                            std::vector<Scalar> values) {
  std::size_t expected = dims.empty() ? 0 : 1;
  for (const auto& d : dims) {
    std::unordered_set<std::string> seen;
    for (const auto& label : d.labels) {
      if (!seen.insert(label).second) {
        fail(ErrorCode::DuplicateLabel,
             "label '" + label + "' repeats in dimension '" + d.name + "'");
      }
    }
    expected *= d.labels.size();
  }
  if (values.size() != expected) {
    fail(ErrorCode::ArityMismatch,
         "expected " + std::to_string(expected) + " values, got " +
             std::to_string(values.size()));
  }
  Container c;
  c.id_ = std::move(id);
  c.dims_ = std::move(dims);
  c.cells_ = std::move(values);
  return c;
}

std::size_t Container::label_position(std::size_t d,
                                      const std::string& label) const {
  if (d >= dims_.size()) {
    fail(ErrorCode::UnknownIndex, "dimension " + std::to_string(d) +
                                      " out of range for container '" + id_ + "'");
  }
  const auto& labels = dims_[d].labels;
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    fail(ErrorCode::UnknownIndex, "label '" + label + "' not in dimension '" +
                                      dims_[d].name + "' of container '" + id_ +
                                      "'");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

bool Container::has_index(const IndexTuple& idx) const {
  return schema().contains(idx);
}

bool Container::has_index_label(std::size_t d, const std::string& label) const {
  if (d >= dims_.size()) return false;
  const auto& labels = dims_[d].labels;
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::size_t Container::flat_offset(const std::vector<std::size_t>& pos) const {
  std::size_t offset = 0;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    offset = offset * dims_[d].labels.size() + pos[d];
  }
  return offset;
}

const Scalar& Container::get(const IndexTuple& idx) const {
  if (idx.size() != dims_.size()) {
    fail(ErrorCode::UnknownIndex,
         "index arity " + std::to_string(idx.size()) + " != rank " +
             std::to_string(dims_.size()));
  }
  std::vector<std::size_t> pos(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    pos[d] = label_position(d, idx[d]);
  }
  return cells_[flat_offset(pos)];
}

const Scalar& Container::get_at(const std::vector<std::size_t>& pos) const {
  return cells_[flat_offset(pos)];
}

Container Container::with_cell(const IndexTuple& idx, Scalar value) const {
  if (idx.size() != dims_.size()) {
    fail(ErrorCode::UnknownIndex,
         "index arity " + std::to_string(idx.size()) + " != rank " +
             std::to_string(dims_.size()));
  }
  std::vector<std::size_t> pos(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    pos[d] = label_position(d, idx[d]);
  }
  Container copy = *this;
  copy.cells_[flat_offset(pos)] = std::move(value);
  return copy;
}

Container Container::with_id(std::string new_id) const {
  Container copy = *this;
  copy.id_ = std::move(new_id);
  return copy;
}

Container Container::subset(const std::vector<std::vector<std::string>>& keep,
                            std::string new_id) const {
  if (keep.size() != dims_.size()) {
    fail(ErrorCode::Precondition, "subset needs one kept-label list per dimension");
  }
  std::vector<std::vector<std::size_t>> kept_pos(dims_.size());
  std::vector<Dimension> new_dims(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (keep[d].empty()) {
      fail(ErrorCode::EmptyDimension,
           "subset keeps no labels in dimension '" + dims_[d].name + "'");
    }
    std::size_t last = 0;
    bool first = true;
    for (const auto& label : keep[d]) {
      std::size_t p = label_position(d, label);
      if (!first && p <= last) {
        fail(ErrorCode::Precondition,
             "kept labels must preserve dimension order; '" + label +
                 "' is out of order");
      }
      kept_pos[d].push_back(p);
      last = p;
      first = false;
    }
    new_dims[d] = Dimension{dims_[d].name, keep[d]};
  }

  std::vector<Scalar> new_cells;
  std::size_t total = dims_.empty() ? 0 : 1;
  for (const auto& v : kept_pos) total *= v.size();
  new_cells.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    std::vector<std::size_t> pos(dims_.size());
    for (std::size_t d = dims_.size(); d-- > 0;) {
      pos[d] = kept_pos[d][rem % kept_pos[d].size()];
      rem /= kept_pos[d].size();
    }
    new_cells.push_back(cells_[flat_offset(pos)]);
  }
  return Container::create(std::move(new_id), std::move(new_dims),
                           std::move(new_cells));
}

std::vector<IndexTuple> Container::all_indices() const {
  std::vector<IndexTuple> out;
  if (dims_.empty()) return out;
  out.reserve(cells_.size());
  std::size_t total = cells_.size();
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    IndexTuple idx(dims_.size());
    for (std::size_t d = dims_.size(); d-- > 0;) {
      std::size_t n = dims_[d].labels.size();
      idx[d] = dims_[d].labels[rem % n];
      rem /= n;
    }
    out.push_back(std::move(idx));
  }
  return out;
}

bool containers_equal(const Container& a, const Container& b) {
  if (a.dims() != b.dims()) return false;
  return a.cells() == b.cells();
}

std::string index_repr(const IndexTuple& idx) {
  std::string out = "(";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ",";
    out += "'" + idx[i] + "'";
  }
  out += ")";
  return out;
}

}  // namespace xprov
