#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "xprov/scalar.hpp"

namespace xprov {

// One entity coordinate: exactly one label per dimension, in dimension order.
using IndexTuple = std::vector<std::string>;

// Named dimension with an ordered list of unique string labels. Order is
// meaningful (it is the presentation order and the subsequence baseline for
// slicing checks); uniqueness is enforced at construction.
struct Dimension {
  std::string name;
  std::vector<std::string> labels;

  bool operator==(const Dimension& other) const = default;
};

// Dims-only view of a container; what lineage tables key their index
// universes on.
struct ContainerSchema {
  std::vector<Dimension> dims;

  bool operator==(const ContainerSchema& other) const = default;

  std::size_t rank() const { return dims.size(); }
  std::size_t cell_count() const;
  // True when idx has one existing label per dimension.
  bool contains(const IndexTuple& idx) const;
};

// Immutable dense array of scalars addressed by per-dimension labels.
// Cells are stored row-major in the declared dimension order. All mutators
// return new containers.
class Container {
 public:
  // Rank-0 container with no cells and an empty id; a placeholder value.
  Container() = default;

  // Validates label uniqueness (DuplicateLabel) and value count
  // (ArityMismatch). A dimension may be empty, making the container
  // cell-less but still schema-bearing.
  static Container create(std::string id, std::vector<Dimension> dims,
                          std::vector<Scalar> values);

  const std::string& id() const { return id_; }
  const std::vector<Dimension>& dims() const { return dims_; }
  const Dimension& dim(std::size_t i) const { return dims_[i]; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t cell_count() const { return cells_.size(); }
  const std::vector<Scalar>& cells() const { return cells_; }

  ContainerSchema schema() const { return ContainerSchema{dims_}; }

  // Label -> position within dimension d; UnknownIndex if absent.
  std::size_t label_position(std::size_t d, const std::string& label) const;
  bool has_index(const IndexTuple& idx) const;
  bool has_index_label(std::size_t d, const std::string& label) const;

  const Scalar& get(const IndexTuple& idx) const;
  const Scalar& get_at(const std::vector<std::size_t>& pos) const;

  // Copy with one cell replaced (UnknownIndex on a bad tuple).
  Container with_cell(const IndexTuple& idx, Scalar value) const;

  // Copy under a different id.
  Container with_id(std::string new_id) const;

  // Copy restricted to the given ordered label subsets, one list per
  // dimension. Kept labels must exist (UnknownIndex), preserve this
  // container's relative order (Precondition), and be nonempty per
  // dimension (EmptyDimension).
  Container subset(const std::vector<std::vector<std::string>>& keep,
                   std::string new_id) const;

  // Row-major enumeration of all index tuples, lexicographic by position.
  std::vector<IndexTuple> all_indices() const;

  std::size_t flat_offset(const std::vector<std::size_t>& pos) const;

 private:
  std::string id_;
  std::vector<Dimension> dims_;
  std::vector<Scalar> cells_;
};

// Structural and cell-wise equality; ids are not compared.
bool containers_equal(const Container& a, const Container& b);

// Render an index tuple for messages: ('0','Age').
std::string index_repr(const IndexTuple& idx);

}  // namespace xprov
