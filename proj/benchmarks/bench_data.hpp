#pragma once

// Deterministic input tables for the microbenchmarks.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xprov/container.hpp"

namespace benchdata {

// rows x 4 people-shaped table. Every fifth Name and every seventh Score is
// a hole, so dropping and filtering have real work to do at every size.
inline xprov::Container people(std::size_t rows) {
  std::vector<std::string> row_labels;
  row_labels.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    row_labels.push_back("r" + std::to_string(i));
  }
  std::vector<xprov::Scalar> cells;
  cells.reserve(rows * 4);
  for (std::size_t i = 0; i < rows; ++i) {
    cells.push_back(i % 5 == 4 ? xprov::Scalar::null()
                               : xprov::Scalar::of("p" + std::to_string(i)));
    cells.push_back(xprov::Scalar::of(static_cast<std::int64_t>(20 + i * 7 % 30)));
    cells.push_back(xprov::Scalar::of(static_cast<std::int64_t>(i % 4)));
    cells.push_back(i % 7 == 6 ? xprov::Scalar::null()
                               : xprov::Scalar::of(static_cast<std::int64_t>(i % 100)));
  }
  return xprov::Container::create(
      "B0",
      {{"row", std::move(row_labels)},
       {"col", {"Name", "Age", "Children", "Score"}}},
      std::move(cells));
}

}  // namespace benchdata
