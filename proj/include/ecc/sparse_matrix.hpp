#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecc/errors.hpp"

namespace ecc {

using Coord = std::pair<std::uint32_t, std::uint32_t>;

// Sparse 0/1 matrix, rows = cells, columns = features. Stores the 1-entries
// as sorted per-row and per-column adjacency so conditional-distribution
// sweeps touch only nonzeros. Immutable after construction.
class BinaryMatrix {
 public:
  BinaryMatrix(std::size_t n_rows, std::size_t n_cols,
               std::span<const Coord> coords)
      : n_rows_(n_rows), n_cols_(n_cols), row_cols_(n_rows), col_rows_(n_cols) {
    for (const auto& [r, c] : coords) {
      if (r >= n_rows_ || c >= n_cols_)
        throw OutOfRangeAssignment("coordinate (" + std::to_string(r) + ", " +
                                   std::to_string(c) + ") outside " +
                                   std::to_string(n_rows_) + "x" +
                                   std::to_string(n_cols_) + " matrix");
      row_cols_[r].push_back(c);
    }
    nnz_ = 0;
    for (std::size_t r = 0; r < n_rows_; ++r) {
      auto& cols = row_cols_[r];
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
      nnz_ += cols.size();
      for (std::uint32_t c : cols)
        col_rows_[c].push_back(static_cast<std::uint32_t>(r));
    }
  }

  BinaryMatrix(std::size_t n_rows, std::size_t n_cols,
               std::initializer_list<Coord> coords)
      : BinaryMatrix(n_rows, n_cols,
                     std::span<const Coord>(coords.begin(), coords.size())) {}

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return nnz_; }

  std::span<const std::uint32_t> row(std::size_t r) const {
    return row_cols_[r];
  }
  std::span<const std::uint32_t> col(std::size_t c) const {
    return col_rows_[c];
  }

  bool contains(std::uint32_t r, std::uint32_t c) const {
    const auto& cols = row_cols_[r];
    return std::binary_search(cols.begin(), cols.end(), c);
  }

  std::vector<Coord> coords() const {
    std::vector<Coord> out;
    out.reserve(nnz_);
    for (std::uint32_t r = 0; r < n_rows_; ++r)
      for (std::uint32_t c : row_cols_[r]) out.emplace_back(r, c);
    return out;
  }

  BinaryMatrix transposed() const {
    std::vector<Coord> flipped;
    flipped.reserve(nnz_);
    for (std::uint32_t r = 0; r < n_rows_; ++r)
      for (std::uint32_t c : row_cols_[r]) flipped.emplace_back(c, r);
    return BinaryMatrix(n_cols_, n_rows_, flipped);
  }

 private:
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::size_t nnz_;
  std::vector<std::vector<std::uint32_t>> row_cols_;
  std::vector<std::vector<std::uint32_t>> col_rows_;
};

}  // namespace ecc
