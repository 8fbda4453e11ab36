#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ecc/errors.hpp"
#include "ecc/sparse_matrix.hpp"

namespace ecc {

inline constexpr double kInfiniteDivergence =
    std::numeric_limits<double>::infinity();

// Empirical joint probability over (cell, feature): uniform mass 1/nnz on
// every 1-entry of the source matrix, with cached marginals.
class JointDistribution {
 public:
  explicit JointDistribution(BinaryMatrix matrix)
      : matrix_(std::make_shared<BinaryMatrix>(std::move(matrix))),
        row_marginal_(matrix_->n_rows(), 0.0),
        col_marginal_(matrix_->n_cols(), 0.0) {
    if (matrix_->nnz() == 0)
      throw AllZeroMatrix("cannot build a distribution from an all-zero matrix");
    cell_mass_ = 1.0 / static_cast<double>(matrix_->nnz());
    for (std::size_t r = 0; r < matrix_->n_rows(); ++r) {
      row_marginal_[r] = cell_mass_ * static_cast<double>(matrix_->row(r).size());
      for (std::uint32_t c : matrix_->row(r)) col_marginal_[c] += cell_mass_;
    }
  }

  const BinaryMatrix& matrix() const { return *matrix_; }
  std::size_t n_rows() const { return matrix_->n_rows(); }
  std::size_t n_cols() const { return matrix_->n_cols(); }

  // Mass of each 1-entry (all entries carry the same mass).
  double cell_mass() const { return cell_mass_; }
  double mass(std::uint32_t r, std::uint32_t c) const {
    return matrix_->contains(r, c) ? cell_mass_ : 0.0;
  }

  std::span<const double> row_marginal() const { return row_marginal_; }
  std::span<const double> col_marginal() const { return col_marginal_; }

 private:
  std::shared_ptr<const BinaryMatrix> matrix_;
  double cell_mass_;
  std::vector<double> row_marginal_;
  std::vector<double> col_marginal_;
};

inline JointDistribution joint_from_matrix(BinaryMatrix m) {
  return JointDistribution(std::move(m));
}

// Dense cluster-level joint with cached marginals. Zeros are allowed
// (empty clusters).
class ClusterJointDistribution {
 public:
  ClusterJointDistribution() : ClusterJointDistribution(1, 1) {}

  ClusterJointDistribution(std::size_t n_row_clusters, std::size_t n_col_clusters)
      : n_row_clusters_(n_row_clusters),
        n_col_clusters_(n_col_clusters),
        mass_(n_row_clusters * n_col_clusters, 0.0),
        row_marginal_(n_row_clusters, 0.0),
        col_marginal_(n_col_clusters, 0.0) {}

  std::size_t n_row_clusters() const { return n_row_clusters_; }
  std::size_t n_col_clusters() const { return n_col_clusters_; }

  double mass(std::size_t a, std::size_t b) const {
    return mass_[a * n_col_clusters_ + b];
  }
  void add_mass(std::size_t a, std::size_t b, double m) {
    mass_[a * n_col_clusters_ + b] += m;
    row_marginal_[a] += m;
    col_marginal_[b] += m;
  }

  std::span<const double> row_marginal() const { return row_marginal_; }
  std::span<const double> col_marginal() const { return col_marginal_; }

 private:
  std::size_t n_row_clusters_;
  std::size_t n_col_clusters_;
  std::vector<double> mass_;
  std::vector<double> row_marginal_;
  std::vector<double> col_marginal_;
};

// I(C, D) = sum over g(c,d) > 0 of g(c,d) ln(g(c,d) / (g(c) g(d))), in nats.
// Clamped to 0 against a -1e-12 numerical floor.
inline double mutual_information(const JointDistribution& d) {
  double mi = 0.0;
  const double m = d.cell_mass();
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    const double pr = d.row_marginal()[r];
    for (std::uint32_t c : d.matrix().row(r))
      mi += m * std::log(m / (pr * d.col_marginal()[c]));
  }
  return mi < 0.0 ? 0.0 : mi;
}

inline double mutual_information(const ClusterJointDistribution& d) {
  double mi = 0.0;
  for (std::size_t a = 0; a < d.n_row_clusters(); ++a)
    for (std::size_t b = 0; b < d.n_col_clusters(); ++b) {
      const double g = d.mass(a, b);
      if (g > 0.0)
        mi += g * std::log(g / (d.row_marginal()[a] * d.col_marginal()[b]));
    }
  return mi < 0.0 ? 0.0 : mi;
}

// D_KL(g || h) in nats. Terms with g(x) = 0 contribute nothing; g(x) > 0
// against h(x) = 0 yields the infinite-divergence sentinel.
inline double kl_divergence(std::span<const double> g, std::span<const double> h) {
  if (g.size() != h.size())
    throw LengthMismatch("kl_divergence: vectors of length " +
                         std::to_string(g.size()) + " vs " +
                         std::to_string(h.size()));
  double kl = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 0.0) {
      if (h[i] <= 0.0) return kInfiniteDivergence;
      kl += g[i] * std::log(g[i] / h[i]);
    }
  }
  return kl;
}

inline ClusterJointDistribution aggregate_clusters(
    const JointDistribution& d, std::span<const std::uint32_t> row_assign,
    std::span<const std::uint32_t> col_assign, std::size_t n_row_clusters,
    std::size_t n_col_clusters) {
  if (row_assign.size() != d.n_rows() || col_assign.size() != d.n_cols())
    throw LengthMismatch("aggregate_clusters: assignment lengths do not match "
                         "distribution dimensions");
  for (std::uint32_t a : row_assign)
    if (a >= n_row_clusters)
      throw OutOfRangeAssignment("row cluster id " + std::to_string(a) +
                                 " >= " + std::to_string(n_row_clusters));
  for (std::uint32_t b : col_assign)
    if (b >= n_col_clusters)
      throw OutOfRangeAssignment("column cluster id " + std::to_string(b) +
                                 " >= " + std::to_string(n_col_clusters));
  ClusterJointDistribution out(n_row_clusters, n_col_clusters);
  const double m = d.cell_mass();
  for (std::size_t r = 0; r < d.n_rows(); ++r)
    for (std::uint32_t c : d.matrix().row(r))
      out.add_mass(row_assign[r], col_assign[c], m);
  return out;
}

// Row-cluster reference conditional over columns for the cluster containing
// row i: entry w is (mass(a, b_w) / rowmarg(a)) * (p(w) / colmarg(b_w)),
// zero where p(w) = 0.
inline std::vector<double> reference_conditional(
    const JointDistribution& d, const ClusterJointDistribution& c,
    std::span<const std::uint32_t> row_assign,
    std::span<const std::uint32_t> col_assign, std::size_t row_index) {
  if (d.row_marginal()[row_index] <= 0.0)
    throw EmptyRow("row " + std::to_string(row_index) + " has zero marginal");
  const std::uint32_t a = row_assign[row_index];
  std::vector<double> out(d.n_cols(), 0.0);
  for (std::size_t w = 0; w < d.n_cols(); ++w) {
    const double pw = d.col_marginal()[w];
    if (pw <= 0.0) continue;
    const std::uint32_t b = col_assign[w];
    const double denom = c.row_marginal()[a] * c.col_marginal()[b];
    if (denom > 0.0) out[w] = c.mass(a, b) / c.row_marginal()[a] * pw / c.col_marginal()[b];
  }
  return out;
}

// Symmetric column-cluster version: conditional over rows for the cluster
// containing column j.
inline std::vector<double> reference_conditional_col(
    const JointDistribution& d, const ClusterJointDistribution& c,
    std::span<const std::uint32_t> row_assign,
    std::span<const std::uint32_t> col_assign, std::size_t col_index) {
  if (d.col_marginal()[col_index] <= 0.0)
    throw EmptyColumn("column " + std::to_string(col_index) +
                      " has zero marginal");
  const std::uint32_t b = col_assign[col_index];
  std::vector<double> out(d.n_rows(), 0.0);
  for (std::size_t x = 0; x < d.n_rows(); ++x) {
    const double px = d.row_marginal()[x];
    if (px <= 0.0) continue;
    const std::uint32_t a = row_assign[x];
    const double denom = c.col_marginal()[b] * c.row_marginal()[a];
    if (denom > 0.0) out[x] = c.mass(a, b) / c.col_marginal()[b] * px / c.row_marginal()[a];
  }
  return out;
}

}  // namespace ecc
