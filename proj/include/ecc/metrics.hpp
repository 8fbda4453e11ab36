#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ecc/errors.hpp"

namespace ecc {

using LabelVector = std::vector<std::uint32_t>;

struct MetricsReport {
  double nmi = 0.0;  // geometric-mean normalization ("nmi_sqrt")
  double ari = 0.0;
  double ri = 0.0;
  double purity = 0.0;
};

namespace detail {

inline void check_labels(std::span<const std::uint32_t> pred,
                         std::span<const std::uint32_t> truth) {
  if (pred.empty() || truth.empty())
    throw InvalidParams("label vectors must be nonempty");
  if (pred.size() != truth.size())
    throw LengthMismatch("label vectors of length " +
                         std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()));
}

// Contingency table over the distinct labels of each side.
struct Contingency {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> cells;  // pred-major
  std::vector<std::size_t> pred_sizes;
  std::vector<std::size_t> truth_sizes;
};

inline Contingency contingency(std::span<const std::uint32_t> pred,
                               std::span<const std::uint32_t> truth) {
  std::map<std::uint32_t, std::size_t> pid, tid;
  for (std::uint32_t p : pred) pid.emplace(p, pid.size());
  for (std::uint32_t t : truth) tid.emplace(t, tid.size());
  Contingency c;
  c.n = pred.size();
  c.cells.assign(pid.size(), std::vector<std::size_t>(tid.size(), 0));
  c.pred_sizes.assign(pid.size(), 0);
  c.truth_sizes.assign(tid.size(), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::size_t p = pid[pred[i]];
    const std::size_t t = tid[truth[i]];
    ++c.cells[p][t];
    ++c.pred_sizes[p];
    ++c.truth_sizes[t];
  }
  return c;
}

inline double choose2(std::size_t n) {
  return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

// True when both labelings induce the same partition of the items.
inline bool same_partition(const Contingency& c) {
  for (const auto& row : c.cells) {
    std::size_t nonzero = 0;
    for (std::size_t v : row)
      if (v > 0) ++nonzero;
    if (nonzero > 1) return false;
  }
  std::size_t pred_clusters = 0;
  for (std::size_t s : c.pred_sizes)
    if (s > 0) ++pred_clusters;
  std::size_t truth_clusters = 0;
  for (std::size_t s : c.truth_sizes)
    if (s > 0) ++truth_clusters;
  return pred_clusters == truth_clusters;
}

}  // namespace detail

// Fraction of items covered by the majority reference class of their
// predicted cluster. Not symmetric in its arguments.
inline double purity(std::span<const std::uint32_t> pred,
                     std::span<const std::uint32_t> truth) {
  detail::check_labels(pred, truth);
  const auto c = detail::contingency(pred, truth);
  std::size_t covered = 0;
  for (const auto& row : c.cells)
    covered += *std::max_element(row.begin(), row.end());
  return static_cast<double>(covered) / static_cast<double>(c.n);
}

// Pair-counting agreement: (pairs together in both + apart in both) / C(n,2).
inline double rand_index(std::span<const std::uint32_t> pred,
                         std::span<const std::uint32_t> truth) {
  detail::check_labels(pred, truth);
  const auto c = detail::contingency(pred, truth);
  if (c.n < 2) return 1.0;
  double sum_cells = 0.0, sum_pred = 0.0, sum_truth = 0.0;
  for (std::size_t p = 0; p < c.cells.size(); ++p) {
    sum_pred += detail::choose2(c.pred_sizes[p]);
    for (std::size_t t = 0; t < c.cells[p].size(); ++t)
      sum_cells += detail::choose2(c.cells[p][t]);
  }
  for (std::size_t s : c.truth_sizes) sum_truth += detail::choose2(s);
  const double total = detail::choose2(c.n);
  // agreements = both-together + both-apart
  return (total + 2.0 * sum_cells - sum_pred - sum_truth) / total;
}

// Hubert-Arabie chance-corrected Rand index. When the correction
// denominator is zero (e.g. both labelings single-cluster), returns 1 for
// identical partitions and 0 otherwise.
inline double adjusted_rand_index(std::span<const std::uint32_t> pred,
                                  std::span<const std::uint32_t> truth) {
  detail::check_labels(pred, truth);
  const auto c = detail::contingency(pred, truth);
  double sum_cells = 0.0, sum_pred = 0.0, sum_truth = 0.0;
  for (std::size_t p = 0; p < c.cells.size(); ++p) {
    sum_pred += detail::choose2(c.pred_sizes[p]);
    for (std::size_t t = 0; t < c.cells[p].size(); ++t)
      sum_cells += detail::choose2(c.cells[p][t]);
  }
  for (std::size_t s : c.truth_sizes) sum_truth += detail::choose2(s);
  const double total = detail::choose2(c.n);
  if (total <= 0.0) return 1.0;
  const double expected = sum_pred * sum_truth / total;
  const double max_index = 0.5 * (sum_pred + sum_truth);
  if (std::abs(max_index - expected) < 1e-15)
    return detail::same_partition(c) ? 1.0 : 0.0;
  return (sum_cells - expected) / (max_index - expected);
}

// Mutual information of the contingency distribution normalized by
// sqrt(H(pred) H(truth)). If either entropy is zero: 1 for identical
// partitions, 0 otherwise.
inline double normalized_mutual_information(
    std::span<const std::uint32_t> pred,
    std::span<const std::uint32_t> truth) {
  detail::check_labels(pred, truth);
  const auto c = detail::contingency(pred, truth);
  const double n = static_cast<double>(c.n);
  double h_pred = 0.0, h_truth = 0.0, mi = 0.0;
  for (std::size_t s : c.pred_sizes)
    if (s > 0) h_pred -= s / n * std::log(s / n);
  for (std::size_t s : c.truth_sizes)
    if (s > 0) h_truth -= s / n * std::log(s / n);
  if (h_pred <= 0.0 || h_truth <= 0.0)
    return detail::same_partition(c) ? 1.0 : 0.0;
  for (std::size_t p = 0; p < c.cells.size(); ++p)
    for (std::size_t t = 0; t < c.cells[p].size(); ++t) {
      const std::size_t v = c.cells[p][t];
      if (v == 0) continue;
      const double joint = v / n;
      mi += joint * std::log(joint * n * n /
                             (static_cast<double>(c.pred_sizes[p]) *
                              static_cast<double>(c.truth_sizes[t])));
    }
  if (mi < 0.0) mi = 0.0;
  return mi / std::sqrt(h_pred * h_truth);
}

inline MetricsReport evaluate_clustering(std::span<const std::uint32_t> pred,
                                         std::span<const std::uint32_t> truth) {
  return MetricsReport{normalized_mutual_information(pred, truth),
                       adjusted_rand_index(pred, truth),
                       rand_index(pred, truth), purity(pred, truth)};
}

}  // namespace ecc
