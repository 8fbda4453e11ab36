#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecc/distribution.hpp"
#include "ecc/errors.hpp"
#include "ecc/rng.hpp"
#include "ecc/sparse_matrix.hpp"

namespace ecc {

// Row/column cluster assignments plus the induced cluster-level joint.
// cluster_joint is refreshed after every half-sweep, so it always matches
// the stored assignments.
struct CoClusterState {
  std::vector<std::uint32_t> row_assign;
  std::vector<std::uint32_t> col_assign;
  ClusterJointDistribution cluster_joint;
  double objective = 0.0;
};

struct FitReport {
  CoClusterState state;
  std::vector<double> objective_trace;
  std::size_t iterations_run = 0;
  bool converged = false;
};

inline constexpr double kConvergenceTol = 1e-10;

// Mutual-information loss of the co-clustering: I(data) - I(cluster joint).
inline double itcc_objective(const CoClusterState& state,
                             const JointDistribution& data_joint) {
  return mutual_information(data_joint) -
         mutual_information(state.cluster_joint);
}

namespace detail {

// Marginal-matching penalty on one axis of the sweep. When active, each
// candidate move is scored with the KL divergence of the tentative cluster
// marginal against the reference, weighted by weight / marginal(item).
// This is exact coordinate descent on the penalized objective, which keeps
// the full objective trace non-increasing.
struct AxisPenalty {
  double weight = 0.0;
  std::span<const double> reference;
  bool active() const { return weight > 0.0; }
};

// KL of one item's data conditional against the reference conditional of
// candidate cluster `a`, touching only the item's nonzeros.
inline double item_kl(const JointDistribution& d,
                      const ClusterJointDistribution& q, bool rows,
                      std::span<const std::uint32_t> other_assign,
                      std::size_t item, std::size_t a) {
  const double marg =
      rows ? d.row_marginal()[item] : d.col_marginal()[item];
  const double qa = rows ? q.row_marginal()[a] : q.col_marginal()[a];
  if (qa <= 0.0) return kInfiniteDivergence;
  const double m = d.cell_mass();
  const double g = m / marg;
  const auto nonzeros = rows ? d.matrix().row(item) : d.matrix().col(item);
  double kl = 0.0;
  for (std::uint32_t j : nonzeros) {
    const std::uint32_t b = other_assign[j];
    const double qab = rows ? q.mass(a, b) : q.mass(b, a);
    if (qab <= 0.0) return kInfiniteDivergence;
    const double qb = rows ? q.col_marginal()[b] : q.row_marginal()[b];
    const double pj = rows ? d.col_marginal()[j] : d.row_marginal()[j];
    const double h = qab / qa * pj / qb;
    kl += g * std::log(g / h);
  }
  return kl;
}

// One batch half-sweep over rows (rows = true) or columns. Items are scored
// against the conditionals induced by the incoming cluster joint; the
// penalty marginal tracks already-updated items within the sweep. Ties go
// to the lowest cluster index; items with zero marginal keep their
// assignment. If every candidate scores infinite, the pure-KL argmin wins;
// if that is also infinite everywhere the item stays put.
inline void sweep_axis(const JointDistribution& d, const CoClusterState& state,
                       bool rows, const AxisPenalty& penalty,
                       std::vector<std::uint32_t>& assign) {
  const auto& q = state.cluster_joint;
  const std::size_t n_items = rows ? d.n_rows() : d.n_cols();
  const std::size_t n_clusters =
      rows ? q.n_row_clusters() : q.n_col_clusters();
  const auto other_assign =
      rows ? std::span<const std::uint32_t>(state.col_assign)
           : std::span<const std::uint32_t>(state.row_assign);
  const auto item_marginal = rows ? d.row_marginal() : d.col_marginal();

  std::vector<double> live;
  std::vector<double> tentative;
  if (penalty.active()) {
    const auto qm = rows ? q.row_marginal() : q.col_marginal();
    live.assign(qm.begin(), qm.end());
    tentative.resize(live.size());
  }

  for (std::size_t i = 0; i < n_items; ++i) {
    const double qi = item_marginal[i];
    if (qi <= 0.0) continue;
    const std::uint32_t cur = assign[i];
    double best_score = kInfiniteDivergence;
    double best_kl = kInfiniteDivergence;
    std::uint32_t best = cur;
    std::uint32_t best_kl_idx = cur;
    bool any_finite = false;
    bool any_finite_kl = false;
    for (std::uint32_t a = 0; a < n_clusters; ++a) {
      const double kl = item_kl(d, q, rows, other_assign, i, a);
      double score = kl;
      if (penalty.active() && std::isfinite(kl)) {
        tentative = live;
        tentative[cur] -= qi;
        if (tentative[cur] < 0.0) tentative[cur] = 0.0;
        tentative[a] += qi;
        score += penalty.weight *
                 kl_divergence(tentative, penalty.reference) / qi;
      }
      if (std::isfinite(kl) && (!any_finite_kl || kl < best_kl)) {
        best_kl = kl;
        best_kl_idx = a;
        any_finite_kl = true;
      }
      if (std::isfinite(score) && (!any_finite || score < best_score)) {
        best_score = score;
        best = a;
        any_finite = true;
      }
    }
    if (!any_finite) best = any_finite_kl ? best_kl_idx : cur;
    if (penalty.active()) {
      live[cur] -= qi;
      if (live[cur] < 0.0) live[cur] = 0.0;
      live[best] += qi;
    }
    assign[i] = best;
  }
}

inline void refresh(CoClusterState& state, const JointDistribution& d) {
  state.cluster_joint =
      aggregate_clusters(d, state.row_assign, state.col_assign,
                         state.cluster_joint.n_row_clusters(),
                         state.cluster_joint.n_col_clusters());
}

// Full penalized objective; penalty terms are added only when their weight
// is positive so an infinite divergence cannot leak through a zero weight.
inline double penalized_objective(const ClusterJointDistribution& q,
                                  double data_mi,
                                  const AxisPenalty& row_penalty,
                                  const AxisPenalty& col_penalty) {
  double obj = data_mi - mutual_information(q);
  if (row_penalty.active())
    obj += row_penalty.weight *
           kl_divergence(q.row_marginal(), row_penalty.reference);
  if (col_penalty.active())
    obj += col_penalty.weight *
           kl_divergence(q.col_marginal(), col_penalty.reference);
  return obj;
}

inline double penalized_objective(const CoClusterState& state,
                                  double data_mi,
                                  const AxisPenalty& row_penalty,
                                  const AxisPenalty& col_penalty) {
  return penalized_objective(state.cluster_joint, data_mi, row_penalty,
                             col_penalty);
}

// One pass of exact single-move descent, run after the two half-sweeps of
// an iteration. The sweeps score moves against frozen conditionals, so
// they can park in states where an individual reassignment would still
// lower the true objective; this pass takes exactly those moves. Each
// accepted move strictly lowers the objective, so the pass cannot cycle,
// and a converged fit is single-move optimal. Returns whether anything
// moved.
inline bool polish_pass(const JointDistribution& d, CoClusterState& state,
                        double data_mi, const AxisPenalty& row_penalty,
                        const AxisPenalty& col_penalty) {
  bool moved = false;
  const auto try_axis = [&](bool rows) {
    const std::size_t n_items = rows ? d.n_rows() : d.n_cols();
    const std::size_t n_clusters = rows
                                       ? state.cluster_joint.n_row_clusters()
                                       : state.cluster_joint.n_col_clusters();
    auto& assign = rows ? state.row_assign : state.col_assign;
    const auto& other = rows ? state.col_assign : state.row_assign;
    std::vector<double> profile(rows ? state.cluster_joint.n_col_clusters()
                                     : state.cluster_joint.n_row_clusters());
    for (std::size_t i = 0; i < n_items; ++i) {
      const auto nonzeros = rows ? d.matrix().row(i) : d.matrix().col(i);
      if (nonzeros.empty()) continue;
      std::fill(profile.begin(), profile.end(), 0.0);
      for (std::uint32_t j : nonzeros) profile[other[j]] += d.cell_mass();
      const std::uint32_t cur = assign[i];
      double best_obj = state.objective;
      std::uint32_t best = cur;
      ClusterJointDistribution best_joint;
      for (std::uint32_t a = 0; a < n_clusters; ++a) {
        if (a == cur) continue;
        ClusterJointDistribution shifted = state.cluster_joint;
        for (std::uint32_t b = 0; b < profile.size(); ++b) {
          if (profile[b] == 0.0) continue;
          shifted.add_mass(rows ? cur : b, rows ? b : cur, -profile[b]);
          shifted.add_mass(rows ? a : b, rows ? b : a, profile[b]);
        }
        // Every true mass is a multiple of the cell mass; snap the shifted
        // cells back onto that lattice so cancellation residue cannot fake
        // an empty (or occupied) cluster cell.
        ClusterJointDistribution tent(shifted.n_row_clusters(),
                                      shifted.n_col_clusters());
        for (std::size_t ra = 0; ra < shifted.n_row_clusters(); ++ra)
          for (std::size_t cb = 0; cb < shifted.n_col_clusters(); ++cb) {
            const double snapped =
                std::round(shifted.mass(ra, cb) / d.cell_mass()) *
                d.cell_mass();
            if (snapped > 0.0) tent.add_mass(ra, cb, snapped);
          }
        const double obj =
            penalized_objective(tent, data_mi, row_penalty, col_penalty);
        if (obj < best_obj - kConvergenceTol) {
          best_obj = obj;
          best = a;
          best_joint = std::move(tent);
        }
      }
      if (best != cur) {
        assign[i] = best;
        state.cluster_joint = std::move(best_joint);
        state.objective = best_obj;
        moved = true;
      }
    }
  };
  try_axis(/*rows=*/true);
  try_axis(/*rows=*/false);
  return moved;
}

// Random labels with every cluster initially nonempty when there are at
// least as many items as clusters.
inline std::vector<std::uint32_t> random_assignment(std::size_t n_items,
                                                    std::size_t n_clusters,
                                                    Rng& rng) {
  std::vector<std::uint32_t> assign(n_items);
  for (;;) {
    std::vector<bool> seen(n_clusters, false);
    for (auto& a : assign) {
      a = static_cast<std::uint32_t>(rng.uniform_int(n_clusters));
      seen[a] = true;
    }
    if (n_items < n_clusters) return assign;
    bool all = true;
    for (bool s : seen) all = all && s;
    if (all) return assign;
  }
}

inline FitReport run_single_fit(const JointDistribution& d,
                                std::size_t n_row_clusters,
                                std::size_t n_col_clusters,
                                std::size_t max_iterations, Rng& rng,
                                const AxisPenalty& row_penalty,
                                const AxisPenalty& col_penalty) {
  const double data_mi = mutual_information(d);
  CoClusterState state{
      random_assignment(d.n_rows(), n_row_clusters, rng),
      random_assignment(d.n_cols(), n_col_clusters, rng),
      ClusterJointDistribution(n_row_clusters, n_col_clusters)};
  refresh(state, d);
  state.objective = penalized_objective(state, data_mi, row_penalty, col_penalty);

  FitReport report;
  report.objective_trace.push_back(state.objective);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    sweep_axis(d, state, /*rows=*/true, row_penalty, state.row_assign);
    refresh(state, d);
    sweep_axis(d, state, /*rows=*/false, col_penalty, state.col_assign);
    refresh(state, d);
    const double prev = state.objective;
    state.objective =
        penalized_objective(state, data_mi, row_penalty, col_penalty);
    polish_pass(d, state, data_mi, row_penalty, col_penalty);
    report.objective_trace.push_back(state.objective);
    ++report.iterations_run;
    const bool both_infinite =
        !std::isfinite(prev) && !std::isfinite(state.objective);
    if (both_infinite || prev - state.objective < kConvergenceTol) {
      report.converged = true;
      break;
    }
  }
  // The polish passes build the cluster joint by mass deltas; re-aggregate
  // so the reported state is free of accumulated rounding.
  refresh(state, d);
  state.objective = penalized_objective(state, data_mi, row_penalty, col_penalty);
  report.objective_trace.back() = state.objective;
  report.state = std::move(state);
  return report;
}

inline FitReport fit_with_restarts(const JointDistribution& d,
                                   std::size_t n_row_clusters,
                                   std::size_t n_col_clusters,
                                   std::size_t max_iterations,
                                   std::uint64_t seed, std::size_t restarts,
                                   const AxisPenalty& row_penalty,
                                   const AxisPenalty& col_penalty) {
  std::optional<FitReport> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(Rng::derive(seed, r));
    FitReport report = run_single_fit(d, n_row_clusters, n_col_clusters,
                                      max_iterations, rng, row_penalty,
                                      col_penalty);
    if (!best || report.state.objective < best->state.objective)
      best = std::move(report);
  }
  return std::move(*best);
}

}  // namespace detail

// One batch row half-sweep against the incoming cluster joint, followed by
// a refresh so the returned state is self-consistent.
inline CoClusterState update_rows(const CoClusterState& state,
                                  const JointDistribution& data_joint) {
  CoClusterState next = state;
  detail::sweep_axis(data_joint, state, /*rows=*/true, {}, next.row_assign);
  detail::refresh(next, data_joint);
  next.objective = itcc_objective(next, data_joint);
  return next;
}

inline CoClusterState update_cols(const CoClusterState& state,
                                  const JointDistribution& data_joint) {
  CoClusterState next = state;
  detail::sweep_axis(data_joint, state, /*rows=*/false, {}, next.col_assign);
  detail::refresh(next, data_joint);
  next.objective = itcc_objective(next, data_joint);
  return next;
}

// Alternating-minimization co-clustering of a binary matrix: the best of
// `restarts` seeded runs, each alternating row and column sweeps until the
// objective decrease falls below tolerance or the iteration budget runs out.
inline FitReport itcc_fit(const BinaryMatrix& m, std::size_t n_row_clusters,
                          std::size_t n_col_clusters,
                          std::size_t max_iterations, std::uint64_t seed,
                          std::size_t restarts) {
  if (n_row_clusters < 1 || n_row_clusters > m.n_rows() ||
      n_col_clusters < 1 || n_col_clusters > m.n_cols())
    throw InvalidClusterCount(
        "cluster counts must satisfy 1 <= N <= n_rows and 1 <= K <= n_cols");
  if (max_iterations < 1 || restarts < 1)
    throw InvalidParams("iteration budget and restart count must be >= 1");
  const JointDistribution d = joint_from_matrix(m);
  return detail::fit_with_restarts(d, n_row_clusters, n_col_clusters,
                                   max_iterations, seed, restarts, {}, {});
}

}  // namespace ecc
