#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecc/coclustering.hpp"
#include "ecc/distribution.hpp"
#include "ecc/errors.hpp"

namespace ecc {

struct TransferConfig {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t n_col_clusters = 2;      // K, shared between both stages
  std::size_t n_aux_row_clusters = 2;  // N_A
  std::size_t n_target_row_clusters = 2;  // N_T
  std::size_t aux_iterations = 10;     // I_A
  std::size_t target_iterations = 10;  // I_T
  std::uint64_t seed = 0;
  std::size_t restarts = 8;

  // The row-marginal penalty transfers only between equal cluster counts.
  bool row_penalty_active() const {
    return n_aux_row_clusters == n_target_row_clusters && alpha > 0.0;
  }

  void validate() const {
    if (alpha < 0.0 || beta < 0.0)
      throw InvalidParams("alpha and beta must be non-negative");
    if (n_col_clusters < 1 || n_aux_row_clusters < 1 ||
        n_target_row_clusters < 1)
      throw InvalidClusterCount("cluster counts must be >= 1");
    if (aux_iterations < 1 || target_iterations < 1 || restarts < 1)
      throw InvalidParams("iteration budgets and restarts must be >= 1");
  }
};

// The transferred quantities: cluster marginals of the fitted auxiliary
// co-clustering.
struct AuxiliaryKnowledge {
  std::vector<double> row_cluster_marginal;  // length N_A
  std::vector<double> col_cluster_marginal;  // length K
};

inline AuxiliaryKnowledge extract_knowledge(const FitReport& aux_fit) {
  const auto& q = aux_fit.state.cluster_joint;
  return AuxiliaryKnowledge{
      {q.row_marginal().begin(), q.row_marginal().end()},
      {q.col_marginal().begin(), q.col_marginal().end()}};
}

namespace detail {

inline void check_knowledge(const AuxiliaryKnowledge& knowledge,
                            const TransferConfig& config) {
  if (knowledge.col_cluster_marginal.size() != config.n_col_clusters)
    throw DimensionMismatch(
        "auxiliary column-cluster marginal has length " +
        std::to_string(knowledge.col_cluster_marginal.size()) +
        " but K = " + std::to_string(config.n_col_clusters));
  if (config.row_penalty_active() &&
      knowledge.row_cluster_marginal.size() != config.n_aux_row_clusters)
    throw DimensionMismatch("auxiliary row-cluster marginal has length " +
                            std::to_string(
                                knowledge.row_cluster_marginal.size()) +
                            " but N_A = " +
                            std::to_string(config.n_aux_row_clusters));
}

inline AxisPenalty row_penalty(const AuxiliaryKnowledge& knowledge,
                               const TransferConfig& config) {
  if (!config.row_penalty_active()) return {};
  return {config.alpha, knowledge.row_cluster_marginal};
}

inline AxisPenalty col_penalty(const AuxiliaryKnowledge& knowledge,
                               const TransferConfig& config) {
  if (config.beta <= 0.0) return {};
  return {config.beta, knowledge.col_cluster_marginal};
}

}  // namespace detail

// Elastic objective: mutual-information loss plus the weighted
// marginal-matching divergences against the auxiliary clustering.
inline double transfer_objective(const CoClusterState& state,
                                 const JointDistribution& target_joint,
                                 const AuxiliaryKnowledge& knowledge,
                                 const TransferConfig& config) {
  config.validate();
  detail::check_knowledge(knowledge, config);
  return detail::penalized_objective(state, mutual_information(target_joint),
                                     detail::row_penalty(knowledge, config),
                                     detail::col_penalty(knowledge, config));
}

inline CoClusterState update_rows_target(const CoClusterState& state,
                                         const JointDistribution& target_joint,
                                         const AuxiliaryKnowledge& knowledge,
                                         const TransferConfig& config) {
  config.validate();
  detail::check_knowledge(knowledge, config);
  CoClusterState next = state;
  detail::sweep_axis(target_joint, state, /*rows=*/true,
                     detail::row_penalty(knowledge, config), next.row_assign);
  detail::refresh(next, target_joint);
  next.objective = transfer_objective(next, target_joint, knowledge, config);
  return next;
}

inline CoClusterState update_cols_target(const CoClusterState& state,
                                         const JointDistribution& target_joint,
                                         const AuxiliaryKnowledge& knowledge,
                                         const TransferConfig& config) {
  config.validate();
  detail::check_knowledge(knowledge, config);
  CoClusterState next = state;
  detail::sweep_axis(target_joint, state, /*rows=*/false,
                     detail::col_penalty(knowledge, config), next.col_assign);
  detail::refresh(next, target_joint);
  next.objective = transfer_objective(next, target_joint, knowledge, config);
  return next;
}

// Penalized co-clustering of the target matrix. With alpha = beta = 0 this
// is bit-identical to itcc_fit on the target under the same seed.
inline FitReport elastic_fit(const BinaryMatrix& target,
                             const AuxiliaryKnowledge& knowledge,
                             const TransferConfig& config) {
  config.validate();
  detail::check_knowledge(knowledge, config);
  if (config.n_target_row_clusters > target.n_rows() ||
      config.n_col_clusters > target.n_cols())
    throw InvalidClusterCount(
        "cluster counts exceed target matrix dimensions");
  const JointDistribution d = joint_from_matrix(target);
  return detail::fit_with_restarts(
      d, config.n_target_row_clusters, config.n_col_clusters,
      config.target_iterations, config.seed, config.restarts,
      detail::row_penalty(knowledge, config),
      detail::col_penalty(knowledge, config));
}

// Both stages end to end: fit the auxiliary matrix, extract its cluster
// marginals, then fit the target under the elastic penalties.
struct TwoStageResult {
  FitReport aux;
  FitReport target;
  AuxiliaryKnowledge knowledge;
};

inline TwoStageResult two_stage_fit(const BinaryMatrix& aux,
                                    const BinaryMatrix& target,
                                    const TransferConfig& config) {
  config.validate();
  FitReport aux_fit =
      itcc_fit(aux, config.n_aux_row_clusters, config.n_col_clusters,
               config.aux_iterations, config.seed, config.restarts);
  AuxiliaryKnowledge knowledge = extract_knowledge(aux_fit);
  FitReport target_fit = elastic_fit(target, knowledge, config);
  return {std::move(aux_fit), std::move(target_fit), std::move(knowledge)};
}

}  // namespace ecc
