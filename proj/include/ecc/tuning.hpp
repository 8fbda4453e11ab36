#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ecc/coclustering.hpp"
#include "ecc/errors.hpp"
#include "ecc/metrics.hpp"
#include "ecc/transfer.hpp"

namespace ecc {

enum class TuneCriterion {
  kLabeledPurity,
  kLabeledNmi,
  kLabeledAri,
  kLabeledRi,
  kUnsupervisedTargetLoss,
};

inline bool criterion_needs_labels(TuneCriterion c) {
  return c != TuneCriterion::kUnsupervisedTargetLoss;
}

inline std::string criterion_name(TuneCriterion c) {
  switch (c) {
    case TuneCriterion::kLabeledPurity: return "labeled:purity";
    case TuneCriterion::kLabeledNmi: return "labeled:nmi";
    case TuneCriterion::kLabeledAri: return "labeled:ari";
    case TuneCriterion::kLabeledRi: return "labeled:ri";
    case TuneCriterion::kUnsupervisedTargetLoss: return "unsupervised:target_loss";
  }
  return "?";
}

inline std::optional<TuneCriterion> parse_criterion(const std::string& s) {
  for (auto c : {TuneCriterion::kLabeledPurity, TuneCriterion::kLabeledNmi,
                 TuneCriterion::kLabeledAri, TuneCriterion::kLabeledRi,
                 TuneCriterion::kUnsupervisedTargetLoss})
    if (criterion_name(c) == s) return c;
  return std::nullopt;
}

struct GridSpec {
  std::vector<double> alpha_values{0.0, 0.01, 0.05, 0.1, 0.5, 0.9, 1.0};
  std::vector<double> beta_values{0.0, 0.01, 0.05, 0.1, 0.5, 0.9, 1.0};
  std::vector<std::size_t> k_values{2, 3, 4, 5, 6, 7, 8, 9};
  TuneCriterion criterion = TuneCriterion::kUnsupervisedTargetLoss;

  void validate() const {
    if (alpha_values.empty() || beta_values.empty() || k_values.empty())
      throw InvalidParams("grid value lists must be nonempty");
    for (double a : alpha_values)
      if (a < 0.0) throw InvalidParams("alpha grid values must be >= 0");
    for (double b : beta_values)
      if (b < 0.0) throw InvalidParams("beta grid values must be >= 0");
    for (std::size_t k : k_values)
      if (k < 1) throw InvalidParams("K grid values must be >= 1");
  }
};

struct GridRecord {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t k = 0;
  double criterion_value = 0.0;
  double final_objective = 0.0;   // full elastic objective at the fit
  double target_loss = 0.0;       // penalty-free compression loss
  std::size_t iterations_run = 0;
  bool converged = false;
  MetricsReport metrics;          // meaningful only when labels were given
};

struct GridResult {
  std::vector<GridRecord> records;  // full cross product, deterministic order
  std::size_t best_index = 0;
  TuneCriterion criterion = TuneCriterion::kUnsupervisedTargetLoss;
  std::size_t aux_fits_computed = 0;  // exactly one per distinct K

  const GridRecord& best() const { return records[best_index]; }
};

inline std::size_t default_worker_count() {
  if (const char* env = std::getenv("ECC_WORKERS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Exhaustive sweep over (alpha, beta, K). The auxiliary fit is computed once
// per K and shared across all (alpha, beta) pairs; combinations run on a
// bounded worker pool and land in cross-product order, so the result is
// independent of scheduling. Ties on the criterion resolve to the smallest
// (alpha, beta, K).
inline GridResult grid_search(const BinaryMatrix& aux,
                              const BinaryMatrix& target,
                              std::size_t n_aux_row_clusters,
                              std::size_t n_target_row_clusters,
                              const GridSpec& grid, std::uint64_t seed,
                              std::size_t restarts,
                              const LabelVector* labels = nullptr,
                              std::size_t max_iterations = 10,
                              std::size_t workers = 0) {
  grid.validate();
  if (criterion_needs_labels(grid.criterion) && labels == nullptr)
    throw MissingLabels("criterion " + criterion_name(grid.criterion) +
                        " requires reference labels");
  if (labels != nullptr && labels->size() != target.n_rows())
    throw LengthMismatch("label vector length " +
                         std::to_string(labels->size()) +
                         " does not match target rows " +
                         std::to_string(target.n_rows()));

  GridResult result;
  result.criterion = grid.criterion;

  std::map<std::size_t, AuxiliaryKnowledge> knowledge_by_k;
  for (std::size_t k : grid.k_values) {
    if (knowledge_by_k.count(k)) continue;
    FitReport aux_fit = itcc_fit(aux, n_aux_row_clusters, k, max_iterations,
                                 Rng::derive(seed, 0xA0 + k), restarts);
    knowledge_by_k.emplace(k, extract_knowledge(aux_fit));
    ++result.aux_fits_computed;
  }

  const std::size_t na = grid.alpha_values.size();
  const std::size_t nb = grid.beta_values.size();
  const std::size_t nk = grid.k_values.size();
  const std::size_t total = na * nb * nk;
  result.records.resize(total);

  const JointDistribution target_joint = joint_from_matrix(target);
  const double target_mi = mutual_information(target_joint);

  auto run_one = [&](std::size_t idx) {
    const std::size_t ai = idx / (nb * nk);
    const std::size_t bi = (idx / nk) % nb;
    const std::size_t ki = idx % nk;
    TransferConfig config;
    config.alpha = grid.alpha_values[ai];
    config.beta = grid.beta_values[bi];
    config.n_col_clusters = grid.k_values[ki];
    config.n_aux_row_clusters = n_aux_row_clusters;
    config.n_target_row_clusters = n_target_row_clusters;
    config.target_iterations = max_iterations;
    config.seed = Rng::derive(seed, 0xB00 + idx);
    config.restarts = restarts;
    const AuxiliaryKnowledge& knowledge = knowledge_by_k.at(config.n_col_clusters);
    FitReport fit = elastic_fit(target_joint.matrix(), knowledge, config);

    GridRecord rec;
    rec.alpha = config.alpha;
    rec.beta = config.beta;
    rec.k = config.n_col_clusters;
    rec.final_objective = fit.state.objective;
    rec.target_loss = target_mi - mutual_information(fit.state.cluster_joint);
    rec.iterations_run = fit.iterations_run;
    rec.converged = fit.converged;
    if (labels != nullptr)
      rec.metrics = evaluate_clustering(fit.state.row_assign, *labels);
    switch (grid.criterion) {
      case TuneCriterion::kLabeledPurity: rec.criterion_value = rec.metrics.purity; break;
      case TuneCriterion::kLabeledNmi: rec.criterion_value = rec.metrics.nmi; break;
      case TuneCriterion::kLabeledAri: rec.criterion_value = rec.metrics.ari; break;
      case TuneCriterion::kLabeledRi: rec.criterion_value = rec.metrics.ri; break;
      case TuneCriterion::kUnsupervisedTargetLoss:
        rec.criterion_value = rec.target_loss;
        break;
    }
    result.records[idx] = rec;
  };

  const std::size_t n_workers =
      std::min(total, workers ? workers : default_worker_count());
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < total;
             i = next.fetch_add(1))
          run_one(i);
      });
    for (auto& t : pool) t.join();
  }

  const bool minimize =
      grid.criterion == TuneCriterion::kUnsupervisedTargetLoss;
  std::size_t best = 0;
  for (std::size_t i = 1; i < total; ++i) {
    const GridRecord& cur = result.records[i];
    const GridRecord& ref = result.records[best];
    if (minimize ? cur.criterion_value < ref.criterion_value
                 : cur.criterion_value > ref.criterion_value) {
      best = i;
    } else if (cur.criterion_value == ref.criterion_value &&
               std::tie(cur.alpha, cur.beta, cur.k) <
                   std::tie(ref.alpha, ref.beta, ref.k)) {
      best = i;
    }
  }
  result.best_index = best;
  return result;
}

}  // namespace ecc
