#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ecc/errors.hpp"
#include "ecc/metrics.hpp"
#include "ecc/rng.hpp"
#include "ecc/sparse_matrix.hpp"

namespace ecc {

// Coupled synthetic pair: an accessibility-like auxiliary matrix and an
// expression-like target matrix over the same feature count, with two
// ground-truth cell clusters. `percentage` sets the fraction of features in
// the shared (correlated) tail; the remaining features carry the
// block-differential rates. The alternate reading maps percentage to the
// differential fraction instead.
struct SimulationParams {
  std::size_t n_aux = 100;
  std::size_t n_target = 100;
  std::size_t n_features = 100;
  double percentage = 0.5;
  double sigma = 0.6;
  std::uint64_t seed = 0;
  // false: w = percentage (shared tail has w*k features).
  // true:  w = 1 - percentage.
  bool alternate_reading = false;
  bool keep_intermediate = false;

  void validate() const {
    if (n_aux < 1 || n_target < 1 || n_features < 1)
      throw InvalidParams("cell and feature counts must be >= 1");
    if (!(percentage > 0.0 && percentage < 1.0))
      throw InvalidParams("percentage must lie strictly inside (0, 1)");
    if (!(sigma > 0.0)) throw InvalidParams("sigma must be positive");
  }
};

// Latent layers of the generator, retained for inspection.
struct SimulationIntermediate {
  std::vector<std::vector<double>> rate_acc;  // 2 x k cluster rates
  std::vector<std::vector<double>> rate_exp;
  std::vector<std::uint8_t> u_acc, u_acc_thinned;  // n_aux x k, row-major
  std::vector<std::uint8_t> u_exp, v_exp_thinned;  // n_target x k
  std::vector<double> gauss_acc;  // n_aux x k
  std::vector<double> gauss_exp;  // n_target x k
  std::size_t n_differential = 0;  // leading block-structured feature count
};

struct SimulatedPair {
  BinaryMatrix aux;
  BinaryMatrix target;
  LabelVector aux_labels;
  LabelVector target_labels;
  std::optional<SimulationIntermediate> intermediate;
};

// Draw order is pinned (stream "ecc-sim-v1"): shared-tail auxiliary rates by
// ascending feature, expression rates by feature then cluster, cell labels
// (auxiliary then target), then per-entry layers row-major, interleaving the
// Bernoulli and Gaussian draws of each entry.
inline SimulatedPair generate(const SimulationParams& params) {
  params.validate();
  const std::size_t k = params.n_features;
  const double w =
      params.alternate_reading ? 1.0 - params.percentage : params.percentage;
  const auto h =
      static_cast<std::size_t>(std::floor(static_cast<double>(k) * (1.0 - w)));
  const std::size_t h1 = h / 2;

  Rng rng(Rng::derive(params.seed, 0x5ecc));

  std::vector<std::vector<double>> rate_acc(2, std::vector<double>(k));
  for (std::size_t j = 0; j < h1; ++j) {
    rate_acc[0][j] = w;
    rate_acc[1][j] = 1.0 - w;
  }
  for (std::size_t j = h1; j < h; ++j) {
    rate_acc[0][j] = 1.0 - w;
    rate_acc[1][j] = w;
  }
  for (std::size_t j = h; j < k; ++j) {
    const double shared = rng.beta(0.5, 2.0);
    rate_acc[0][j] = shared;
    rate_acc[1][j] = shared;
  }

  std::vector<std::vector<double>> rate_exp(2, std::vector<double>(k));
  for (std::size_t j = 0; j < h; ++j)
    for (std::size_t c = 0; c < 2; ++c)
      rate_exp[c][j] = rng.beta(rate_acc[c][j], 10.0);
  for (std::size_t j = h; j < k; ++j) {
    const double shared = rng.beta(rate_acc[0][j], 10.0);
    rate_exp[0][j] = shared;
    rate_exp[1][j] = shared;
  }

  LabelVector aux_labels(params.n_aux);
  for (auto& l : aux_labels) l = rng.bernoulli(0.5) ? 1 : 0;
  LabelVector target_labels(params.n_target);
  for (auto& l : target_labels) l = rng.bernoulli(0.5) ? 1 : 0;

  SimulationIntermediate inter;
  if (params.keep_intermediate) {
    inter.rate_acc = rate_acc;
    inter.rate_exp = rate_exp;
    inter.u_acc.resize(params.n_aux * k);
    inter.u_acc_thinned.resize(params.n_aux * k);
    inter.u_exp.resize(params.n_target * k);
    inter.v_exp_thinned.resize(params.n_target * k);
    inter.gauss_acc.resize(params.n_aux * k);
    inter.gauss_exp.resize(params.n_target * k);
    inter.n_differential = h;
  }

  std::vector<Coord> aux_coords;
  for (std::uint32_t i = 0; i < params.n_aux; ++i) {
    const std::size_t c = aux_labels[i];
    for (std::uint32_t j = 0; j < k; ++j) {
      const bool active = rng.bernoulli(rate_acc[c][j]);
      const bool thinned = active && rng.bernoulli(0.5);
      const double noise = rng.normal(thinned ? 2.0 : 0.0, 0.6);
      if (noise > 0.0) aux_coords.emplace_back(i, j);
      if (params.keep_intermediate) {
        inter.u_acc[i * k + j] = active;
        inter.u_acc_thinned[i * k + j] = thinned;
        inter.gauss_acc[i * k + j] = noise;
      }
    }
  }

  std::vector<Coord> target_coords;
  for (std::uint32_t l = 0; l < params.n_target; ++l) {
    const std::size_t c = target_labels[l];
    for (std::uint32_t j = 0; j < k; ++j) {
      const bool active = rng.bernoulli(rate_exp[c][j]);
      const bool kept = rng.bernoulli(active ? 0.8 : 0.1);
      const double noise = rng.normal(kept ? 2.0 : 0.0, params.sigma);
      if (noise > 0.0) target_coords.emplace_back(l, j);
      if (params.keep_intermediate) {
        inter.u_exp[l * k + j] = active;
        inter.v_exp_thinned[l * k + j] = kept;
        inter.gauss_exp[l * k + j] = noise;
      }
    }
  }

  return SimulatedPair{
      BinaryMatrix(params.n_aux, k, aux_coords),
      BinaryMatrix(params.n_target, k, target_coords),
      std::move(aux_labels), std::move(target_labels),
      params.keep_intermediate
          ? std::optional<SimulationIntermediate>(std::move(inter))
          : std::nullopt};
}

}  // namespace ecc
