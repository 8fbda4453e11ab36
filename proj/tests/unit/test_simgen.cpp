#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ecc/simgen.hpp"

using namespace ecc;

namespace {

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  SimulationParams params;
  params.seed = 9;
  const auto a = generate(params);
  const auto b = generate(params);
  CHECK(a.aux.coords() == b.aux.coords());
  CHECK(a.target.coords() == b.target.coords());
  CHECK(a.aux_labels == b.aux_labels);
  CHECK(a.target_labels == b.target_labels);
  params.seed = 10;
  const auto c = generate(params);
  CHECK(a.aux.coords() != c.aux.coords());
}

TEST_CASE("dimensions and label lengths") {
  SimulationParams params;
  params.n_aux = 30;
  params.n_target = 40;
  params.n_features = 25;
  params.seed = 1;
  const auto pair = generate(params);
  CHECK(pair.aux.n_rows() == 30);
  CHECK(pair.aux.n_cols() == 25);
  CHECK(pair.target.n_rows() == 40);
  CHECK(pair.target.n_cols() == 25);
  CHECK(pair.aux_labels.size() == 30);
  CHECK(pair.target_labels.size() == 40);
  for (auto l : pair.aux_labels) CHECK(l <= 1);
  for (auto l : pair.target_labels) CHECK(l <= 1);
}

TEST_CASE("rate structure follows the block design") {
  SimulationParams params;
  params.percentage = 0.3;
  params.seed = 4;
  params.keep_intermediate = true;
  const auto pair = generate(params);
  REQUIRE(pair.intermediate.has_value());
  const auto& inter = *pair.intermediate;
  const std::size_t k = params.n_features;
  const double w = params.percentage;
  const std::size_t h = static_cast<std::size_t>(std::floor(k * (1.0 - w)));
  CHECK(inter.n_differential == h);
  const std::size_t h1 = h / 2;
  for (std::size_t j = 0; j < h1; ++j) {
    CHECK(inter.rate_acc[0][j] == w);
    CHECK(inter.rate_acc[1][j] == 1.0 - w);
  }
  for (std::size_t j = h1; j < h; ++j) {
    CHECK(inter.rate_acc[0][j] == 1.0 - w);
    CHECK(inter.rate_acc[1][j] == w);
  }
  for (std::size_t j = h; j < k; ++j) {
    // Shared tail: identical across clusters, strictly inside (0, 1) almost
    // surely, and the derived expression rate is likewise shared.
    CHECK(inter.rate_acc[0][j] == inter.rate_acc[1][j]);
    CHECK(inter.rate_exp[0][j] == inter.rate_exp[1][j]);
  }
  for (std::size_t j = 0; j < k; ++j)
    for (int c = 0; c < 2; ++c) {
      CHECK(inter.rate_exp[c][j] >= 0.0);
      CHECK(inter.rate_exp[c][j] <= 1.0);
    }
}

TEST_CASE("alternate reading flips the split") {
  SimulationParams params;
  params.percentage = 0.3;
  params.seed = 4;
  params.keep_intermediate = true;
  params.alternate_reading = true;
  const auto pair = generate(params);
  const std::size_t h =
      static_cast<std::size_t>(std::floor(100 * (1.0 - 0.7)));
  CHECK(pair.intermediate->n_differential == h);
  CHECK(pair.intermediate->rate_acc[0][0] == 0.7);
}

TEST_CASE("latent layers are mutually consistent") {
  SimulationParams params;
  params.n_aux = 60;
  params.n_target = 60;
  params.seed = 13;
  params.keep_intermediate = true;
  const auto pair = generate(params);
  const auto& inter = *pair.intermediate;
  const std::size_t k = params.n_features;
  for (std::uint32_t i = 0; i < params.n_aux; ++i)
    for (std::uint32_t j = 0; j < k; ++j) {
      const std::size_t idx = i * k + j;
      // Thinning can only keep active entries, and the emitted 1-entries
      // are exactly the positive-noise cells.
      if (inter.u_acc_thinned[idx]) CHECK(inter.u_acc[idx]);
      CHECK(pair.aux.contains(i, j) == (inter.gauss_acc[idx] > 0.0));
    }
  for (std::uint32_t l = 0; l < params.n_target; ++l)
    for (std::uint32_t j = 0; j < k; ++j) {
      const std::size_t idx = l * k + j;
      CHECK(pair.target.contains(l, j) == (inter.gauss_exp[idx] > 0.0));
    }
}

TEST_CASE("empirical rates match the generative design") {
  SimulationParams params;
  params.n_aux = 3000;
  params.n_target = 1;  // target side not under test here
  params.percentage = 0.1;
  params.seed = 21;
  params.keep_intermediate = true;
  const auto pair = generate(params);
  const auto& inter = *pair.intermediate;
  const std::size_t k = params.n_features;
  const std::size_t h = 90, h1 = 45;

  // Per-block activation frequency of the latent Bernoulli layer.
  double low_sum = 0, low_n = 0, high_sum = 0, high_n = 0;
  for (std::uint32_t i = 0; i < params.n_aux; ++i) {
    const std::size_t c = pair.aux_labels[i];
    for (std::uint32_t j = 0; j < h; ++j) {
      const bool low_rate = (j < h1) == (c == 0);
      (low_rate ? low_sum : high_sum) += inter.u_acc[i * k + j];
      (low_rate ? low_n : high_n) += 1;
    }
  }
  CHECK(low_sum / low_n == Catch::Approx(0.1).margin(0.01));
  CHECK(high_sum / high_n == Catch::Approx(0.9).margin(0.01));

  // Closed-form 1-probability of an emitted auxiliary entry given its rate:
  // thin at 0.5, then a positive draw from N(2, 0.6) or N(0, 0.6).
  auto p_one = [&](double rate) {
    const double kept = 0.5 * rate;
    return kept * phi(2.0 / 0.6) + (1.0 - kept) * 0.5;
  };
  double lo = 0, lo_n = 0, hi = 0, hi_n = 0;
  for (std::uint32_t i = 0; i < params.n_aux; ++i) {
    const std::size_t c = pair.aux_labels[i];
    for (std::uint32_t j = 0; j < h; ++j) {
      const bool low_rate = (j < h1) == (c == 0);
      (low_rate ? lo : hi) += pair.aux.contains(i, j);
      (low_rate ? lo_n : hi_n) += 1;
    }
  }
  CHECK(lo / lo_n == Catch::Approx(p_one(0.1)).margin(0.01));
  CHECK(hi / hi_n == Catch::Approx(p_one(0.9)).margin(0.01));
}

TEST_CASE("noise layers have the designed shift") {
  SimulationParams params;
  params.n_aux = 500;
  params.n_target = 500;
  params.seed = 33;
  params.keep_intermediate = true;
  const auto pair = generate(params);
  const auto& inter = *pair.intermediate;
  double kept_sum = 0, kept_n = 0, drop_sum = 0, drop_n = 0;
  for (std::size_t idx = 0; idx < inter.gauss_acc.size(); ++idx) {
    if (inter.u_acc_thinned[idx]) {
      kept_sum += inter.gauss_acc[idx];
      ++kept_n;
    } else {
      drop_sum += inter.gauss_acc[idx];
      ++drop_n;
    }
  }
  CHECK(kept_sum / kept_n == Catch::Approx(2.0).margin(0.05));
  CHECK(drop_sum / drop_n == Catch::Approx(0.0).margin(0.05));
}

TEST_CASE("auxiliary and expression rates are positively coupled") {
  // Across differential features the expression rate is drawn around the
  // accessibility rate, so the two move together.
  SimulationParams params;
  params.percentage = 0.2;  // away from 0.5, where all rates coincide
  params.keep_intermediate = true;
  double sum_xy = 0, sum_x = 0, sum_y = 0, sum_xx = 0, sum_yy = 0, n = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    params.seed = seed;
    const auto pair = generate(params);
    const auto& inter = *pair.intermediate;
    for (std::size_t j = 0; j < inter.n_differential; ++j)
      for (int c = 0; c < 2; ++c) {
        const double x = inter.rate_acc[c][j];
        const double y = inter.rate_exp[c][j];
        sum_xy += x * y;
        sum_x += x;
        sum_y += y;
        sum_xx += x * x;
        sum_yy += y * y;
        n += 1;
      }
  }
  const double cov = sum_xy / n - sum_x / n * sum_y / n;
  const double var_x = sum_xx / n - sum_x / n * sum_x / n;
  const double var_y = sum_yy / n - sum_y / n * sum_y / n;
  CHECK(cov / std::sqrt(var_x * var_y) > 0.0);
}

TEST_CASE("intermediate layers are withheld by default") {
  SimulationParams params;
  params.seed = 2;
  CHECK_FALSE(generate(params).intermediate.has_value());
}

TEST_CASE("parameter validation") {
  SimulationParams params;
  params.percentage = 0.0;
  CHECK_THROWS_AS(params.validate(), InvalidParams);
  params.percentage = 1.0;
  CHECK_THROWS_AS(params.validate(), InvalidParams);
  params.percentage = 0.5;
  params.sigma = 0.0;
  CHECK_THROWS_AS(params.validate(), InvalidParams);
  params.sigma = 0.6;
  params.n_features = 0;
  CHECK_THROWS_AS(params.validate(), InvalidParams);
}
