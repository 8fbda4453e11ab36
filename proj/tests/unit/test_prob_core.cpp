#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ecc/distribution.hpp"
#include "ecc/rng.hpp"
#include "ecc/sparse_matrix.hpp"

using namespace ecc;

namespace {

BinaryMatrix random_matrix(std::size_t n, std::size_t k, double density,
                           Rng& rng) {
  std::vector<Coord> coords;
  for (std::uint32_t r = 0; r < n; ++r)
    for (std::uint32_t c = 0; c < k; ++c)
      if (rng.bernoulli(density)) coords.emplace_back(r, c);
  if (coords.empty()) coords.emplace_back(0, 0);
  return BinaryMatrix(n, k, coords);
}

// Independent MI oracle: densify and sum terms directly.
double mi_dense_oracle(const BinaryMatrix& m) {
  const double mass = 1.0 / static_cast<double>(m.nnz());
  std::vector<double> pr(m.n_rows(), 0.0), pc(m.n_cols(), 0.0);
  for (std::uint32_t r = 0; r < m.n_rows(); ++r)
    for (std::uint32_t c : m.row(r)) {
      pr[r] += mass;
      pc[c] += mass;
    }
  double mi = 0.0;
  for (std::uint32_t r = 0; r < m.n_rows(); ++r)
    for (std::uint32_t c = 0; c < m.n_cols(); ++c)
      if (m.contains(r, c)) mi += mass * std::log(mass / (pr[r] * pc[c]));
  return mi;
}

}  // namespace

TEST_CASE("joint distribution basics") {
  const std::vector<Coord> coords{{0, 0}, {0, 1}, {1, 2}, {1, 0}};
  const JointDistribution d = joint_from_matrix(BinaryMatrix(2, 3, coords));
  CHECK(d.cell_mass() == 0.25);
  CHECK(d.mass(0, 0) == 0.25);
  CHECK(d.mass(0, 2) == 0.0);
  CHECK(d.row_marginal()[0] == 0.5);
  CHECK(d.row_marginal()[1] == 0.5);
  CHECK(d.col_marginal()[0] == 0.5);
  CHECK(d.col_marginal()[1] == 0.25);
  CHECK(d.col_marginal()[2] == 0.25);
}

TEST_CASE("all-zero matrix is rejected") {
  CHECK_THROWS_AS(joint_from_matrix(BinaryMatrix(3, 3, {})), AllZeroMatrix);
}

TEST_CASE("mutual information matches a dense term-sum oracle") {
  Rng rng(41);
  for (int t = 0; t < 30; ++t) {
    const auto m = random_matrix(2 + rng.uniform_int(12),
                                 2 + rng.uniform_int(12), 0.35, rng);
    const JointDistribution d = joint_from_matrix(m);
    CHECK(mutual_information(d) ==
          Catch::Approx(mi_dense_oracle(m)).margin(1e-12));
  }
}

TEST_CASE("independent joint has zero mutual information") {
  std::vector<Coord> coords;
  for (std::uint32_t r = 0; r < 4; ++r)
    for (std::uint32_t c = 0; c < 5; ++c) coords.emplace_back(r, c);
  const JointDistribution d = joint_from_matrix(BinaryMatrix(4, 5, coords));
  CHECK(mutual_information(d) == 0.0);
}

TEST_CASE("cluster joint mutual information") {
  ClusterJointDistribution q(2, 2);
  q.add_mass(0, 0, 0.5);
  q.add_mass(1, 1, 0.5);
  // Perfectly dependent two-by-two table carries ln 2 nats.
  CHECK(mutual_information(q) == Catch::Approx(std::log(2.0)).margin(1e-15));
  ClusterJointDistribution indep(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) indep.add_mass(a, b, 0.25);
  CHECK(mutual_information(indep) == 0.0);
}

TEST_CASE("kl divergence hand oracle") {
  const std::vector<double> g{0.75, 0.25};
  const std::vector<double> h{0.5, 0.5};
  const double expected =
      0.75 * std::log(0.75 / 0.5) + 0.25 * std::log(0.25 / 0.5);
  CHECK(kl_divergence(g, h) == Catch::Approx(expected).margin(1e-15));
}

TEST_CASE("kl divergence zero conventions") {
  CHECK(kl_divergence(std::vector<double>{0.0, 1.0},
                      std::vector<double>{0.0, 1.0}) == 0.0);
  CHECK(kl_divergence(std::vector<double>{0.5, 0.5},
                      std::vector<double>{0.0, 1.0}) == kInfiniteDivergence);
  CHECK(kl_divergence(std::vector<double>{0.0, 1.0},
                      std::vector<double>{0.5, 0.5}) ==
        Catch::Approx(std::log(2.0)).margin(1e-15));
  CHECK_THROWS_AS(kl_divergence(std::vector<double>{1.0},
                                std::vector<double>{0.5, 0.5}),
                  LengthMismatch);
}

TEST_CASE("aggregation of a block-diagonal matrix") {
  std::vector<Coord> coords{{0, 0}, {0, 1}, {1, 0}, {1, 1},
                            {2, 2}, {2, 3}, {3, 2}, {3, 3}};
  const JointDistribution d = joint_from_matrix(BinaryMatrix(4, 4, coords));
  const std::vector<std::uint32_t> rows{0, 0, 1, 1};
  const std::vector<std::uint32_t> cols{0, 0, 1, 1};
  const auto q = aggregate_clusters(d, rows, cols, 2, 2);
  CHECK(q.mass(0, 0) == Catch::Approx(0.5).margin(1e-15));
  CHECK(q.mass(1, 1) == Catch::Approx(0.5).margin(1e-15));
  CHECK(q.mass(0, 1) == 0.0);
  CHECK(q.mass(1, 0) == 0.0);
  CHECK(q.row_marginal()[0] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("aggregation validates inputs") {
  const JointDistribution d =
      joint_from_matrix(BinaryMatrix(2, 2, {{0, 0}, {1, 1}}));
  const std::vector<std::uint32_t> ok{0, 1};
  const std::vector<std::uint32_t> bad_len{0};
  const std::vector<std::uint32_t> bad_id{0, 7};
  CHECK_THROWS_AS(aggregate_clusters(d, bad_len, ok, 2, 2), LengthMismatch);
  CHECK_THROWS_AS(aggregate_clusters(d, bad_id, ok, 2, 2),
                  OutOfRangeAssignment);
}

TEST_CASE("aggregation preserves total mass") {
  Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    const auto m = random_matrix(8, 9, 0.3, rng);
    const JointDistribution d = joint_from_matrix(m);
    std::vector<std::uint32_t> rows(8), cols(9);
    for (auto& a : rows) a = static_cast<std::uint32_t>(rng.uniform_int(3));
    for (auto& b : cols) b = static_cast<std::uint32_t>(rng.uniform_int(4));
    const auto q = aggregate_clusters(d, rows, cols, 3, 4);
    double total = 0.0;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 4; ++b) total += q.mass(a, b);
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("data processing inequality for cluster aggregation") {
  Rng rng(43);
  for (int t = 0; t < 30; ++t) {
    const auto m = random_matrix(10, 10, 0.3, rng);
    const JointDistribution d = joint_from_matrix(m);
    std::vector<std::uint32_t> rows(10), cols(10);
    for (auto& a : rows) a = static_cast<std::uint32_t>(rng.uniform_int(3));
    for (auto& b : cols) b = static_cast<std::uint32_t>(rng.uniform_int(3));
    const auto q = aggregate_clusters(d, rows, cols, 3, 3);
    CHECK(mutual_information(q) <= mutual_information(d) + 1e-12);
  }
}

TEST_CASE("reference conditional is a distribution over columns") {
  Rng rng(44);
  for (int t = 0; t < 20; ++t) {
    const auto m = random_matrix(8, 8, 0.4, rng);
    const JointDistribution d = joint_from_matrix(m);
    std::vector<std::uint32_t> rows(8), cols(8);
    for (auto& a : rows) a = static_cast<std::uint32_t>(rng.uniform_int(2));
    for (auto& b : cols) b = static_cast<std::uint32_t>(rng.uniform_int(2));
    // Force every cluster nonempty so the conditional is well defined.
    rows[0] = 0;
    rows[1] = 1;
    cols[0] = 0;
    cols[1] = 1;
    const auto q = aggregate_clusters(d, rows, cols, 2, 2);
    for (std::size_t i = 0; i < 8; ++i) {
      if (d.row_marginal()[i] <= 0.0) continue;
      const auto cond = reference_conditional(d, q, rows, cols, i);
      double sum = 0.0;
      for (double v : cond) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    }
  }
}

TEST_CASE("mutual-information loss decomposes as a KL over rows") {
  // The loss equals the row-marginal-weighted KL between each row's data
  // conditional and its cluster reference conditional.
  Rng rng(45);
  for (int t = 0; t < 25; ++t) {
    const auto m = random_matrix(9, 9, 0.45, rng);
    const JointDistribution d = joint_from_matrix(m);
    std::vector<std::uint32_t> rows(9), cols(9);
    for (auto& a : rows) a = static_cast<std::uint32_t>(rng.uniform_int(3));
    for (auto& b : cols) b = static_cast<std::uint32_t>(rng.uniform_int(3));
    for (std::uint32_t i = 0; i < 3; ++i) {
      rows[i] = i;
      cols[i] = i;
    }
    const auto q = aggregate_clusters(d, rows, cols, 3, 3);
    double loss = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
      const double pi = d.row_marginal()[i];
      if (pi <= 0.0) continue;
      const auto ref = reference_conditional(d, q, rows, cols, i);
      std::vector<double> cond(9, 0.0);
      for (std::uint32_t c : d.matrix().row(i)) cond[c] = d.cell_mass() / pi;
      loss += pi * kl_divergence(cond, ref);
    }
    const double direct = mutual_information(d) - mutual_information(q);
    CHECK(loss == Catch::Approx(direct).margin(1e-9));
  }
}

TEST_CASE("column reference conditional mirrors the row one") {
  const std::vector<Coord> coords{{0, 0}, {0, 1}, {1, 0}, {2, 2}, {2, 1}};
  const JointDistribution d = joint_from_matrix(BinaryMatrix(3, 3, coords));
  const std::vector<std::uint32_t> rows{0, 0, 1};
  const std::vector<std::uint32_t> cols{0, 1, 1};
  const auto q = aggregate_clusters(d, rows, cols, 2, 2);
  const auto cond = reference_conditional_col(d, q, rows, cols, 1);
  double sum = 0.0;
  for (double v : cond) sum += v;
  CHECK(sum == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("conditionals of empty rows and columns are rejected") {
  // Row 1 and column 1 carry no mass.
  const std::vector<Coord> coords{{0, 0}, {2, 2}};
  const JointDistribution d = joint_from_matrix(BinaryMatrix(3, 3, coords));
  const std::vector<std::uint32_t> assign{0, 0, 1};
  const auto q = aggregate_clusters(d, assign, assign, 2, 2);
  CHECK_THROWS_AS(reference_conditional(d, q, assign, assign, 1), EmptyRow);
  CHECK_THROWS_AS(reference_conditional_col(d, q, assign, assign, 1),
                  EmptyColumn);
}
