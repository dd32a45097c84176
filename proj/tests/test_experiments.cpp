#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "fjlt/errors.hpp"
#include "fjlt/experiments.hpp"
#include "fjlt/plan.hpp"
#include "fjlt/rng.hpp"
#include "test_helpers.hpp"

using fjlt::FlattenMode;
using fjlt::TailCurve;
using fjlt::TailModel;
using fjlt::VectorKind;

TEST_CASE("vector kinds parse and print") {
  for (const auto kind : {VectorKind::Ones, VectorKind::FlatSqrt, VectorKind::E1,
                          VectorKind::RandomUnit}) {
    CHECK(fjlt::parse_vector_kind(fjlt::vector_kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(fjlt::parse_vector_kind("gauss"), fjlt::ArgumentError);
}

TEST_CASE("adversarial vectors") {
  const Eigen::VectorXd ones = fjlt::adversarial_vector(VectorKind::Ones, 4);
  CHECK(ones == Eigen::VectorXd::Constant(4, 0.5));

  const Eigen::VectorXd flat = fjlt::adversarial_vector(VectorKind::FlatSqrt, 16);
  CHECK(flat.head(4) == Eigen::VectorXd::Constant(4, 0.5));
  CHECK(flat.tail(12).norm() == 0.0);
  CHECK(std::abs(flat.norm() - 1.0) <= 1e-15);
  CHECK_THROWS_AS(fjlt::adversarial_vector(VectorKind::FlatSqrt, 8),
                  fjlt::ArgumentError);

  const Eigen::VectorXd e1 = fjlt::adversarial_vector(VectorKind::E1, 8);
  CHECK(e1[0] == 1.0);
  CHECK(e1.tail(7).norm() == 0.0);

  const Eigen::VectorXd r5 = fjlt::adversarial_vector(VectorKind::RandomUnit, 32, 5);
  CHECK(std::abs(r5.norm() - 1.0) <= 1e-12);
  CHECK(r5 == fjlt::adversarial_vector(VectorKind::RandomUnit, 32, 5));
  CHECK(r5 != fjlt::adversarial_vector(VectorKind::RandomUnit, 32, 6));

  CHECK_THROWS_AS(fjlt::adversarial_vector(VectorKind::Ones, 0),
                  fjlt::ArgumentError);
}

TEST_CASE("flatten distribution, d = 2 basis vector") {
  const Eigen::VectorXd e1 = fjlt::adversarial_vector(VectorKind::E1, 2);
  const auto dist = fjlt::flatten_tail(2, e1, FlattenMode::Exhaustive);
  REQUIRE(dist.histogram.size() == 1);
  CHECK(dist.histogram[0].first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist.histogram[0].second == 4);
  CHECK(dist.denominator == 4);
}

TEST_CASE("flatten distribution, d = 16 ones") {
  const Eigen::VectorXd x = fjlt::adversarial_vector(VectorKind::Ones, 16);
  const auto dist = fjlt::flatten_tail(16, x, FlattenMode::Exhaustive);
  CHECK(dist.denominator == 65536);
  std::uint64_t total = 0;
  for (const auto& [value, count] : dist.histogram) {
    total += count;
    CHECK(value >= 1.0 - 1e-12);
    CHECK(value <= 2.0 + 1e-12);
  }
  CHECK(total == 65536);
  // The fully concentrated outcome H D' x = +-e_j: exactly 2 diagonals per
  // Walsh-Hadamard row, and the statistic hits its ceiling d^(1/4).
  CHECK(dist.histogram.back().first == 2.0);
  CHECK(dist.histogram.back().second == 32);
  CHECK(fjlt::flatten_exceed_probability(dist, 2.0) ==
        32.0 / 65536.0);
  CHECK(fjlt::flatten_exceed_probability(dist, 0.5) == 1.0);
}

TEST_CASE("flatten argument validation") {
  const Eigen::VectorXd x = fjlt::adversarial_vector(VectorKind::Ones, 32);
  CHECK_THROWS_AS(fjlt::flatten_tail(32, x, FlattenMode::Exhaustive),
                  fjlt::ResourceError);
  CHECK_THROWS_AS(
      fjlt::flatten_tail(12, fjlt::adversarial_vector(VectorKind::Ones, 12),
                         FlattenMode::Exhaustive),
      fjlt::DimensionError);
  CHECK_THROWS_AS(fjlt::flatten_tail(16, x, FlattenMode::Exhaustive),
                  fjlt::DimensionError);
  CHECK_THROWS_AS(
      fjlt::flatten_tail(16, (2.0 * fjlt::adversarial_vector(VectorKind::Ones, 16)).eval(),
                         FlattenMode::Exhaustive),
      fjlt::ArgumentError);
  CHECK_THROWS_AS(
      fjlt::flatten_tail(16, fjlt::adversarial_vector(VectorKind::Ones, 16),
                         FlattenMode::MonteCarlo, 0, 1),
      fjlt::ArgumentError);
}

TEST_CASE("flatten Monte Carlo mode") {
  const Eigen::VectorXd x = fjlt::adversarial_vector(VectorKind::Ones, 16);
  const auto a = fjlt::flatten_tail(16, x, FlattenMode::MonteCarlo, 500, 3);
  const auto b = fjlt::flatten_tail(16, x, FlattenMode::MonteCarlo, 500, 3);
  CHECK(a.denominator == 500);
  CHECK(a.histogram == b.histogram);
  std::uint64_t total = 0;
  for (const auto& [value, count] : a.histogram) {
    total += count;
    CHECK(value >= 1.0 - 1e-9);
    CHECK(value <= 2.0 + 1e-9);
  }
  CHECK(total == 500);
  const auto c = fjlt::flatten_tail(16, x, FlattenMode::MonteCarlo, 500, 4);
  CHECK(a.histogram != c.histogram);
}

TEST_CASE("t grids") {
  CHECK(fjlt::parse_t_grid("0.5:2.0:0.5") == std::vector<double>{0.5, 1.0, 1.5});
  CHECK(fjlt::parse_t_grid("1:2:0.25") ==
        std::vector<double>{1.0, 1.25, 1.5, 1.75});
  CHECK_THROWS_AS(fjlt::parse_t_grid("1:2"), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::parse_t_grid("a:2:1"), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::parse_t_grid("0:2:1"), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::parse_t_grid("2:1:0.5"), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::parse_t_grid("1:2:0"), fjlt::ArgumentError);

  CHECK_NOTHROW(fjlt::validate_t_grid({0.5, 1.5}));
  CHECK_THROWS_AS(fjlt::validate_t_grid({}), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::validate_t_grid({0.0, 1.0}), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::validate_t_grid({1.0, 1.0}), fjlt::ArgumentError);
}

TEST_CASE("tail estimates are reproducible and thread-count invariant") {
  const std::vector<double> grid = {0.05, 0.1, 0.2, 0.4};
  const auto a = fjlt::tail_estimate(64, 4, VectorKind::Ones, grid, 400, 5);
  const auto b = fjlt::tail_estimate(64, 4, VectorKind::Ones, grid, 400, 5);
  const auto c = fjlt::tail_estimate(64, 4, VectorKind::Ones, grid, 400, 5, 3);
  CHECK(a.exceed_counts == b.exceed_counts);
  CHECK(a.exceed_counts == c.exceed_counts);
  CHECK(a.trials == 400);
  CHECK(a.config.x_spec == "ones");
  for (std::size_t i = 1; i < a.exceed_counts.size(); ++i) {
    CHECK(a.exceed_counts[i] <= a.exceed_counts[i - 1]);
  }
  // Deviations are bounded by the operator norm sqrt(d/k) = 4.
  const auto far = fjlt::tail_estimate(64, 4, VectorKind::Ones, {50.0}, 50, 5);
  CHECK(far.exceed_counts[0] == 0);
}

TEST_CASE("tail trials name the same plans as plan()") {
  const std::uint64_t seed = 5;
  const Eigen::VectorXd x = fjlt::adversarial_vector(VectorKind::Ones, 64, seed);
  const std::uint64_t trial0 =
      fjlt::substream_seed(fjlt::stream_seed(seed, "tail-trial"), 0);
  const double dev =
      std::abs(fjlt::apply(fjlt::plan(64, 4, trial0), x).norm() - 1.0);
  REQUIRE(dev > 0.0);
  const std::vector<double> grid = {dev * (1.0 - 1e-9), dev * (1.0 + 1e-9)};
  const auto curve = fjlt::tail_estimate(64, 4, VectorKind::Ones, grid, 1, seed);
  CHECK(curve.exceed_counts == std::vector<std::uint64_t>{1, 0});
}

TEST_CASE("tail estimate argument validation") {
  const std::vector<double> grid = {0.5};
  CHECK_THROWS_AS(fjlt::tail_estimate(64, 4, VectorKind::Ones, {}, 10, 0),
                  fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::tail_estimate(64, 4, VectorKind::Ones, grid, 0, 0),
                  fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::tail_estimate(64, 4, VectorKind::Ones, grid, 10, 0, 0),
                  fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::tail_estimate(32, 64, VectorKind::Ones, grid, 10, 0),
                  fjlt::InfeasibleError);
}

TEST_CASE("exact coordinate tails") {
  Eigen::VectorXd e1(1);
  e1 << 1.0;
  const auto curve = fjlt::coordinate_tail_exact(e1, {0.5, 1.0, 1.5});
  CHECK(curve.trials == 2);
  CHECK(curve.exceed_counts == std::vector<std::uint64_t>{2, 0, 0});
  CHECK(curve.config.x_spec == "coordinate");
  CHECK(curve.config.k == 0);

  Eigen::VectorXd diag(2);
  diag << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto half = fjlt::coordinate_tail_exact(diag, {1.0});
  CHECK(half.trials == 4);
  CHECK(half.exceed_counts == std::vector<std::uint64_t>{2});

  CHECK_THROWS_AS(fjlt::coordinate_tail_exact(Eigen::VectorXd::Ones(25), {0.5}),
                  fjlt::ResourceError);
  CHECK_THROWS_AS(fjlt::coordinate_tail_exact(Eigen::VectorXd(), {0.5}),
                  fjlt::ArgumentError);
}

TEST_CASE("coordinate tails obey the Hoeffding bound") {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.15 * i);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::VectorXd x = fjlt_test::seeded_unit(12, 900 + seed);
    const auto curve = fjlt::coordinate_tail_exact(x, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double bound = 2.0 * std::exp(-grid[i] * grid[i] / 2.0);
      CHECK(curve.p_hat(i) <= bound);
    }
  }
}

TEST_CASE("fit recovers synthetic mixed-power constants") {
  TailCurve curve;
  curve.trials = 1000000000000000ULL;  // 1e15
  curve.config = {4096, 8, "ones", 0};
  const double k23 = std::pow(8.0, 2.0 / 3.0);
  for (int i = 1; i <= 9; ++i) {
    const double t = 0.2 * i;
    curve.t_grid.push_back(t);
    const double p = std::exp(-2.0 * k23 * std::pow(t, 4.0 / 3.0));
    curve.exceed_counts.push_back(static_cast<std::uint64_t>(
        std::llround(p * static_cast<double>(curve.trials))));
  }
  const auto fit = fjlt::fit_tail_constants(curve, TailModel::MixedPower);
  CHECK(fit.model == TailModel::MixedPower);
  CHECK(fit.points_used == 9);
  CHECK(fit.exponent_coeff == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.residual_rms <= 1e-6);
}

TEST_CASE("fit recovers synthetic sub-gaussian constants") {
  TailCurve curve;
  curve.trials = 1000000000000ULL;  // 1e12
  curve.config = {128, 4, "e1", 0};
  for (int i = 1; i <= 5; ++i) {
    const double t = 0.1 * i;
    curve.t_grid.push_back(t);
    const double p = 0.3 * std::exp(-1.5 * 4.0 * t * t);
    curve.exceed_counts.push_back(static_cast<std::uint64_t>(
        std::llround(p * static_cast<double>(curve.trials))));
  }
  const auto fit = fjlt::fit_tail_constants(curve, TailModel::SubGaussian);
  CHECK(fit.exponent_coeff == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("fit rejects unusable curves") {
  TailCurve curve;
  curve.trials = 1000;
  curve.config = {64, 4, "ones", 0};
  curve.t_grid = {0.1, 0.2, 0.3, 0.4};
  curve.exceed_counts = {500, 500, 500, 500};  // p = 0.5 everywhere: too blunt
  CHECK_THROWS_AS(fjlt::fit_tail_constants(curve, TailModel::SubGaussian),
                  fjlt::FitError);
  curve.exceed_counts = {400, 300, 0, 0};  // only two usable points
  CHECK_THROWS_AS(fjlt::fit_tail_constants(curve, TailModel::SubGaussian),
                  fjlt::FitError);

  curve.exceed_counts = {400, 300, 200, 100};
  CHECK_NOTHROW(fjlt::fit_tail_constants(curve, TailModel::SubGaussian));
  curve.config.k = 0;  // exact coordinate curves carry no embedding dimension
  CHECK_THROWS_AS(fjlt::fit_tail_constants(curve, TailModel::SubGaussian),
                  fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::fit_tail_constants(curve, TailModel::MixedPower),
                  fjlt::ArgumentError);
  CHECK_NOTHROW(fjlt::fit_tail_constants(curve, TailModel::Quartic));

  curve.exceed_counts.pop_back();
  CHECK_THROWS_AS(fjlt::fit_tail_constants(curve, TailModel::Quartic),
                  fjlt::ArgumentError);
}

TEST_CASE("bench produces one positive median per dimension") {
  const auto rows = fjlt::bench_apply({32, 64}, 4, 5, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].d == 32);
  CHECK(rows[1].d == 64);
  for (const auto& row : rows) {
    CHECK(row.k == 4);
    CHECK(row.median_ns > 0.0);
  }
  CHECK_THROWS_AS(fjlt::bench_apply({32}, 4, 0, 1), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::bench_apply({}, 4, 5, 1), fjlt::ArgumentError);
}

TEST_CASE("norm statistics agree with per-plan computation") {
  const std::uint64_t seed = 7;
  const auto stats = fjlt::embedding_norm_stats(128, 8, VectorKind::E1, 16, seed);
  CHECK(stats.trials == 16);
  const Eigen::VectorXd x = fjlt::adversarial_vector(VectorKind::E1, 128, seed);
  const std::uint64_t stream = fjlt::stream_seed(seed, "tail-trial");
  double sum = 0.0;
  for (std::uint64_t t = 0; t < 16; ++t) {
    sum += fjlt::apply(fjlt::plan(128, 8, fjlt::substream_seed(stream, t)), x)
               .squaredNorm();
  }
  CHECK(stats.mean_sq == doctest::Approx(sum / 16.0).epsilon(1e-12));
  CHECK_THROWS_AS(fjlt::embedding_norm_stats(128, 8, VectorKind::E1, 1, 0),
                  fjlt::ArgumentError);
}

TEST_CASE("squared norms concentrate around 1") {
  const auto stats = fjlt::embedding_norm_stats(128, 8, VectorKind::E1, 3000, 2);
  CHECK(stats.std_error > 0.0);
  CHECK(std::abs(stats.mean_sq - 1.0) <= 4.0 * stats.std_error);
}
