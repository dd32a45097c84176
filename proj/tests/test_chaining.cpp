#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fjlt/chaining.hpp"
#include "fjlt/errors.hpp"
#include "fjlt/types.hpp"

using fjlt::chain_dimension;
using fjlt::chain_series;
using fjlt::ChainingRequest;
using fjlt::covering_log;
using fjlt::CoveringModel;

TEST_CASE("covering model factories validate their parameters") {
  CHECK_THROWS_AS(CoveringModel::finite(0), fjlt::ArgumentError);
  CHECK_THROWS_AS(CoveringModel::subspace(0), fjlt::ArgumentError);
  CHECK_THROWS_AS(CoveringModel::sparse(0, 1), fjlt::ArgumentError);
  CHECK_THROWS_AS(CoveringModel::sparse(4, 0), fjlt::ArgumentError);
  CHECK_THROWS_AS(CoveringModel::sparse(4, 5), fjlt::ArgumentError);
  CHECK_THROWS_AS(CoveringModel::explicit_table({}), fjlt::ArgumentError);
  CHECK_THROWS_AS(CoveringModel::explicit_table({-0.1}), fjlt::ArgumentError);
  CHECK_THROWS_AS(CoveringModel::explicit_table({1.0, 0.5}),
                  fjlt::ArgumentError);
  CHECK_NOTHROW(CoveringModel::explicit_table({0.0, 0.0, 1.0}));
}

TEST_CASE("log covering numbers") {
  CHECK(covering_log(CoveringModel::finite(1), 0) == 0.0);
  CHECK(covering_log(CoveringModel::finite(10), 0) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-15));
  CHECK(covering_log(CoveringModel::finite(10), 7) ==
        covering_log(CoveringModel::finite(10), 0));

  // Unit ball of a 2-dimensional subspace at scale 1/2: 2 ln(1 + 2) = 2 ln 3.
  CHECK(covering_log(CoveringModel::subspace(2), 0) ==
        doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-14));
  CHECK(covering_log(CoveringModel::subspace(2), 0) ==
        doctest::Approx(2.197225).epsilon(1e-6));

  // Sparse: ln C(4, 1) + 1 * ln 3 at scale 1/2.
  CHECK(covering_log(CoveringModel::sparse(4, 1), 0) ==
        doctest::Approx(std::log(4.0) + std::log(3.0)).epsilon(1e-14));
  CHECK(covering_log(CoveringModel::sparse(1024, 10), 0) ==
        doctest::Approx(54.16622363967826407 + 10.0 * std::log(3.0))
            .epsilon(1e-13));

  const CoveringModel table = CoveringModel::explicit_table({0.5, 1.5});
  CHECK(covering_log(table, 0) == 0.5);
  CHECK(covering_log(table, 1) == 1.5);
  CHECK_THROWS_AS(covering_log(table, 2), fjlt::RangeError);
  CHECK_THROWS_AS(covering_log(table, -1), fjlt::ArgumentError);
}

TEST_CASE("log covering numbers grow with resolution") {
  for (const CoveringModel& model :
       {CoveringModel::subspace(3), CoveringModel::sparse(64, 4)}) {
    double prev = covering_log(model, 0);
    for (int j = 1; j <= 30; ++j) {
      const double cur = covering_log(model, j);
      CHECK(cur > prev);
      CHECK(cur <= model.cap_offset() + model.cap_slope() * j + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("chain series stopping rules") {
  // A single point covers itself at every scale: the series is identically 0.
  const auto zero = chain_series(CoveringModel::finite(1), 1e-9);
  CHECK(zero.value == 0.0);
  CHECK(zero.terms == 1);

  // Constant covering numbers have the closed form 2 (ln n)^(3/4).
  const auto s = chain_series(CoveringModel::finite(1000), 1e-12);
  const double closed = 2.0 * std::pow(std::log(1000.0), 0.75);
  CHECK(std::abs(s.value - closed) <= 2e-12 * closed);
  CHECK(s.terms > 30);

  // With max_terms the sum is a plain partial sum, certificate or not.
  const auto partial = chain_series(CoveringModel::finite(10), 1e-9, 5);
  CHECK(partial.terms == 5);
  CHECK(partial.value ==
        doctest::Approx((2.0 - 0.0625) * std::pow(std::log(10.0), 0.75))
            .epsilon(1e-14));

  CHECK_THROWS_AS(chain_series(CoveringModel::explicit_table({1.0}), 1e-9),
                  fjlt::ArgumentError);
  CHECK_NOTHROW(chain_series(CoveringModel::explicit_table({1.0}), 1e-9, 1));
  CHECK_THROWS_AS(chain_series(CoveringModel::finite(10), 0.0),
                  fjlt::ArgumentError);
  CHECK_THROWS_AS(chain_series(CoveringModel::finite(10), 1e-9, 0),
                  fjlt::ArgumentError);
}

TEST_CASE("chain series converges to the infinite sum") {
  // Reference values computed with 60-digit arithmetic by summing until the
  // terms fell below 10^-30.
  const double subspace8 = 13.678129936765401231;
  const auto s = chain_series(CoveringModel::subspace(8), 1e-12);
  CHECK(std::abs(s.value - subspace8) <= 1.5e-12 * subspace8);
  CHECK(s.value <= subspace8);  // truncation only ever undershoots
}

TEST_CASE("embedding dimension on frozen instances") {
  // Same 60-digit reference values as above for the series parts.
  ChainingRequest req;

  req.model = CoveringModel::finite(1);
  req.eps = 0.5;
  req.p = 0.5;
  auto r = chain_dimension(req);
  CHECK(r.k == 10);
  CHECK(r.series == 0.0);
  CHECK(r.series_terms == 0);
  CHECK(r.pre_ceil == doctest::Approx(9.2333261021782356).epsilon(1e-14));

  req.model = CoveringModel::finite(1000);
  req.eps = 0.25;
  req.p = 0.01;
  r = chain_dimension(req);
  CHECK(r.k == 34838);
  CHECK(r.series_terms == 0);
  CHECK(std::abs(r.series - 8.5218267999441261171) <=
        1e-9 * 8.5218267999441261171);

  req.model = CoveringModel::subspace(8);
  r = chain_dimension(req);
  CHECK(r.k == 72441);
  CHECK(r.series_terms > 0);
  CHECK(std::abs(r.series - 13.678129936765401231) <=
        1e-9 * 13.678129936765401231);

  req.model = CoveringModel::sparse(1024, 10);
  req.eps = 0.1;
  req.p = 0.001;
  r = chain_dimension(req);
  CHECK(r.k == 28113125);
  CHECK(std::abs(r.series - 48.760897970432889841) <=
        1e-9 * 48.760897970432889841);
}

TEST_CASE("embedding dimension from an explicit table") {
  ChainingRequest req;
  req.model = CoveringModel::explicit_table(std::vector<double>(41, 1.0));
  req.eps = 0.5;
  req.p = std::exp(-1.0);
  req.max_terms = 41;
  const auto r = chain_dimension(req);
  CHECK(r.k == 144);
  CHECK(r.series == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.series_terms == 41);
  CHECK(r.pre_ceil == doctest::Approx(144.0).epsilon(1e-12));

  req.max_terms.reset();
  CHECK_THROWS_AS(chain_dimension(req), fjlt::ArgumentError);
}

TEST_CASE("embedding dimension is monotone in the target guarantees") {
  ChainingRequest req;
  req.model = CoveringModel::subspace(4);
  req.p = 0.01;
  std::uint64_t prev = UINT64_MAX;
  for (const double eps : {0.1, 0.2, 0.3, 0.5, 0.9}) {
    req.eps = eps;
    const auto r = chain_dimension(req);
    CHECK(r.k <= prev);
    prev = r.k;
  }
  req.eps = 0.25;
  prev = UINT64_MAX;
  for (const double p : {0.001, 0.01, 0.1, 0.5}) {
    req.p = p;
    const auto r = chain_dimension(req);
    CHECK(r.k <= prev);
    prev = r.k;
  }

  req.p = 0.01;
  const double base = chain_dimension(req).pre_ceil;
  req.C = 2.0;
  CHECK(chain_dimension(req).pre_ceil == 2.0 * base);
}

TEST_CASE("embedding dimension argument validation") {
  ChainingRequest req;
  req.model = CoveringModel::finite(8);
  req.eps = 0.25;
  req.p = 0.01;
  CHECK_NOTHROW(chain_dimension(req));

  for (const double bad : {0.0, 1.0, -0.5}) {
    auto r = req;
    r.eps = bad;
    CHECK_THROWS_AS(chain_dimension(r), fjlt::ArgumentError);
    r = req;
    r.p = bad;
    CHECK_THROWS_AS(chain_dimension(r), fjlt::ArgumentError);
  }
  {
    auto r = req;
    r.C = 0.0;
    CHECK_THROWS_AS(chain_dimension(r), fjlt::ArgumentError);
    r.C = -1.0;
    CHECK_THROWS_AS(chain_dimension(r), fjlt::ArgumentError);
  }
  {
    auto r = req;
    r.tol = 0.0;
    CHECK_THROWS_AS(chain_dimension(r), fjlt::ArgumentError);
  }
  {
    // (ln 1/p)^(3/4) alone already pushes past 2^63 here.
    auto r = req;
    r.model = CoveringModel::finite(1);
    r.eps = 1e-4;
    r.p = 1e-300;
    CHECK_THROWS_AS(chain_dimension(r), fjlt::ArgumentError);
  }
}

TEST_CASE("Gaussian width of hand-solvable sets") {
  fjlt::RowMatrixXd zero(1, 3);
  zero.setZero();
  const auto z = fjlt::gaussian_width_mc(zero, 100, 0);
  CHECK(z.mean == 0.0);
  CHECK(z.std_error == 0.0);
  CHECK(z.trials == 100);

  // {e1, -e1}: max(g, -g) = |g|, so the width is E|g| = sqrt(2/pi).
  fjlt::RowMatrixXd pm(2, 2);
  pm << 1, 0, -1, 0;
  const auto w = fjlt::gaussian_width_mc(pm, 20000, 11);
  CHECK(w.std_error > 0.0);
  CHECK(std::abs(w.mean - std::sqrt(2.0 / std::numbers::pi)) <=
        4.0 * w.std_error);

  // Singleton {e1}: E<g, e1> = 0.
  fjlt::RowMatrixXd single(1, 2);
  single << 1, 0;
  const auto s = fjlt::gaussian_width_mc(single, 20000, 11);
  CHECK(std::abs(s.mean) <= 4.0 * s.std_error);

  // Width is positively homogeneous, and doubling is exact in binary.
  const auto doubled = fjlt::gaussian_width_mc((2.0 * pm).eval(), 20000, 11);
  CHECK(doubled.mean == 2.0 * w.mean);
}

TEST_CASE("Gaussian width estimates are thread-count invariant") {
  fjlt::RowMatrixXd pts(3, 4);
  pts << 1, 0, 0, 0, 0, -1, 0.5, 0, 0.25, 0.25, 0.25, 0.25;
  const auto a = fjlt::gaussian_width_mc(pts, 101, 3, 1);
  const auto b = fjlt::gaussian_width_mc(pts, 101, 3, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.partitions == 1);
  CHECK(b.partitions == 4);

  CHECK_THROWS_AS(fjlt::gaussian_width_mc(pts, 1, 0), fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::gaussian_width_mc(fjlt::RowMatrixXd(0, 4), 10, 0),
                  fjlt::ArgumentError);
  CHECK_THROWS_AS(fjlt::gaussian_width_mc(pts, 10, 0, 0), fjlt::ArgumentError);
}
