#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fjlt/types.hpp"

namespace fjlt {

/// Input vectors the experiments draw on. Ones is d^(-1/2) (1, ..., 1);
/// FlatSqrt puts d^(-1/4) on the first sqrt(d) coordinates and 0 elsewhere;
/// E1 is the first standard basis vector; RandomUnit is a seeded uniform
/// point on the sphere.
enum class VectorKind { Ones, FlatSqrt, E1, RandomUnit };

VectorKind parse_vector_kind(std::string_view name);
std::string vector_kind_name(VectorKind kind);

/// Construct the requested unit vector; seed only matters for RandomUnit.
Eigen::VectorXd adversarial_vector(VectorKind kind, std::uint64_t d,
                                   std::uint64_t seed = 0);

enum class FlattenMode { Exhaustive, MonteCarlo };

/// Distribution of the flattening statistic d^(1/4) ||H D' x||_4 over the
/// sign diagonal D'. Exhaustive mode enumerates all 2^d diagonals, so the
/// probabilities are exact rationals count / 2^d; Monte Carlo samples them.
struct FlattenDistribution {
  /// Distinct observed values in increasing order with their multiplicities.
  std::vector<std::pair<double, std::uint64_t>> histogram;
  std::uint64_t denominator = 0;
  FlattenMode mode = FlattenMode::Exhaustive;
  std::uint64_t d = 0;
};

/// Exhaustive mode needs d <= 20; Monte Carlo needs trials >= 1 and a seed.
FlattenDistribution flatten_tail(std::uint64_t d,
                                 const Eigen::Ref<const Eigen::VectorXd>& x,
                                 FlattenMode mode, std::uint64_t trials = 0,
                                 std::uint64_t seed = 0);

/// P(value >= t) under the distribution.
double flatten_exceed_probability(const FlattenDistribution& dist, double t);

/// Empirical or exact exceedance counts of a deviation statistic over a
/// threshold grid: counts[i] is how many of the `trials` outcomes had
/// deviation strictly above t_grid[i].
struct TailCurve {
  std::vector<double> t_grid;
  std::vector<std::uint64_t> exceed_counts;
  std::uint64_t trials = 0;
  struct Config {
    std::uint64_t d = 0;
    std::uint64_t k = 0;
    std::string x_spec;
    std::uint64_t seed = 0;
  } config;

  double p_hat(std::size_t i) const {
    return static_cast<double>(exceed_counts.at(i)) /
           static_cast<double>(trials);
  }
};

/// t_grid must be nonempty, positive, and strictly increasing.
void validate_t_grid(const std::vector<double>& t_grid);

/// Parse "start:stop:step" into the grid start, start + step, ... < stop
/// (start inclusive, stop exclusive). All three must be positive and
/// stop > start.
std::vector<double> parse_t_grid(std::string_view spec);

/// Monte Carlo curve of P(| ||A x||_2 - 1 | > t) for the named input vector,
/// one freshly seeded plan per trial. Trials are indexed sub-streams of the
/// seed, so the counts do not depend on the thread count.
TailCurve tail_estimate(std::uint64_t d, std::uint64_t k, VectorKind kind,
                        const std::vector<double>& t_grid,
                        std::uint64_t trials, std::uint64_t seed,
                        unsigned threads = 1);

/// Exact curve of P(| <sigma, x> | > t) over all 2^d sign vectors sigma,
/// by enumeration. Requires x.size() <= 24; counts are exact out of 2^d.
TailCurve coordinate_tail_exact(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const std::vector<double>& t_grid);

/// Tail shapes the fitter can regress against: p(t) = amplitude *
/// exp(-coeff * f) with f = k t^2 (SubGaussian), k^(2/3) t^(4/3)
/// (MixedPower), or t^4 (Quartic).
enum class TailModel { SubGaussian, MixedPower, Quartic };

struct FittedConstants {
  TailModel model = TailModel::SubGaussian;
  double amplitude = 0.0;
  double exponent_coeff = 0.0;
  double residual_rms = 0.0;
  int points_used = 0;
};

/// Least squares of -log p_hat against the model feature, using only grid
/// points with p_hat in (10 / trials, 0.5). Fewer than 3 usable points is a
/// FitError: the curve cannot identify the constants.
FittedConstants fit_tail_constants(const TailCurve& curve, TailModel model);

struct BenchRow {
  std::uint64_t d = 0;
  std::uint64_t k = 0;
  double median_ns = 0.0;
};

/// Median wall time of a single apply per dimension, after warmup, with all
/// buffers preallocated. One row per entry of d_list.
std::vector<BenchRow> bench_apply(const std::vector<std::uint64_t>& d_list,
                                  std::uint64_t k, std::uint64_t repetitions,
                                  std::uint64_t seed);

/// Mean and standard error of ||A x||_2^2 over freshly seeded plans; the
/// trials reuse the tail_estimate sub-streams, so a (seed, trial) pair names
/// the same plan in both views.
struct NormStats {
  double mean_sq = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

NormStats embedding_norm_stats(std::uint64_t d, std::uint64_t k,
                               VectorKind kind, std::uint64_t trials,
                               std::uint64_t seed);

}  // namespace fjlt
