#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fjlt/types.hpp"

namespace fjlt {

/// Covering-number model of a target set T on the unit sphere: covering_log
/// returns ln N(T, 2^-j), the log covering number at scale 2^-j.
///
///   Finite(n)        ln N_j = ln n                       (any scale)
///   Subspace(dim)    ln N_j = dim * ln(1 + 2^(j+1))      (unit ball, dim-dimensional)
///   Sparse(d, s)     ln N_j = ln C(d, s) + s * ln(1 + 2^(j+1))
///   Explicit(table)  ln N_j = table[j], no model beyond the listed scales
///
/// The first three admit the affine cap ln N_j <= A + B j used to certify
/// series truncation; an explicit table does not, so series over it must be
/// given a hard term limit by the caller.
class CoveringModel {
 public:
  enum class Kind { Finite, Subspace, Sparse, Explicit };

  static CoveringModel finite(std::uint64_t n);
  static CoveringModel subspace(int dim);
  static CoveringModel sparse(int ambient_dim, int nnz);
  static CoveringModel explicit_table(std::vector<double> ln_cover);

  Kind kind() const noexcept { return kind_; }
  std::uint64_t points() const noexcept { return n_; }
  int dim() const noexcept { return dim_; }
  int ambient_dim() const noexcept { return ambient_; }
  int nnz() const noexcept { return nnz_; }
  const std::vector<double>& table() const noexcept { return table_; }

  bool has_growth_cap() const noexcept { return kind_ != Kind::Explicit; }
  double cap_offset() const noexcept { return cap_a_; }
  double cap_slope() const noexcept { return cap_b_; }

 private:
  CoveringModel() = default;

  Kind kind_ = Kind::Finite;
  std::uint64_t n_ = 0;
  int dim_ = 0;
  int ambient_ = 0;
  int nnz_ = 0;
  double ln_binom_ = 0.0;
  std::vector<double> table_;
  double cap_a_ = 0.0;
  double cap_b_ = 0.0;
};

/// ln N(T, 2^-j) for scale index j >= 0.
double covering_log(const CoveringModel& model, int j);

struct ChainSeries {
  double value = 0.0;
  /// Number of terms actually summed.
  int terms = 0;
};

/// The scale series sum_j 2^-j (ln N_j)^(3/4). Without max_terms the sum
/// stops once the affine-cap tail certificate drops below tol relative to
/// the running sum; models with no cap then raise an ArgumentError, because
/// the truncation error could not be certified. With max_terms exactly that
/// many terms are summed.
ChainSeries chain_series(const CoveringModel& model, double tol,
                         std::optional<int> max_terms = std::nullopt);

struct ChainingRequest {
  CoveringModel model = CoveringModel::finite(1);
  double eps = 0.0;
  double p = 0.0;
  double C = 1.0;
  double tol = 1e-9;
  std::optional<int> max_terms;
};

struct ChainingResult {
  /// ceil(C / eps^4 * ((ln 1/p)^(3/4) + series)^2)
  std::uint64_t k = 0;
  /// Value of the scale series (0 for the finite closed form's series part
  /// is not applicable; see series_terms).
  double series = 0.0;
  /// Terms summed; 0 means the finite-set closed form 2 (ln n)^(3/4) was
  /// used instead of term-by-term summation.
  int series_terms = 0;
  double pre_ceil = 0.0;
};

/// Embedding dimension sufficient for distortion eps with failure
/// probability p over the modeled set, via the chained covering bound.
/// eps and p must lie in (0, 1); C and tol must be positive.
ChainingResult chain_dimension(const ChainingRequest& request);

struct GaussianWidthEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  unsigned partitions = 1;
};

/// Monte Carlo Gaussian mean width of a finite point set: E max_i <g, x_i>.
/// Per-trial values are stored and reduced in trial order, so the estimate
/// is identical for every thread count.
GaussianWidthEstimate gaussian_width_mc(
    const Eigen::Ref<const RowMatrixXd>& points, std::uint64_t trials,
    std::uint64_t seed, unsigned threads = 1);

}  // namespace fjlt
