#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "fjlt/gf2m.hpp"

namespace fjlt {

/// Implicit k x d matrix B whose columns, scaled by k^(1/2), form an exact
/// 4-wise independent family of +-1 vectors.
///
/// Construction: with m the smallest integer satisfying 2^m >= k, the base
/// tile has width d0 = 2^(2m+1). A column index within the tile decodes as
/// (c0, a, b) in GF(2) x GF(2^m) x GF(2^m) (c0 the top bit, a the middle m
/// bits, b the low m bits), and the entry in row i is
///
///     k^(-1/2) * (-1)^(c0 + Tr(a x_i) + Tr(b x_i^3))
///
/// where x_i is the i-th field element in counting order and Tr is the trace
/// to GF(2). Wider matrices repeat whole tiles, so d must be a power of two
/// at least d0. Every column has unit norm and B B^T = (d/k) I exactly.
///
/// The object stores only the field context and one k-entry index table, so
/// it stays O(k) in memory at any width; entries are decoded on demand and
/// products use a Walsh-Hadamard factorization (see apply_code_matrix).
class CodeMatrix {
 public:
  std::uint64_t rows() const noexcept { return k_; }
  std::uint64_t cols() const noexcept { return d_; }
  int field_bits() const noexcept { return field_.m(); }
  const FieldContext& field() const noexcept { return field_; }

  /// Width of the base tile, 2^(2m+1).
  std::uint64_t base_width() const noexcept {
    return std::uint64_t{2} << (2 * field_.m());
  }

  std::uint64_t tiles() const noexcept { return d_ / base_width(); }

  /// Row i as a bin index of the length-2^(2m) Walsh-Hadamard transform used
  /// by the fast product: bit t of the high m bits is Tr(X^t x_i), bit t of
  /// the low m bits is Tr(X^t x_i^3).
  std::uint32_t sample_index(std::uint64_t row) const {
    return sample_index_[row];
  }

 private:
  CodeMatrix(FieldContext field, std::uint64_t k, std::uint64_t d);

  FieldContext field_;
  std::uint64_t k_;
  std::uint64_t d_;
  std::vector<std::uint32_t> sample_index_;

  friend CodeMatrix build_code_matrix(std::uint64_t k, std::uint64_t d);
};

/// Smallest m with 2^m >= k (at least 1). k must be in [1, 2^16].
int min_field_bits(std::uint64_t k);

/// Smallest admissible width 2^(2m+1) for the given k.
std::uint64_t min_feasible_dim(std::uint64_t k);

/// Build the implicit matrix. d must be a power of two and at least
/// min_feasible_dim(k); otherwise an InfeasibleError reports that minimum.
CodeMatrix build_code_matrix(std::uint64_t k, std::uint64_t d);

/// Entry sign at (row, col) as +-1.0 (the matrix entry is this times
/// k^(-1/2)). O(m) per call; dense oracle for the fast product.
double code_sign(std::uint64_t row, std::uint64_t col, const CodeMatrix& b);

/// y -> B y in O(d log k): per tile, fold the c0 halves, run one
/// unnormalized Walsh-Hadamard transform of length 2^(2m), and read each
/// row's bin; then scale by k^(-1/2).
Eigen::VectorXd apply_code_matrix(const CodeMatrix& b,
                                  const Eigen::Ref<const Eigen::VectorXd>& y);

/// Same product with caller-provided output and scratch (scratch is resized
/// to 2^(2m); out to k). Allocation-free after warmup.
void apply_code_matrix_into(const CodeMatrix& b,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            Eigen::VectorXd& out, Eigen::VectorXd& scratch);

/// Exhaustive sign-pattern census over the columns for four distinct rows:
/// counts[p] is the number of columns whose signs at rows r0..r3 match
/// pattern p (bit i of p set iff the sign at rows[i] is -1). Exact 4-wise
/// balance means every count equals d/16.
std::array<std::uint64_t, 16> verify_balance(
    const CodeMatrix& b, const std::array<std::uint64_t, 4>& rows);

/// Randomized lower estimate of the 2 -> 4 operator norm of B^T: the max of
/// ||B^T v||_4 over unit probes v. The first min(probes, k) probes are the
/// standard basis vectors e_1, e_2, ...; the rest are seeded uniform unit
/// vectors. Each probe costs O(4^m + k), not O(d).
double norm_2to4_probe(const CodeMatrix& b, std::uint64_t probes,
                       std::uint64_t seed);

/// Closed-form upper bound (3d)^(1/4) k^(-1/2) on the 2 -> 4 norm of B^T.
double norm_2to4_bound(const CodeMatrix& b);

}  // namespace fjlt
