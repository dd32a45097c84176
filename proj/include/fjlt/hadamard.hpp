#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "fjlt/errors.hpp"

namespace fjlt {

inline bool is_power_of_two(std::uint64_t n) noexcept {
  return n != 0 && std::has_single_bit(n);
}

namespace detail {

/// All butterfly passes of the +-1 Walsh-Hadamard transform, no scaling.
/// Large inputs recurse on the two halves first so each half is transformed
/// while it still fits in cache, then a single combine pass stitches them;
/// the transform is memory bound, and this ordering is what keeps the cost
/// per doubling near 2x at widths far beyond L2.
template <typename Scalar>
void fwht_butterflies(Scalar* data, std::size_t n) {
  constexpr std::size_t block = 4096;
  if (n > block) {
    const std::size_t h = n / 2;
    fwht_butterflies(data, h);
    fwht_butterflies(data + h, h);
    Scalar* lo = data;
    Scalar* hi = data + h;
    for (std::size_t i = 0; i < h; ++i) {
      const Scalar a = lo[i];
      const Scalar b = hi[i];
      lo[i] = a + b;
      hi[i] = a - b;
    }
    return;
  }
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t base = 0; base < n; base += 2 * len) {
      for (std::size_t i = base; i < base + len; ++i) {
        const Scalar a = data[i];
        const Scalar b = data[i + len];
        data[i] = a + b;
        data[i + len] = a - b;
      }
    }
  }
}

}  // namespace detail

/// In-place Walsh-Hadamard transform with +-1 entries (no normalization).
/// Length must be a power of two. Applying it twice multiplies by the length.
template <typename Scalar>
void fwht_unnormalized_inplace(
    Eigen::Ref<Eigen::Vector<Scalar, Eigen::Dynamic>> v) {
  const auto n = static_cast<std::uint64_t>(v.size());
  if (!is_power_of_two(n)) {
    throw DimensionError("fwht: length " + std::to_string(n) +
                         " is not a power of two");
  }
  detail::fwht_butterflies(v.data(), static_cast<std::size_t>(n));
}

/// In-place orthonormal Walsh-Hadamard transform, entries +-d^(-1/2).
/// The matrix is symmetric and orthogonal, so this is its own inverse and
/// preserves the Euclidean norm. Length must be a power of two. O(d log d).
template <typename Scalar>
void fwht_inplace(Eigen::Ref<Eigen::Vector<Scalar, Eigen::Dynamic>> v) {
  fwht_unnormalized_inplace<Scalar>(v);
  const auto n = static_cast<std::size_t>(v.size());
  v *= Scalar(1) / std::sqrt(static_cast<Scalar>(n));
}

/// Entry (i, j) of the orthonormal d x d Walsh-Hadamard matrix:
/// d^(-1/2) * (-1)^<i,j>, with <i,j> the GF(2) inner product of the index
/// bit patterns. O(1); serves as the dense oracle for the fast transform.
inline double hadamard_entry(std::uint64_t i, std::uint64_t j,
                             std::uint64_t d) {
  if (!is_power_of_two(d)) {
    throw DimensionError("hadamard_entry: d " + std::to_string(d) +
                         " is not a power of two");
  }
  if (i >= d || j >= d) {
    throw ArgumentError("hadamard_entry: index (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") out of range for d " +
                        std::to_string(d));
  }
  const int parity = std::popcount(i & j) & 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  return parity ? -scale : scale;
}

/// Dense orthonormal Walsh-Hadamard matrix. Test and oracle scale only.
inline Eigen::MatrixXd hadamard_matrix(std::uint64_t d) {
  if (!is_power_of_two(d)) {
    throw DimensionError("hadamard_matrix: d " + std::to_string(d) +
                         " is not a power of two");
  }
  Eigen::MatrixXd h(d, d);
  for (std::uint64_t i = 0; i < d; ++i)
    for (std::uint64_t j = 0; j < d; ++j)
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          hadamard_entry(i, j, d);
  return h;
}

}  // namespace fjlt
