#include "fjlt/code_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fjlt/errors.hpp"
#include "fjlt/hadamard.hpp"
#include "fjlt/rng.hpp"

namespace fjlt {

int min_field_bits(std::uint64_t k) {
  if (k == 0) throw ArgumentError("code matrix: k must be positive");
  if (k > (std::uint64_t{1} << FieldContext::kMaxM)) {
    throw ArgumentError("code matrix: k " + std::to_string(k) +
                        " exceeds the supported maximum 2^" +
                        std::to_string(FieldContext::kMaxM));
  }
  int m = 1;
  while ((std::uint64_t{1} << m) < k) ++m;
  return m;
}

std::uint64_t min_feasible_dim(std::uint64_t k) {
  return std::uint64_t{2} << (2 * min_field_bits(k));
}

CodeMatrix::CodeMatrix(FieldContext field, std::uint64_t k, std::uint64_t d)
    : field_(field), k_(k), d_(d), sample_index_(k) {
  const int m = field_.m();
  for (std::uint64_t i = 0; i < k; ++i) {
    const auto x = static_cast<FieldContext::Element>(i);
    const FieldContext::Element x3 = field_.cube(x);
    std::uint32_t ua = 0;
    std::uint32_t ub = 0;
    for (int t = 0; t < m; ++t) {
      const FieldContext::Element xt = FieldContext::Element{1} << t;
      if (field_.trace(field_.mul(xt, x))) ua |= 1u << t;
      if (field_.trace(field_.mul(xt, x3))) ub |= 1u << t;
    }
    sample_index_[i] = (ua << m) | ub;
  }
}

CodeMatrix build_code_matrix(std::uint64_t k, std::uint64_t d) {
  const int m = min_field_bits(k);
  if (!is_power_of_two(d)) {
    throw DimensionError("code matrix: d " + std::to_string(d) +
                         " is not a power of two");
  }
  const std::uint64_t d0 = std::uint64_t{2} << (2 * m);
  if (d < d0) {
    throw InfeasibleError("code matrix: k " + std::to_string(k) +
                              " needs d >= " + std::to_string(d0) + ", got " +
                              std::to_string(d),
                          d0);
  }
  if (d % d0 != 0) {
    throw DimensionError("code matrix: d " + std::to_string(d) +
                         " is not a multiple of the base width " +
                         std::to_string(d0));
  }
  return CodeMatrix(FieldContext(m), k, d);
}

double code_sign(std::uint64_t row, std::uint64_t col, const CodeMatrix& b) {
  if (row >= b.rows() || col >= b.cols()) {
    throw ArgumentError("code_sign: entry (" + std::to_string(row) + ", " +
                        std::to_string(col) + ") out of range for " +
                        std::to_string(b.rows()) + " x " +
                        std::to_string(b.cols()));
  }
  const FieldContext& f = b.field();
  const int m = f.m();
  const std::uint64_t tile_col = col % b.base_width();
  const auto c0 = static_cast<int>((tile_col >> (2 * m)) & 1u);
  const auto a =
      static_cast<FieldContext::Element>((tile_col >> m) & f.field_mask());
  const auto bb = static_cast<FieldContext::Element>(tile_col & f.field_mask());
  const auto x = static_cast<FieldContext::Element>(row);
  const int parity =
      c0 ^ f.trace(f.mul(a, x)) ^ f.trace(f.mul(bb, f.cube(x)));
  return parity ? -1.0 : 1.0;
}

void apply_code_matrix_into(const CodeMatrix& b,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            Eigen::VectorXd& out, Eigen::VectorXd& scratch) {
  const std::uint64_t d = b.cols();
  const std::uint64_t k = b.rows();
  if (static_cast<std::uint64_t>(y.size()) != d) {
    throw DimensionError("apply_code_matrix: vector length " +
                         std::to_string(y.size()) + " does not match d " +
                         std::to_string(d));
  }
  const Eigen::Index half =
      static_cast<Eigen::Index>(b.base_width() / 2);  // = 2^(2m)
  scratch.resize(half);
  out.setZero(static_cast<Eigen::Index>(k));
  for (std::uint64_t tile = 0; tile < b.tiles(); ++tile) {
    const auto base = static_cast<Eigen::Index>(tile * b.base_width());
    scratch = y.segment(base, half) - y.segment(base + half, half);
    detail::fwht_butterflies(scratch.data(), static_cast<std::size_t>(half));
    for (std::uint64_t i = 0; i < k; ++i) {
      out[static_cast<Eigen::Index>(i)] += scratch[b.sample_index(i)];
    }
  }
  out *= 1.0 / std::sqrt(static_cast<double>(k));
}

Eigen::VectorXd apply_code_matrix(const CodeMatrix& b,
                                  const Eigen::Ref<const Eigen::VectorXd>& y) {
  Eigen::VectorXd out;
  Eigen::VectorXd scratch;
  apply_code_matrix_into(b, y, out, scratch);
  return out;
}

std::array<std::uint64_t, 16> verify_balance(
    const CodeMatrix& b, const std::array<std::uint64_t, 4>& rows) {
  for (int i = 0; i < 4; ++i) {
    if (rows[static_cast<std::size_t>(i)] >= b.rows()) {
      throw ArgumentError("verify_balance: row " +
                          std::to_string(rows[static_cast<std::size_t>(i)]) +
                          " out of range for k " + std::to_string(b.rows()));
    }
    for (int j = i + 1; j < 4; ++j) {
      if (rows[static_cast<std::size_t>(i)] ==
          rows[static_cast<std::size_t>(j)]) {
        throw ArgumentError("verify_balance: rows must be distinct");
      }
    }
  }
  std::array<std::uint64_t, 16> counts{};
  for (std::uint64_t col = 0; col < b.cols(); ++col) {
    unsigned pattern = 0;
    for (unsigned i = 0; i < 4; ++i) {
      if (code_sign(rows[i], col, b) < 0.0) pattern |= 1u << i;
    }
    ++counts[pattern];
  }
  return counts;
}

double norm_2to4_probe(const CodeMatrix& b, std::uint64_t probes,
                       std::uint64_t seed) {
  if (probes == 0) throw ArgumentError("norm_2to4_probe: probes must be positive");
  const std::uint64_t k = b.rows();
  const auto half = static_cast<Eigen::Index>(b.base_width() / 2);
  const double tiles = static_cast<double>(b.tiles());
  const std::uint64_t probe_stream = stream_seed(seed, "probe");
  Eigen::VectorXd v(static_cast<Eigen::Index>(k));
  Eigen::VectorXd w(half);
  double best = 0.0;
  for (std::uint64_t p = 0; p < probes; ++p) {
    if (p < k) {
      v.setZero();
      v[static_cast<Eigen::Index>(p)] = 1.0;
    } else {
      StreamRng rng(substream_seed(probe_stream, p));
      v = rng.unit_vector(static_cast<Eigen::Index>(k));
    }
    w.setZero();
    for (std::uint64_t i = 0; i < k; ++i) {
      w[b.sample_index(i)] += v[static_cast<Eigen::Index>(i)];
    }
    detail::fwht_butterflies(w.data(), static_cast<std::size_t>(half));
    const double sum4 = w.array().square().square().sum();
    const double l4_4 =
        tiles * 2.0 * sum4 / (static_cast<double>(k) * static_cast<double>(k));
    best = std::max(best, std::pow(l4_4, 0.25));
  }
  return best;
}

double norm_2to4_bound(const CodeMatrix& b) {
  return std::pow(3.0 * static_cast<double>(b.cols()), 0.25) /
         std::sqrt(static_cast<double>(b.rows()));
}

}  // namespace fjlt
