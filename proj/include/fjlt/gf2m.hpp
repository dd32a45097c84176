#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <string>

#include "fjlt/errors.hpp"

namespace fjlt {

/// Arithmetic context for GF(2^m), 1 <= m <= 16. Elements are m-bit words in
/// the polynomial basis. The modulus comes from a fixed built-in table of
/// primitive polynomials, so two machines that agree on m agree on every
/// product and trace; a caller may also pass the modulus explicitly, but it
/// must match the table (anything else would silently change the code matrix
/// a plan decodes to).
class FieldContext {
 public:
  using Element = std::uint32_t;

  static constexpr int kMaxM = 16;

  /// kPrimitivePolys[m - 1] is a primitive polynomial of degree m, written
  /// with its bit i giving the coefficient of X^i.
  static constexpr std::array<std::uint32_t, kMaxM> kPrimitivePolys = {
      0b11,                 // m = 1: X + 1
      0b111,                // m = 2: X^2 + X + 1
      0b1011,               // m = 3: X^3 + X + 1
      0b10011,              // m = 4: X^4 + X + 1
      0b100101,             // m = 5
      0b1000011,            // m = 6
      0b10001001,           // m = 7
      0b100011101,          // m = 8
      0b1000010001,         // m = 9
      0b10000001001,        // m = 10
      0b100000000101,       // m = 11
      0b1000001010011,      // m = 12
      0b10000000011011,     // m = 13
      0b100010001000011,    // m = 14
      0b1000000000000011,   // m = 15
      0b10001000000001011,  // m = 16
  };

  explicit FieldContext(int m) : FieldContext(m, modulus_for(m)) {}

  FieldContext(int m, std::uint32_t modulus) : m_(m), modulus_(modulus) {
    if (m < 1 || m > kMaxM) {
      throw ArgumentError("FieldContext: m " + std::to_string(m) +
                          " outside [1, " + std::to_string(kMaxM) + "]");
    }
    if (modulus != modulus_for(m)) {
      throw ArgumentError(
          "FieldContext: modulus " + std::to_string(modulus) +
          " does not match the built-in primitive polynomial for m " +
          std::to_string(m));
    }
    // Tr is GF(2)-linear, so it is determined by its values on the basis
    // 1, X, ..., X^(m-1); fold those into a mask for O(1) evaluation.
    trace_mask_ = 0;
    for (int t = 0; t < m_; ++t) {
      if (trace_by_sum(Element{1} << t)) trace_mask_ |= 1u << t;
    }
  }

  int m() const noexcept { return m_; }
  std::uint32_t modulus() const noexcept { return modulus_; }
  Element field_mask() const noexcept { return (Element{1} << m_) - 1; }
  std::uint64_t order() const noexcept { return (std::uint64_t{1} << m_) - 1; }

  /// Product in GF(2^m): carry-less multiply with shift-and-XOR reduction.
  Element mul(Element a, Element b) const noexcept {
    assert(a <= field_mask() && b <= field_mask());
    Element r = 0;
    Element x = a;
    for (Element y = b; y != 0; y >>= 1) {
      if (y & 1u) r ^= x;
      x <<= 1;
      if (x & (Element{1} << m_)) x ^= modulus_;
    }
    return r;
  }

  Element pow(Element a, std::uint64_t e) const noexcept {
    Element r = 1;
    Element base = a;
    while (e != 0) {
      if (e & 1u) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }

  Element cube(Element a) const noexcept { return mul(mul(a, a), a); }

  /// Trace Tr(a) = a + a^2 + a^4 + ... + a^(2^(m-1)) in GF(2). Returns 0 or 1.
  int trace(Element a) const noexcept {
    assert(a <= field_mask());
    return std::popcount(a & trace_mask_) & 1;
  }

 private:
  static std::uint32_t modulus_for(int m) {
    if (m < 1 || m > kMaxM) {
      throw ArgumentError("FieldContext: m " + std::to_string(m) +
                          " outside [1, " + std::to_string(kMaxM) + "]");
    }
    return kPrimitivePolys[static_cast<std::size_t>(m - 1)];
  }

  int trace_by_sum(Element a) const noexcept {
    Element acc = 0;
    Element term = a;
    for (int i = 0; i < m_; ++i) {
      acc ^= term;
      term = mul(term, term);
    }
    // The sum lands in the prime subfield {0, 1}.
    return static_cast<int>(acc & 1u);
  }

  int m_;
  std::uint32_t modulus_;
  std::uint32_t trace_mask_ = 0;
};

inline FieldContext::Element gf_mul(FieldContext::Element a,
                                    FieldContext::Element b,
                                    const FieldContext& ctx) noexcept {
  return ctx.mul(a, b);
}

inline int gf_trace(FieldContext::Element a, const FieldContext& ctx) noexcept {
  return ctx.trace(a);
}

}  // namespace fjlt
