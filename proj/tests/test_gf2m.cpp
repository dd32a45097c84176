#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "fjlt/errors.hpp"
#include "fjlt/gf2m.hpp"
#include "test_helpers.hpp"

using fjlt::FieldContext;

TEST_CASE("construction validates m and the modulus") {
  CHECK_THROWS_AS(FieldContext(0), fjlt::ArgumentError);
  CHECK_THROWS_AS(FieldContext(17), fjlt::ArgumentError);
  CHECK_THROWS_AS(FieldContext(3, 0b1101), fjlt::ArgumentError);  // primitive, but not ours
  const FieldContext f(3, 0b1011);
  CHECK(f.m() == 3);
  CHECK(f.modulus() == 0b1011);
  CHECK(f.order() == 7);
}

TEST_CASE("multiplication basics") {
  const FieldContext f(3);
  for (std::uint32_t a = 0; a < 8; ++a) {
    CHECK(fjlt::gf_mul(a, 1, f) == a);
    CHECK(fjlt::gf_mul(0, a, f) == 0);
  }
  // x * x^2 = x^3 = x + 1 under x^3 + x + 1
  CHECK(fjlt::gf_mul(0b010, 0b100, f) == 0b011);
}

TEST_CASE("field axioms exhaustively for m <= 4") {
  for (int m = 1; m <= 4; ++m) {
    const FieldContext f(m);
    const std::uint32_t size = 1u << m;
    for (std::uint32_t a = 0; a < size; ++a) {
      for (std::uint32_t b = 0; b < size; ++b) {
        CHECK(f.mul(a, b) == f.mul(b, a));
        for (std::uint32_t c = 0; c < size; ++c) {
          CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
          CHECK(f.mul(a, b ^ c) == (f.mul(a, b) ^ f.mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("every nonzero element is invertible (m <= 4)") {
  for (int m = 1; m <= 4; ++m) {
    const FieldContext f(m);
    const std::uint32_t size = 1u << m;
    for (std::uint32_t a = 1; a < size; ++a) {
      CHECK(f.mul(a, f.pow(a, f.order() - 1)) == 1);
    }
  }
}

TEST_CASE("trace equals its defining sum and lands in GF(2), m <= 8") {
  for (int m = 1; m <= 8; ++m) {
    const FieldContext f(m);
    const std::uint32_t size = 1u << m;
    for (std::uint32_t a = 0; a < size; ++a) {
      const int by_sum = fjlt_test::trace_by_sum(f, a);
      CHECK(by_sum <= 1);  // sum lies in the prime subfield
      CHECK(f.trace(a) == by_sum);
    }
  }
}

TEST_CASE("trace is linear and balanced, m <= 8") {
  for (int m = 1; m <= 8; ++m) {
    const FieldContext f(m);
    const std::uint32_t size = 1u << m;
    CHECK(f.trace(0) == 0);
    std::uint32_t zeros = 0;
    for (std::uint32_t a = 0; a < size; ++a) {
      if (f.trace(a) == 0) ++zeros;
      for (std::uint32_t b = 0; b < size; ++b) {
        CHECK(f.trace(a ^ b) == (f.trace(a) ^ f.trace(b)));
      }
    }
    CHECK(zeros == size / 2);
  }
}

TEST_CASE("m=2 traces contain exactly two zeros and two ones") {
  const FieldContext f(2, 0b111);
  int ones = 0;
  for (std::uint32_t a = 0; a < 4; ++a) ones += f.trace(a);
  CHECK(ones == 2);
}

TEST_CASE("Frobenius compatibility Tr(a^2) = Tr(a), m <= 8") {
  for (int m = 1; m <= 8; ++m) {
    const FieldContext f(m);
    for (std::uint32_t a = 0; a < (1u << m); ++a) {
      CHECK(f.trace(f.mul(a, a)) == f.trace(a));
    }
  }
}

TEST_CASE("built-in moduli are primitive: x generates the full group") {
  for (int m = 1; m <= FieldContext::kMaxM; ++m) {
    const FieldContext f(m);
    const std::uint64_t order = f.order();
    // The element x (or 1 when m = 1) must have multiplicative order 2^m - 1.
    const FieldContext::Element x = m == 1 ? 1u : 0b10u;
    FieldContext::Element acc = 1;
    std::uint64_t period = 0;
    do {
      acc = f.mul(acc, x);
      ++period;
    } while (acc != 1 && period <= order);
    CHECK(period == order);
  }
}
