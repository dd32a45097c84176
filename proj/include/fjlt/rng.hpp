#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace fjlt {

/// One SplitMix64 step. Only used to mix seeds, never as a bulk generator.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over the label bytes. Stable across platforms.
inline std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the named stream under a master seed. Distinct labels give
/// unrelated streams; the same (master, label) pair always gives the same
/// stream, which is what makes plans and experiments replayable.
inline std::uint64_t stream_seed(std::uint64_t master,
                                 std::string_view label) noexcept {
  std::uint64_t s = master ^ hash_label(label);
  splitmix64(s);
  return splitmix64(s);
}

/// Seed of the index-th sub-stream of a stream, for per-trial independence.
inline std::uint64_t substream_seed(std::uint64_t seed,
                                    std::uint64_t index) noexcept {
  std::uint64_t s = seed ^ ((index + 1) * 0x9e3779b97f4a7c15ULL);
  splitmix64(s);
  return splitmix64(s);
}

/// Deterministic random source. mt19937_64 output is fixed by the standard,
/// and every conversion below is spelled out by hand (the std distributions
/// are implementation-defined), so a seed produces the same doubles on every
/// platform and compiler.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in (0, 1]. Never returns 0, so log() is always safe.
  double uniform01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Fair +-1 draw from the top bit.
  double sign() { return (engine_() >> 63) ? -1.0 : 1.0; }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Eigen::VectorXd sign_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = sign();
    return v;
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  /// Uniform point on the unit sphere (normalized Gaussian vector).
  Eigen::VectorXd unit_vector(Eigen::Index n) {
    Eigen::VectorXd v = gaussian_vector(n);
    const double norm = v.norm();
    if (norm == 0.0) return unit_vector(n);  // probability ~0, but total
    return v / norm;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fjlt
