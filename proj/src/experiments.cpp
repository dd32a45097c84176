#include "fjlt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>
#include <thread>

#include "fjlt/code_matrix.hpp"
#include "fjlt/errors.hpp"
#include "fjlt/hadamard.hpp"
#include "fjlt/plan.hpp"
#include "fjlt/rng.hpp"

namespace fjlt {

namespace {

constexpr std::uint64_t kMaxExhaustiveFlattenD = 20;
constexpr std::uint64_t kMaxExactCoordinateD = 24;

double l4_norm(const Eigen::VectorXd& v) {
  return std::pow(v.array().square().square().sum(), 0.25);
}

/// One tail trial: the deviation | ||A x||_2 - 1 | for the plan seeded by
/// trial_master. Matches apply(plan(d, k, trial_master), x) bit for bit.
class TailKernel {
 public:
  TailKernel(const CodeMatrix& code, const Eigen::VectorXd& x)
      : code_(code), x_(x), d_(x.size()), d_signs_(d_), dprime_signs_(d_) {}

  double deviation(std::uint64_t trial_master) {
    StreamRng d_rng(stream_seed(trial_master, "D"));
    for (Eigen::Index i = 0; i < d_; ++i) d_signs_[i] = d_rng.sign();
    StreamRng dp_rng(stream_seed(trial_master, "Dprime"));
    for (Eigen::Index i = 0; i < d_; ++i) dprime_signs_[i] = dp_rng.sign();
    h_buf_ = x_.cwiseProduct(dprime_signs_);
    fwht_inplace<double>(h_buf_);
    h_buf_.array() *= d_signs_.array();
    apply_code_matrix_into(code_, h_buf_, out_, scratch_);
    return std::abs(out_.norm() - 1.0);
  }

  double norm_sq(std::uint64_t trial_master) {
    const double dev_unused = deviation(trial_master);
    (void)dev_unused;
    return out_.squaredNorm();
  }

 private:
  const CodeMatrix& code_;
  const Eigen::VectorXd& x_;
  Eigen::Index d_;
  Eigen::VectorXd d_signs_;
  Eigen::VectorXd dprime_signs_;
  Eigen::VectorXd h_buf_;
  Eigen::VectorXd out_;
  Eigen::VectorXd scratch_;
};

}  // namespace

VectorKind parse_vector_kind(std::string_view name) {
  if (name == "ones") return VectorKind::Ones;
  if (name == "flat-sqrt") return VectorKind::FlatSqrt;
  if (name == "e1") return VectorKind::E1;
  if (name == "random-unit") return VectorKind::RandomUnit;
  throw ArgumentError("unknown vector kind '" + std::string(name) +
                      "' (expected ones, flat-sqrt, e1, random-unit)");
}

std::string vector_kind_name(VectorKind kind) {
  switch (kind) {
    case VectorKind::Ones: return "ones";
    case VectorKind::FlatSqrt: return "flat-sqrt";
    case VectorKind::E1: return "e1";
    case VectorKind::RandomUnit: return "random-unit";
  }
  throw ArgumentError("unknown vector kind");
}

Eigen::VectorXd adversarial_vector(VectorKind kind, std::uint64_t d,
                                   std::uint64_t seed) {
  if (d == 0) throw ArgumentError("adversarial_vector: d must be positive");
  const auto n = static_cast<Eigen::Index>(d);
  switch (kind) {
    case VectorKind::Ones:
      return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(d)));
    case VectorKind::FlatSqrt: {
      const auto s = static_cast<std::uint64_t>(
          std::llround(std::sqrt(static_cast<double>(d))));
      if (s * s != d) {
        throw ArgumentError("adversarial_vector: flat-sqrt needs a square d, got " +
                            std::to_string(d));
      }
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x.head(static_cast<Eigen::Index>(s))
          .setConstant(1.0 / std::sqrt(static_cast<double>(s)));
      return x;
    }
    case VectorKind::E1: {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x[0] = 1.0;
      return x;
    }
    case VectorKind::RandomUnit: {
      StreamRng rng(stream_seed(seed, "x"));
      return rng.unit_vector(n);
    }
  }
  throw ArgumentError("adversarial_vector: unknown vector kind");
}

FlattenDistribution flatten_tail(std::uint64_t d,
                                 const Eigen::Ref<const Eigen::VectorXd>& x,
                                 FlattenMode mode, std::uint64_t trials,
                                 std::uint64_t seed) {
  if (!is_power_of_two(d)) {
    throw DimensionError("flatten_tail: d " + std::to_string(d) +
                         " is not a power of two");
  }
  if (static_cast<std::uint64_t>(x.size()) != d) {
    throw DimensionError("flatten_tail: vector length " +
                         std::to_string(x.size()) + " does not match d " +
                         std::to_string(d));
  }
  if (std::abs(x.norm() - 1.0) > 1e-9) {
    throw ArgumentError("flatten_tail: x must be a unit vector");
  }
  const double scale = std::pow(static_cast<double>(d), 0.25);
  const auto n = static_cast<Eigen::Index>(d);
  std::map<double, std::uint64_t> hist;
  Eigen::VectorXd w(n);

  FlattenDistribution dist;
  dist.mode = mode;
  dist.d = d;

  if (mode == FlattenMode::Exhaustive) {
    if (d > kMaxExhaustiveFlattenD) {
      throw ResourceError("flatten_tail: exhaustive enumeration supports d <= " +
                          std::to_string(kMaxExhaustiveFlattenD) + ", got " +
                          std::to_string(d));
    }
    const std::uint64_t patterns = std::uint64_t{1} << d;
    for (std::uint64_t p = 0; p < patterns; ++p) {
      for (Eigen::Index i = 0; i < n; ++i) {
        w[i] = (p >> i) & 1u ? -x[i] : x[i];
      }
      fwht_inplace<double>(w);
      ++hist[scale * l4_norm(w)];
    }
    dist.denominator = patterns;
  } else {
    if (trials == 0) {
      throw ArgumentError("flatten_tail: Monte Carlo mode needs trials >= 1");
    }
    const std::uint64_t stream = stream_seed(seed, "flatten-trial");
    for (std::uint64_t t = 0; t < trials; ++t) {
      StreamRng rng(substream_seed(stream, t));
      for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.sign() * x[i];
      fwht_inplace<double>(w);
      ++hist[scale * l4_norm(w)];
    }
    dist.denominator = trials;
  }

  dist.histogram.assign(hist.begin(), hist.end());
  return dist;
}

double flatten_exceed_probability(const FlattenDistribution& dist, double t) {
  if (dist.denominator == 0) {
    throw ArgumentError("flatten_exceed_probability: empty distribution");
  }
  std::uint64_t count = 0;
  for (const auto& [value, c] : dist.histogram) {
    if (value >= t) count += c;
  }
  return static_cast<double>(count) / static_cast<double>(dist.denominator);
}

void validate_t_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ArgumentError("t grid: must be nonempty");
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ArgumentError("t grid: thresholds must be positive");
    if (!(t > prev)) throw ArgumentError("t grid: must be strictly increasing");
    prev = t;
  }
}

std::vector<double> parse_t_grid(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string_view::npos ? c1 : c1 + 1);
  if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
    throw ArgumentError("t grid: expected start:stop:step, got '" +
                        std::string(spec) + "'");
  }
  const auto parse = [&](std::string_view part) {
    try {
      std::size_t used = 0;
      const std::string s(part);
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ArgumentError("t grid: cannot parse '" + std::string(part) +
                          "' as a number");
    }
  };
  const double start = parse(spec.substr(0, c1));
  const double stop = parse(spec.substr(c1 + 1, c2 - c1 - 1));
  const double step = parse(spec.substr(c2 + 1));
  if (!(start > 0.0) || !(step > 0.0) || !(stop > start)) {
    throw ArgumentError("t grid: need 0 < start < stop and step > 0");
  }
  std::vector<double> grid;
  for (std::uint64_t i = 0;; ++i) {
    const double t = start + static_cast<double>(i) * step;
    if (!(t < stop)) break;
    grid.push_back(t);
  }
  validate_t_grid(grid);
  return grid;
}

TailCurve tail_estimate(std::uint64_t d, std::uint64_t k, VectorKind kind,
                        const std::vector<double>& t_grid,
                        std::uint64_t trials, std::uint64_t seed,
                        unsigned threads) {
  validate_t_grid(t_grid);
  if (trials == 0) throw ArgumentError("tail_estimate: trials must be positive");
  if (threads == 0) throw ArgumentError("tail_estimate: threads must be positive");
  const CodeMatrix code = build_code_matrix(k, d);
  const Eigen::VectorXd x = adversarial_vector(kind, d, seed);
  const std::uint64_t trial_stream = stream_seed(seed, "tail-trial");

  const auto workers = std::min<std::uint64_t>(threads, trials);
  std::vector<std::vector<std::uint64_t>> local(
      workers, std::vector<std::uint64_t>(t_grid.size(), 0));
  auto run = [&](std::uint64_t w, std::uint64_t begin, std::uint64_t end) {
    TailKernel kernel(code, x);
    auto& counts = local[w];
    for (std::uint64_t t = begin; t < end; ++t) {
      const double dev = kernel.deviation(substream_seed(trial_stream, t));
      for (std::size_t g = 0; g < t_grid.size(); ++g) {
        if (dev > t_grid[g]) ++counts[g];
      }
    }
  };
  if (workers <= 1) {
    run(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run, w, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  TailCurve curve;
  curve.t_grid = t_grid;
  curve.exceed_counts.assign(t_grid.size(), 0);
  for (const auto& counts : local) {
    for (std::size_t g = 0; g < counts.size(); ++g) {
      curve.exceed_counts[g] += counts[g];
    }
  }
  curve.trials = trials;
  curve.config = {d, k, vector_kind_name(kind), seed};
  return curve;
}

TailCurve coordinate_tail_exact(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const std::vector<double>& t_grid) {
  validate_t_grid(t_grid);
  const auto d = static_cast<std::uint64_t>(x.size());
  if (d == 0) throw ArgumentError("coordinate_tail_exact: empty vector");
  if (d > kMaxExactCoordinateD) {
    throw ResourceError("coordinate_tail_exact: enumeration supports d <= " +
                        std::to_string(kMaxExactCoordinateD) + ", got " +
                        std::to_string(d));
  }

  // Meet in the middle: partial sums over the low and high halves of the
  // coordinates, then one pass over all pairs.
  const auto build = [&](std::uint64_t from, std::uint64_t count) {
    std::vector<double> sums{0.0};
    for (std::uint64_t i = 0; i < count; ++i) {
      const double c = x[static_cast<Eigen::Index>(from + i)];
      const std::size_t sz = sums.size();
      sums.resize(2 * sz);
      for (std::size_t p = 0; p < sz; ++p) {
        sums[sz + p] = sums[p] - c;
        sums[p] += c;
      }
    }
    return sums;
  };
  const std::uint64_t lo_bits = d / 2;
  const std::vector<double> lo = build(0, lo_bits);
  const std::vector<double> hi = build(lo_bits, d - lo_bits);

  // hist[i] counts sums whose absolute value exceeds exactly the first i
  // grid thresholds; suffix sums turn that into per-threshold counts.
  std::vector<std::uint64_t> hist(t_grid.size() + 1, 0);
  for (const double h : hi) {
    for (const double l : lo) {
      const double s = std::abs(h + l);
      const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), s);
      ++hist[static_cast<std::size_t>(it - t_grid.begin())];
    }
  }
  TailCurve curve;
  curve.t_grid = t_grid;
  curve.exceed_counts.assign(t_grid.size(), 0);
  std::uint64_t acc = 0;
  for (std::size_t g = t_grid.size(); g-- > 0;) {
    acc += hist[g + 1];
    curve.exceed_counts[g] = acc;
  }
  curve.trials = std::uint64_t{1} << d;
  curve.config = {d, 0, "coordinate", 0};
  return curve;
}

FittedConstants fit_tail_constants(const TailCurve& curve, TailModel model) {
  if (curve.t_grid.size() != curve.exceed_counts.size() ||
      curve.trials == 0) {
    throw ArgumentError("fit_tail_constants: malformed curve");
  }
  const double k = static_cast<double>(curve.config.k);
  if ((model == TailModel::SubGaussian || model == TailModel::MixedPower) &&
      curve.config.k == 0) {
    throw ArgumentError("fit_tail_constants: model needs a positive k");
  }
  const auto feature = [&](double t) {
    switch (model) {
      case TailModel::SubGaussian: return k * t * t;
      case TailModel::MixedPower:
        return std::pow(k, 2.0 / 3.0) * std::pow(t, 4.0 / 3.0);
      case TailModel::Quartic: return t * t * t * t;
    }
    throw ArgumentError("fit_tail_constants: unknown model");
  };

  const double trials = static_cast<double>(curve.trials);
  std::vector<double> fs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    const double p = static_cast<double>(curve.exceed_counts[i]) / trials;
    if (p <= 10.0 / trials || p >= 0.5) continue;  // too noisy or too blunt
    fs.push_back(feature(curve.t_grid[i]));
    ys.push_back(-std::log(p));
  }
  const auto n = static_cast<double>(fs.size());
  if (fs.size() < 3) {
    throw FitError("fit_tail_constants: only " + std::to_string(fs.size()) +
                   " usable grid points, need at least 3");
  }
  double sf = 0.0, sy = 0.0, sff = 0.0, sfy = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    sf += fs[i];
    sy += ys[i];
    sff += fs[i] * fs[i];
    sfy += fs[i] * ys[i];
  }
  const double det = n * sff - sf * sf;
  if (det == 0.0) {
    throw FitError("fit_tail_constants: degenerate feature column");
  }
  const double slope = (n * sfy - sf * sy) / det;
  const double intercept = (sy * sff - sf * sfy) / det;
  double rss = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double r = ys[i] - (slope * fs[i] + intercept);
    rss += r * r;
  }
  FittedConstants fit;
  fit.model = model;
  fit.amplitude = std::exp(-intercept);
  fit.exponent_coeff = slope;
  fit.residual_rms = std::sqrt(rss / n);
  fit.points_used = static_cast<int>(fs.size());
  return fit;
}

std::vector<BenchRow> bench_apply(const std::vector<std::uint64_t>& d_list,
                                  std::uint64_t k, std::uint64_t repetitions,
                                  std::uint64_t seed) {
  if (d_list.empty()) throw ArgumentError("bench_apply: empty dimension list");
  if (repetitions == 0) {
    throw ArgumentError("bench_apply: repetitions must be positive");
  }
  std::vector<BenchRow> rows;
  rows.reserve(d_list.size());
  for (const std::uint64_t d : d_list) {
    const FjltPlan p = plan(d, k, seed);
    StreamRng rng(stream_seed(seed, "bench-x"));
    const Eigen::VectorXd x = rng.unit_vector(static_cast<Eigen::Index>(d));
    FjltPlan::Workspace ws;
    Eigen::VectorXd out;
    apply_into(p, x, out, ws);  // warmup; also sizes the buffers
    apply_into(p, x, out, ws);
    std::vector<double> ns;
    ns.reserve(repetitions);
    for (std::uint64_t r = 0; r < repetitions; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      apply_into(p, x, out, ws);
      const auto t1 = std::chrono::steady_clock::now();
      ns.push_back(
          std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
    std::sort(ns.begin(), ns.end());
    const std::size_t mid = ns.size() / 2;
    const double median = ns.size() % 2 == 1
                              ? ns[mid]
                              : 0.5 * (ns[mid - 1] + ns[mid]);
    rows.push_back({d, k, median});
  }
  return rows;
}

NormStats embedding_norm_stats(std::uint64_t d, std::uint64_t k,
                               VectorKind kind, std::uint64_t trials,
                               std::uint64_t seed) {
  if (trials < 2) throw ArgumentError("embedding_norm_stats: trials must be >= 2");
  const CodeMatrix code = build_code_matrix(k, d);
  const Eigen::VectorXd x = adversarial_vector(kind, d, seed);
  const std::uint64_t trial_stream = stream_seed(seed, "tail-trial");
  TailKernel kernel(code, x);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double v = kernel.norm_sq(substream_seed(trial_stream, t));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), trials};
}

}  // namespace fjlt
