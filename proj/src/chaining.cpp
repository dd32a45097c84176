#include "fjlt/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "fjlt/errors.hpp"
#include "fjlt/rng.hpp"

namespace fjlt {

namespace {

/// ln(1 + 2^(j+1)) without overflowing for large j.
double log1p_pow2(int j) {
  const double e = static_cast<double>(j + 1);
  return e * std::numbers::ln2 + std::log1p(std::exp2(-e));
}

double ln_binomial(int n, int k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

CoveringModel CoveringModel::finite(std::uint64_t n) {
  if (n == 0) throw ArgumentError("covering model: finite set must be nonempty");
  CoveringModel m;
  m.kind_ = Kind::Finite;
  m.n_ = n;
  m.cap_a_ = std::log(static_cast<double>(n));
  m.cap_b_ = 0.0;
  return m;
}

CoveringModel CoveringModel::subspace(int dim) {
  if (dim < 1) throw ArgumentError("covering model: subspace dim must be >= 1");
  CoveringModel m;
  m.kind_ = Kind::Subspace;
  m.dim_ = dim;
  // ln(1 + 2^(j+1)) <= (j+2) ln 2
  m.cap_a_ = 2.0 * dim * std::numbers::ln2;
  m.cap_b_ = dim * std::numbers::ln2;
  return m;
}

CoveringModel CoveringModel::sparse(int ambient_dim, int nnz) {
  if (ambient_dim < 1 || nnz < 1 || nnz > ambient_dim) {
    throw ArgumentError("covering model: sparse needs 1 <= nnz <= ambient dim");
  }
  CoveringModel m;
  m.kind_ = Kind::Sparse;
  m.ambient_ = ambient_dim;
  m.nnz_ = nnz;
  m.ln_binom_ = ln_binomial(ambient_dim, nnz);
  m.cap_a_ = m.ln_binom_ + 2.0 * nnz * std::numbers::ln2;
  m.cap_b_ = nnz * std::numbers::ln2;
  return m;
}

CoveringModel CoveringModel::explicit_table(std::vector<double> ln_cover) {
  if (ln_cover.empty()) {
    throw ArgumentError("covering model: explicit table must be nonempty");
  }
  double prev = 0.0;
  bool first = true;
  for (double v : ln_cover) {
    if (!(v >= 0.0)) {
      throw ArgumentError("covering model: log covering numbers must be >= 0");
    }
    if (!first && v < prev) {
      throw ArgumentError(
          "covering model: log covering numbers cannot decrease with scale");
    }
    prev = v;
    first = false;
  }
  CoveringModel m;
  m.kind_ = Kind::Explicit;
  m.table_ = std::move(ln_cover);
  return m;
}

double covering_log(const CoveringModel& model, int j) {
  if (j < 0) throw ArgumentError("covering_log: scale index must be >= 0");
  switch (model.kind()) {
    case CoveringModel::Kind::Finite:
      return std::log(static_cast<double>(model.points()));
    case CoveringModel::Kind::Subspace:
      return model.dim() * log1p_pow2(j);
    case CoveringModel::Kind::Sparse:
      return ln_binomial(model.ambient_dim(), model.nnz()) +
             model.nnz() * log1p_pow2(j);
    case CoveringModel::Kind::Explicit: {
      const auto& table = model.table();
      if (static_cast<std::size_t>(j) >= table.size()) {
        throw RangeError("covering_log: scale index " + std::to_string(j) +
                         " past the explicit table (size " +
                         std::to_string(table.size()) + ")");
      }
      return table[static_cast<std::size_t>(j)];
    }
  }
  throw ArgumentError("covering_log: unknown model kind");
}

ChainSeries chain_series(const CoveringModel& model, double tol,
                         std::optional<int> max_terms) {
  if (!(tol > 0.0)) throw ArgumentError("chain_series: tol must be positive");
  if (max_terms && *max_terms < 1) {
    throw ArgumentError("chain_series: max_terms must be >= 1");
  }
  if (!max_terms && !model.has_growth_cap()) {
    throw ArgumentError(
        "chain_series: explicit covering tables have no growth cap, so the "
        "truncation error cannot be certified; pass max_terms");
  }
  ChainSeries out;
  for (int j = 0;; ++j) {
    if (max_terms && j >= *max_terms) break;
    const double term = std::exp2(-j) * std::pow(covering_log(model, j), 0.75);
    out.value += term;
    out.terms = j + 1;
    if (max_terms) continue;
    // Remainder certificate from ln N_i <= A + B i:
    //   sum_{i > j} 2^-i (A + B i)^(3/4)
    //     <= 2^-j (A + B j)^(3/4) (1 + 2B / (A + B j)).
    const double a = model.cap_offset();
    const double b = model.cap_slope();
    const double base = a + b * static_cast<double>(j);
    if (base <= 0.0) {
      if (b == 0.0) break;  // the whole series is identically zero
      continue;
    }
    const double tail = std::exp2(-j) * std::pow(base, 0.75) * (1.0 + 2.0 * b / base);
    if (out.value > 0.0 && tail <= tol * out.value) break;
    if (j > 4000) {
      throw ArgumentError("chain_series: tolerance unreachably small");
    }
  }
  return out;
}

ChainingResult chain_dimension(const ChainingRequest& request) {
  if (!(request.eps > 0.0 && request.eps < 1.0)) {
    throw ArgumentError("chain_dimension: eps must be in (0, 1)");
  }
  if (!(request.p > 0.0 && request.p < 1.0)) {
    throw ArgumentError("chain_dimension: p must be in (0, 1)");
  }
  if (!(request.C > 0.0)) {
    throw ArgumentError("chain_dimension: C must be positive");
  }
  if (!(request.tol > 0.0)) {
    throw ArgumentError("chain_dimension: tol must be positive");
  }
  ChainingResult result;
  double series = 0.0;
  if (request.model.kind() == CoveringModel::Kind::Finite &&
      !request.max_terms) {
    // Constant covering numbers sum in closed form: 2 (ln n)^(3/4).
    series = 2.0 * std::pow(std::log(static_cast<double>(request.model.points())),
                            0.75);
    result.series_terms = 0;
  } else {
    const ChainSeries s =
        chain_series(request.model, request.tol, request.max_terms);
    series = s.value;
    result.series_terms = s.terms;
  }
  const double lead = std::pow(-std::log(request.p), 0.75);
  const double sum = lead + series;
  const double pre_ceil =
      request.C / std::pow(request.eps, 4.0) * sum * sum;
  if (!(pre_ceil < 9.0e18)) {
    throw ArgumentError("chain_dimension: result overflows a 64-bit count");
  }
  result.series = series;
  result.pre_ceil = pre_ceil;
  result.k = static_cast<std::uint64_t>(std::ceil(pre_ceil));
  if (result.k == 0) result.k = 1;
  return result;
}

GaussianWidthEstimate gaussian_width_mc(
    const Eigen::Ref<const RowMatrixXd>& points, std::uint64_t trials,
    std::uint64_t seed, unsigned threads) {
  if (points.rows() < 1) {
    throw ArgumentError("gaussian_width_mc: point set is empty");
  }
  if (trials < 2) {
    throw ArgumentError("gaussian_width_mc: trials must be >= 2");
  }
  if (threads == 0) {
    throw ArgumentError("gaussian_width_mc: threads must be positive");
  }
  const Eigen::Index dim = points.cols();
  const std::uint64_t trial_stream = stream_seed(seed, "width-trial");
  // Per-trial values land in their own slots and are reduced in trial
  // order afterwards, so the estimate does not depend on the partition.
  std::vector<double> values(trials, 0.0);
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    Eigen::VectorXd g(dim);
    for (std::uint64_t t = begin; t < end; ++t) {
      StreamRng rng(substream_seed(trial_stream, t));
      for (Eigen::Index i = 0; i < dim; ++i) g[i] = rng.gaussian();
      values[t] = (points * g).maxCoeff();
    }
  };
  if (workers <= 1) {
    run(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), trials, workers};
}

}  // namespace fjlt
