#include "fjlt/plan.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "fjlt/errors.hpp"
#include "fjlt/hadamard.hpp"
#include "fjlt/rng.hpp"

namespace fjlt {

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'J', 'L', 'T'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kPlanBytes = 4 + 1 + 8 + 8 + 4 + 4 + 8;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

SignVector SignVector::generate(std::uint64_t master_seed,
                                std::string_view label, Eigen::Index d) {
  StreamRng rng(stream_seed(master_seed, label));
  SignVector sv;
  sv.signs = rng.sign_vector(d);
  sv.master_seed = master_seed;
  sv.stream_label = std::string(label);
  return sv;
}

bool SignVector::operator==(const SignVector& other) const {
  return master_seed == other.master_seed &&
         stream_label == other.stream_label &&
         signs.size() == other.signs.size() && signs == other.signs;
}

FjltPlan::FjltPlan(std::uint64_t d, std::uint64_t k, std::uint64_t seed,
                   CodeMatrix code, SignVector d_signs, SignVector dprime_signs)
    : d_(d),
      k_(k),
      seed_(seed),
      code_(std::move(code)),
      d_signs_(std::move(d_signs)),
      dprime_signs_(std::move(dprime_signs)) {}

bool FjltPlan::operator==(const FjltPlan& other) const {
  return d_ == other.d_ && k_ == other.k_ && seed_ == other.seed_ &&
         d_signs_ == other.d_signs_ && dprime_signs_ == other.dprime_signs_;
}

FjltPlan plan(std::uint64_t d, std::uint64_t k, std::uint64_t seed) {
  if (!is_power_of_two(d)) {
    throw DimensionError("plan: d " + std::to_string(d) +
                         " is not a power of two");
  }
  CodeMatrix code = build_code_matrix(k, d);
  const auto n = static_cast<Eigen::Index>(d);
  return FjltPlan(d, k, seed, std::move(code),
                  SignVector::generate(seed, "D", n),
                  SignVector::generate(seed, "Dprime", n));
}

void apply_into(const FjltPlan& p, const Eigen::Ref<const Eigen::VectorXd>& x,
                Eigen::VectorXd& out, FjltPlan::Workspace& ws) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  if (x.size() != d) {
    throw DimensionError("apply: vector length " + std::to_string(x.size()) +
                         " does not match plan dimension " +
                         std::to_string(p.dim()));
  }
  if (!x.allFinite()) {
    throw ArgumentError("apply: input vector has non-finite entries");
  }
  ws.h_buf = x.cwiseProduct(p.dprime_signs().signs);
  fwht_inplace<double>(ws.h_buf);
  ws.h_buf.array() *= p.d_signs().signs.array();
  apply_code_matrix_into(p.code(), ws.h_buf, out, ws.code_scratch);
}

Eigen::VectorXd apply(const FjltPlan& p,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd out;
  FjltPlan::Workspace ws;
  apply_into(p, x, out, ws);
  return out;
}

RowMatrixXd embed_set(const FjltPlan& p,
                      const Eigen::Ref<const RowMatrixXd>& x,
                      unsigned threads) {
  if (threads == 0) throw ArgumentError("embed_set: threads must be positive");
  if (static_cast<std::uint64_t>(x.cols()) != p.dim()) {
    throw DimensionError("embed_set: point dimension " +
                         std::to_string(x.cols()) +
                         " does not match plan dimension " +
                         std::to_string(p.dim()));
  }
  const Eigen::Index n = x.rows();
  RowMatrixXd y(n, static_cast<Eigen::Index>(p.out_dim()));
  auto run = [&](Eigen::Index begin, Eigen::Index end) {
    FjltPlan::Workspace ws;
    Eigen::VectorXd out;
    for (Eigen::Index i = begin; i < end; ++i) {
      apply_into(p, x.row(i).transpose(), out, ws);
      y.row(i) = out.transpose();
    }
  };
  const auto workers =
      static_cast<Eigen::Index>(std::min<std::uint64_t>(threads, n > 0 ? n : 1));
  if (workers <= 1) {
    run(0, n);
    return y;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Eigen::Index chunk = (n + workers - 1) / workers;
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(run, begin, end);
  }
  for (auto& t : pool) t.join();
  return y;
}

DistortionReport check_jl(const Eigen::Ref<const RowMatrixXd>& x,
                          const Eigen::Ref<const RowMatrixXd>& y, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ArgumentError("check_jl: eps must be in (0, 1)");
  }
  if (x.rows() != y.rows()) {
    throw DimensionError("check_jl: point counts differ (" +
                         std::to_string(x.rows()) + " vs " +
                         std::to_string(y.rows()) + ")");
  }
  DistortionReport report;
  report.epsilon = eps;
  const Eigen::Index n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx2 = (x.row(i) - x.row(j)).squaredNorm();
      const double dy2 = (y.row(i) - y.row(j)).squaredNorm();
      if (dx2 == 0.0) {
        ++report.zero_pairs;
        if (dy2 != 0.0) {
          // A coincident pair that separates has unbounded distortion.
          report.max_distortion = std::numeric_limits<double>::infinity();
          report.worst_i = i;
          report.worst_j = j;
        }
        continue;
      }
      ++report.pairs;
      const double distortion = std::abs(dy2 / dx2 - 1.0);
      if (distortion > report.max_distortion) {
        report.max_distortion = distortion;
        report.worst_i = i;
        report.worst_j = j;
      }
    }
  }
  report.pass = report.max_distortion <= eps;
  return report;
}

std::vector<std::uint8_t> serialize_plan(const FjltPlan& p) {
  std::vector<std::uint8_t> out;
  out.reserve(kPlanBytes);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  put_u64(out, p.dim());
  put_u64(out, p.out_dim());
  put_u32(out, static_cast<std::uint32_t>(p.code().field_bits()));
  put_u32(out, p.code().field().modulus());
  put_u64(out, p.seed());
  return out;
}

FjltPlan deserialize_plan(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() != kPlanBytes) {
    throw FormatError("plan: expected " + std::to_string(kPlanBytes) +
                      " bytes, got " + std::to_string(bytes.size()));
  }
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("plan: bad magic");
  }
  if (bytes[4] != kVersion) {
    throw FormatError("plan: unsupported version " + std::to_string(bytes[4]));
  }
  const std::uint64_t d = get_u64(bytes.data() + 5);
  const std::uint64_t k = get_u64(bytes.data() + 13);
  const std::uint32_t m = get_u32(bytes.data() + 21);
  const std::uint32_t modulus = get_u32(bytes.data() + 25);
  const std::uint64_t seed = get_u64(bytes.data() + 29);
  FjltPlan p = [&] {
    try {
      return plan(d, k, seed);
    } catch (const Error& e) {
      throw FormatError(std::string("plan: stored parameters invalid: ") +
                        e.what());
    }
  }();
  if (static_cast<std::uint32_t>(p.code().field_bits()) != m ||
      p.code().field().modulus() != modulus) {
    throw FormatError("plan: stored field parameters (m " + std::to_string(m) +
                      ", modulus " + std::to_string(modulus) +
                      ") do not match k " + std::to_string(k));
  }
  return p;
}

void save_plan(const std::filesystem::path& path, const FjltPlan& p) {
  const std::vector<std::uint8_t> bytes = serialize_plan(p);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("plan: cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("plan: short write to " + path.string());
}

FjltPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("plan: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_plan(bytes);
}

}  // namespace fjlt
