#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fjlt/code_matrix.hpp"
#include "fjlt/types.hpp"

namespace fjlt {

/// A realized +-1 diagonal together with the seed and stream label it was
/// drawn from, so it can be regenerated instead of stored.
struct SignVector {
  Eigen::VectorXd signs;
  std::uint64_t master_seed = 0;
  std::string stream_label;

  static SignVector generate(std::uint64_t master_seed, std::string_view label,
                             Eigen::Index d);

  bool operator==(const SignVector& other) const;
};

/// A fully determined transform A = B D H D': the implicit code matrix B,
/// the orthonormal Walsh-Hadamard transform H, and two independent sign
/// diagonals D ("D") and D' ("Dprime") derived from the master seed. Equal
/// (d, k, seed) triples give bit-identical plans on every platform.
class FjltPlan {
 public:
  std::uint64_t dim() const noexcept { return d_; }
  std::uint64_t out_dim() const noexcept { return k_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const CodeMatrix& code() const noexcept { return code_; }
  const SignVector& d_signs() const noexcept { return d_signs_; }
  const SignVector& dprime_signs() const noexcept { return dprime_signs_; }

  bool operator==(const FjltPlan& other) const;

  /// Reusable buffers for apply_into; embedding a stream of vectors through
  /// one workspace performs no allocation after the first call.
  struct Workspace {
    Eigen::VectorXd h_buf;
    Eigen::VectorXd code_scratch;
  };

 private:
  FjltPlan(std::uint64_t d, std::uint64_t k, std::uint64_t seed,
           CodeMatrix code, SignVector d_signs, SignVector dprime_signs);

  std::uint64_t d_;
  std::uint64_t k_;
  std::uint64_t seed_;
  CodeMatrix code_;
  SignVector d_signs_;
  SignVector dprime_signs_;

  friend FjltPlan plan(std::uint64_t d, std::uint64_t k, std::uint64_t seed);
};

/// Build the plan for input dimension d (a power of two), output dimension
/// k, and the given master seed. Rejects widths below the code matrix
/// minimum with an InfeasibleError naming the smallest admissible d.
FjltPlan plan(std::uint64_t d, std::uint64_t k, std::uint64_t seed);

/// x -> A x in O(d log d) time and O(d) scratch.
Eigen::VectorXd apply(const FjltPlan& p,
                      const Eigen::Ref<const Eigen::VectorXd>& x);

/// Same map with caller-owned output and workspace; no allocation once the
/// workspace is warm.
void apply_into(const FjltPlan& p, const Eigen::Ref<const Eigen::VectorXd>& x,
                Eigen::VectorXd& out, FjltPlan::Workspace& ws);

/// Embed each row of X (n x d) into k dimensions. Rows are independent, so
/// threads > 1 just partitions them; the result is identical for every
/// thread count.
RowMatrixXd embed_set(const FjltPlan& p,
                      const Eigen::Ref<const RowMatrixXd>& x,
                      unsigned threads = 1);

/// Outcome of a pairwise distortion audit of an embedding Y of X.
struct DistortionReport {
  /// Pairs with nonzero source distance that entered the maximum.
  std::uint64_t pairs = 0;
  /// Pairs whose source points coincide; skipped, but their images must
  /// coincide too or the report fails.
  std::uint64_t zero_pairs = 0;
  double max_distortion = 0.0;
  /// Row indices achieving the maximum, or -1 when no pair qualifies.
  std::int64_t worst_i = -1;
  std::int64_t worst_j = -1;
  double epsilon = 0.0;
  bool pass = true;
};

/// Max over distinct row pairs of |  ||Y_i - Y_j||^2 / ||X_i - X_j||^2 - 1 |,
/// i.e. relative squared-distance distortion. pass iff the max is <= eps and
/// no coincident pair gained a positive image distance. eps must be in (0,1).
DistortionReport check_jl(const Eigen::Ref<const RowMatrixXd>& x,
                          const Eigen::Ref<const RowMatrixXd>& y, double eps);

/// Fixed 37-byte little-endian encoding of a plan: magic "FJLT", version
/// byte 1, then d, k (u64), field bits m, field modulus (u32), master seed
/// (u64). Sign vectors are regenerated from the seed on load, never stored.
std::vector<std::uint8_t> serialize_plan(const FjltPlan& p);

/// Inverse of serialize_plan. Rejects bad magic, unknown versions, truncated
/// or oversized buffers, and field parameters inconsistent with k.
FjltPlan deserialize_plan(const std::vector<std::uint8_t>& bytes);

void save_plan(const std::filesystem::path& path, const FjltPlan& p);
FjltPlan load_plan(const std::filesystem::path& path);

}  // namespace fjlt
