#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fjlt/experiments.hpp"
#include "fjlt/types.hpp"

namespace fjlt {

/// Point sets on disk are raw row-major little-endian f64 with a plain-text
/// sidecar `<path>.desc` of key=value lines:
///
///   n=100
///   d=8192
///   dtype=f64le
///
/// The data file must be exactly n * d * 8 bytes.
RowMatrixXd read_pointset(const std::filesystem::path& data_path);

/// Write the matrix and its sidecar. Overwrites both files.
void write_pointset(const std::filesystem::path& data_path,
                    const Eigen::Ref<const RowMatrixXd>& x);

/// Shortest round-trippable decimal form (17 significant digits).
std::string format_double(double v);

/// CSV schemas, one row per grid point / histogram bin / dimension:
///   tail:    t,count,trials,p_hat
///   flatten: value,count,denominator
///   bench:   d,k,median_ns
/// All floating-point fields use format_double, so identical inputs produce
/// byte-identical files.
void write_tail_csv(const std::filesystem::path& path, const TailCurve& curve);
void write_flatten_csv(const std::filesystem::path& path,
                       const FlattenDistribution& dist);
void write_bench_csv(const std::filesystem::path& path,
                     const std::vector<BenchRow>& rows);

}  // namespace fjlt
