#pragma once

#include <Eigen/Dense>

namespace fjlt {

/// Point sets are row-major n x d matrices: one point per row, rows
/// contiguous in memory, which is also the on-disk layout.
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace fjlt
