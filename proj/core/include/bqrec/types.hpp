#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace bqrec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative singular-value threshold used for every rank decision unless the
/// caller overrides it.
inline constexpr double kDefaultRankTolerance = 1e-10;

}  // namespace bqrec
