#pragma once

#include <functional>

#include <Eigen/Dense>

namespace uosdiff {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A set of points in R^d stored one point per column.
using PointSet = Eigen::MatrixXd;

/// Score field (t, x) -> grad log p_t(x). Implementations must tolerate
/// concurrent calls.
using ScoreFn = std::function<Vector(double, const Vector&)>;

}  // namespace uosdiff
