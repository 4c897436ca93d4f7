#pragma once

#include <span>

#include "uosdiff/random.hpp"
#include "uosdiff/types.hpp"

namespace uosdiff {

/// Relative singular-value cutoff used for numerical rank decisions.
inline constexpr double kRankTol = 1e-8;

/// Max-entry projector distance below which two subspaces are the same.
inline constexpr double kSubspaceEqualTol = 1e-8;

/// A linear subspace of R^d held through an orthonormal basis (d x k).
class Subspace {
 public:
  /// Wraps `basis`, whose columns must already be orthonormal to within 1e-12
  /// entrywise. Throws InvalidDims otherwise.
  explicit Subspace(Matrix basis);

  Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
  Eigen::Index intrinsic_dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

  /// Tangent coordinates A^T x.
  Vector coordinates(const Vector& x) const;
  /// A u for tangent coordinates u.
  Vector lift(const Vector& u) const;
  /// Orthogonal projector A A^T as a dense matrix.
  Matrix projector() const { return basis_ * basis_.transpose(); }

 private:
  Matrix basis_;
};

/// Numerical rank of `m`: number of singular values above rel_tol times the
/// largest one. Zero for an all-zero matrix.
Eigen::Index numerical_rank(const Matrix& m, double rel_tol = kRankTol);

/// Orthonormal basis for the span of the columns of `vectors`.
/// Throws AllZeroInput if every column has norm below 1e-12.
Subspace orthonormalize(const Matrix& vectors, double rank_tol = kRankTol);
Subspace orthonormalize(std::span<const Vector> vectors, double rank_tol = kRankTol);

/// A A^T x. Throws DimensionMismatch.
Vector project(const Subspace& s, const Vector& x);

/// ||x - A A^T x||_2. Throws DimensionMismatch.
double residual_norm(const Subspace& s, const Vector& x);

/// Span of k i.i.d. standard Gaussian vectors in R^d, orthonormalized by
/// Householder QR. Throws InvalidDims unless 1 <= k <= d.
Subspace random_subspace(Eigen::Index d, Eigen::Index k, Rng& rng);

/// max_ij |(A1 A1^T - A2 A2^T)_ij|.
double projector_distance(const Subspace& a, const Subspace& b);

/// Basis-invariant equality: projector_distance <= tol.
bool same_subspace(const Subspace& a, const Subspace& b, double tol = kSubspaceEqualTol);

}  // namespace uosdiff
