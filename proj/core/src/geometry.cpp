#include "uosdiff/geometry.hpp"

#include <string>

#include "uosdiff/error.hpp"

namespace uosdiff {
namespace {

void check_dim(const Subspace& s, const Vector& x) {
  if (x.size() != s.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "vector of size " + std::to_string(x.size()) +
                                                  " against subspace in R^" + std::to_string(s.ambient_dim()));
}

}  // namespace

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  const auto d = basis_.rows();
  const auto k = basis_.cols();
  if (k < 1 || k > d) throw Error(ErrorKind::InvalidDims, "basis must be d x k with 1 <= k <= d");
  const Matrix gram = basis_.transpose() * basis_;
  const double dev = (gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-12)) throw Error(ErrorKind::InvalidDims, "basis columns are not orthonormal");
}

Vector Subspace::coordinates(const Vector& x) const {
  check_dim(*this, x);
  return basis_.transpose() * x;
}

Vector Subspace::lift(const Vector& u) const {
  if (u.size() != intrinsic_dim()) throw Error(ErrorKind::DimensionMismatch, "tangent coordinate size mismatch");
  return basis_ * u;
}

Eigen::Index numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * sv[0]) ++r;
  return r;
}

Subspace orthonormalize(const Matrix& vectors, double rank_tol) {
  if (vectors.cols() == 0 || vectors.rows() == 0)
    throw Error(ErrorKind::AllZeroInput, "no vectors to orthonormalize");
  if (!(vectors.colwise().norm().maxCoeff() >= 1e-12))
    throw Error(ErrorKind::AllZeroInput, "every input vector is numerically zero");

  Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_tol * sv[0]) ++rank;

  // One Householder pass over the leading singular vectors restores
  // orthonormality to machine precision.
  Matrix leading = svd.matrixU().leftCols(rank);
  Eigen::HouseholderQR<Matrix> qr(leading);
  Matrix q = qr.householderQ() * Matrix::Identity(leading.rows(), rank);
  return Subspace(std::move(q));
}

Subspace orthonormalize(std::span<const Vector> vectors, double rank_tol) {
  if (vectors.empty()) throw Error(ErrorKind::AllZeroInput, "no vectors to orthonormalize");
  const auto d = vectors.front().size();
  Matrix m(d, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != d) throw Error(ErrorKind::DimensionMismatch, "vectors differ in dimension");
    m.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return orthonormalize(m, rank_tol);
}

Vector project(const Subspace& s, const Vector& x) {
  check_dim(s, x);
  return s.basis() * (s.basis().transpose() * x);
}

double residual_norm(const Subspace& s, const Vector& x) {
  check_dim(s, x);
  return (x - s.basis() * (s.basis().transpose() * x)).norm();
}

Subspace random_subspace(Eigen::Index d, Eigen::Index k, Rng& rng) {
  if (d < 1 || k < 1 || k > d)
    throw Error(ErrorKind::InvalidDims, "random_subspace needs 1 <= k <= d, got d=" + std::to_string(d) +
                                            " k=" + std::to_string(k));
  const Matrix g = rng.normal_matrix(d, k);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  return Subspace(std::move(q));
}

double projector_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "subspaces live in different ambient spaces");
  return (a.projector() - b.projector()).cwiseAbs().maxCoeff();
}

bool same_subspace(const Subspace& a, const Subspace& b, double tol) {
  return projector_distance(a, b) <= tol;
}

}  // namespace uosdiff
