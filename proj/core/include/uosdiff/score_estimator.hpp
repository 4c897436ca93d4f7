#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "uosdiff/geometry.hpp"
#include "uosdiff/subspace_recovery.hpp"
#include "uosdiff/types.hpp"

namespace uosdiff {

struct EstimatorOptions {
  /// Radius constant of the tube G_t(i) around each subspace.
  double c_r = 2.0;
  /// Zero the low-dimensional score where the kernel density is below eta_t.
  bool thresholding = true;
  /// Cap the low-dimensional score norm at sqrt(2 log N / t).
  bool clipping = true;
  /// Zero the weight of component i outside G_t(i).
  bool tube_indicator = true;
};

struct KdeValue {
  double log_density = 0.0;
  Vector gradient_ratio;  // grad g / g
};

struct AmbientKde {
  double log_p = 0.0;
  Vector log_q;  // per component; -inf for components without samples
};

/// Kernel score estimator for a union of subspaces, built from classified
/// training samples. All quantities are for the VE process (p_t = p* * N(0, tI));
/// vp_score converts to the OU process.
///
/// Immutable after construction; every evaluation is const and thread-safe.
class TrainedScoreModel {
 public:
  /// `samples` is d x N, `labels[j]` the subspace index of column j. Every
  /// sample must lie on its subspace to within 1e-10 (1 + |x|).
  /// Throws InvalidArgument / DimensionMismatch.
  TrainedScoreModel(std::vector<Subspace> subspaces, const PointSet& samples, std::span<const int> labels,
                    EstimatorOptions options = {});

  /// Labels each sample with classify() against the recovered subspaces.
  static TrainedScoreModel from_recovery(const RecoveryResult& recovery, const PointSet& samples,
                                         EstimatorOptions options = {});

  Eigen::Index ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t component_count() const noexcept { return subspaces_.size(); }
  std::size_t total_count() const noexcept { return static_cast<std::size_t>(samples_.cols()); }
  std::size_t component_size(std::size_t i) const { return offsets_.at(i + 1) - offsets_.at(i); }
  const Subspace& subspace(std::size_t i) const { return subspaces_.at(i); }
  const EstimatorOptions& options() const noexcept { return options_; }
  /// Tangent coordinates of the samples of component i (k_i x N_i).
  const Matrix& low_dim_samples(std::size_t i) const { return low_dim_.at(i); }
  /// Training samples grouped by component (d x N); component i occupies
  /// columns [offset(i), offset(i + 1)).
  const PointSet& samples() const noexcept { return samples_; }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }

  /// Clip radius sqrt(2 log N / t).
  double clip_radius(double t) const;
  /// log eta_t = log(log N) - log N - (k_i / 2) log(2 pi t).
  double log_threshold(std::size_t i, double t) const;
  /// R_t(i) = C_R sqrt(t d max(log(N d t^{k_i/2}), 2)).
  double tube_radius(std::size_t i, double t) const;

  /// log g_t(i, u) and grad g / g for the Gaussian KDE in tangent coordinates.
  KdeValue low_dim_kde(std::size_t i, double t, const Vector& u) const;
  /// Thresholded, clipped low-dimensional score.
  Vector low_dim_score(std::size_t i, double t, const Vector& u) const;
  /// -(x - proj_i x)/t + A_i low_dim_score(A_i^T x).
  Vector component_score(std::size_t i, double t, const Vector& x) const;
  /// log p_hat_t(x) and log q_hat_t(i, x) from the ambient Gaussian KDE.
  AmbientKde ambient_kde(double t, const Vector& x) const;
  double weight(std::size_t i, double t, const Vector& x) const;
  Vector weights(double t, const Vector& x) const;
  /// sum_i w_hat(i) s_hat(i); zero-weight components are not evaluated.
  Vector full_score(double t, const Vector& x) const;
  /// (1/c_t) full_score(h(t), x / c_t).
  Vector vp_score(double t, const Vector& x) const;

  ScoreFn ve_score_fn() const;
  ScoreFn vp_score_fn() const;

  /// Flat little-endian binary layout, see README.
  void save(std::ostream& out) const;
  static TrainedScoreModel load(std::istream& in);

 private:
  void check_component(std::size_t i) const;

  Eigen::Index ambient_dim_ = 0;
  std::vector<Subspace> subspaces_;
  PointSet samples_;                 // grouped by component
  std::vector<std::size_t> offsets_;  // size M + 1
  std::vector<Matrix> low_dim_;
  EstimatorOptions options_;
};

/// Numerically stable log(sum(exp(v))); -inf for an empty or all -inf input.
double log_sum_exp(const Eigen::Ref<const Vector>& v);

}  // namespace uosdiff
