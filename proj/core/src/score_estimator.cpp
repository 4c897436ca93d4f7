#include "uosdiff/score_estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "uosdiff/diffusion_clock.hpp"
#include "uosdiff/error.hpp"

namespace uosdiff {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Squared distances from `x` to every column of `points`.
Vector squared_distances(const Eigen::Ref<const Matrix>& points, const Vector& x) {
  return (points.colwise() - x).colwise().squaredNorm().transpose();
}

}  // namespace

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  if (v.size() == 0) return kNegInf;
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

TrainedScoreModel::TrainedScoreModel(std::vector<Subspace> subspaces, const PointSet& samples,
                                     std::span<const int> labels, EstimatorOptions options)
    : subspaces_(std::move(subspaces)), options_(options) {
  if (subspaces_.empty()) throw Error(ErrorKind::InvalidArgument, "score model needs at least one subspace");
  if (samples.cols() < 1) throw Error(ErrorKind::InvalidArgument, "score model needs training samples");
  if (static_cast<std::size_t>(samples.cols()) != labels.size())
    throw Error(ErrorKind::SizeMismatch, "one label per training sample required");
  if (!(options_.c_r > 0.0)) throw Error(ErrorKind::InvalidArgument, "C_R must be positive");
  ambient_dim_ = subspaces_.front().ambient_dim();
  if (samples.rows() != ambient_dim_) throw Error(ErrorKind::DimensionMismatch, "samples do not match subspaces");
  for (const auto& s : subspaces_)
    if (s.ambient_dim() != ambient_dim_) throw Error(ErrorKind::DimensionMismatch, "subspaces differ in ambient dim");

  const std::size_t m = subspaces_.size();
  std::vector<std::size_t> counts(m, 0);
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= m)
      throw Error(ErrorKind::InvalidArgument, "label out of range: " + std::to_string(label));
    ++counts[static_cast<std::size_t>(label)];
  }
  offsets_.assign(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) offsets_[i + 1] = offsets_[i] + counts[i];

  samples_.resize(ambient_dim_, samples.cols());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const auto i = static_cast<std::size_t>(labels[static_cast<std::size_t>(j)]);
    samples_.col(static_cast<Eigen::Index>(cursor[i]++)) = samples.col(j);
  }

  low_dim_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto begin = static_cast<Eigen::Index>(offsets_[i]);
    const auto count = static_cast<Eigen::Index>(counts[i]);
    const Matrix& basis = subspaces_[i].basis();
    low_dim_[i] = basis.transpose() * samples_.middleCols(begin, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      const double err = (basis * low_dim_[i].col(j) - samples_.col(begin + j)).norm();
      if (err > 1e-10 * (1.0 + samples_.col(begin + j).norm()))
        throw Error(ErrorKind::InvalidArgument, "training sample does not lie on its labeled subspace");
    }
  }
}

TrainedScoreModel TrainedScoreModel::from_recovery(const RecoveryResult& recovery, const PointSet& samples,
                                                   EstimatorOptions options) {
  const std::vector<int> labels = classify_all(recovery, samples);
  return TrainedScoreModel(recovery.subspaces, samples, labels, options);
}

void TrainedScoreModel::check_component(std::size_t i) const {
  if (i >= subspaces_.size()) throw Error(ErrorKind::InvalidArgument, "component index out of range");
}

double TrainedScoreModel::clip_radius(double t) const {
  detail::require_positive_time(t);
  return std::sqrt(2.0 * std::log(static_cast<double>(total_count())) / t);
}

double TrainedScoreModel::log_threshold(std::size_t i, double t) const {
  detail::require_positive_time(t);
  check_component(i);
  const double n = static_cast<double>(total_count());
  const double k = static_cast<double>(subspaces_[i].intrinsic_dim());
  return std::log(std::log(n)) - std::log(n) - 0.5 * k * (kLog2Pi + std::log(t));
}

double TrainedScoreModel::tube_radius(std::size_t i, double t) const {
  detail::require_positive_time(t);
  check_component(i);
  const double n = static_cast<double>(total_count());
  const double d = static_cast<double>(ambient_dim_);
  const double k = static_cast<double>(subspaces_[i].intrinsic_dim());
  const double log_arg = std::log(n) + std::log(d) + 0.5 * k * std::log(t);
  return options_.c_r * std::sqrt(t * d * std::max(log_arg, 2.0));
}

KdeValue TrainedScoreModel::low_dim_kde(std::size_t i, double t, const Vector& u) const {
  detail::require_positive_time(t);
  check_component(i);
  const Matrix& pts = low_dim_[i];
  if (pts.cols() == 0) throw Error(ErrorKind::EmptyComponent, "component " + std::to_string(i) + " has no samples");
  if (u.size() != pts.rows()) throw Error(ErrorKind::DimensionMismatch, "tangent coordinate size mismatch");

  Vector resp = squared_distances(pts, u) * (-0.5 / t);
  const double peak = resp.maxCoeff();
  resp = (resp.array() - peak).exp();
  const double total = resp.sum();
  const double lse = peak + std::log(total);
  resp /= total;
  const double k = static_cast<double>(pts.rows());

  KdeValue out;
  out.log_density = lse - std::log(static_cast<double>(pts.cols())) - 0.5 * k * (kLog2Pi + std::log(t));
  // sum_j r_j (u_j - u) / t with sum_j r_j = 1 up to rounding.
  out.gradient_ratio = (pts * resp - resp.sum() * u) / t;
  return out;
}

Vector TrainedScoreModel::low_dim_score(std::size_t i, double t, const Vector& u) const {
  if (total_count() < 2) throw Error(ErrorKind::InvalidArgument, "low-dimensional score needs N >= 2");
  KdeValue kde = low_dim_kde(i, t, u);
  if (options_.thresholding && kde.log_density < log_threshold(i, t)) return Vector::Zero(u.size());
  if (!options_.clipping) return std::move(kde.gradient_ratio);

  const double radius = clip_radius(t);
  Vector z = std::move(kde.gradient_ratio);
  const double norm = z.norm();
  if (norm <= radius) return z;
  // Rescale, then step the factor down until the rounded norm obeys the cap.
  double scale = radius / norm;
  Vector clipped = z * scale;
  while (clipped.norm() > radius) {
    scale = std::nextafter(scale, 0.0);
    clipped = z * scale;
  }
  return clipped;
}

Vector TrainedScoreModel::component_score(std::size_t i, double t, const Vector& x) const {
  check_component(i);
  if (x.size() != ambient_dim_) throw Error(ErrorKind::DimensionMismatch, "query point dimension");
  const Matrix& basis = subspaces_[i].basis();
  const Vector u = basis.transpose() * x;
  const Vector normal = x - basis * u;
  return -normal / t + basis * low_dim_score(i, t, u);
}

AmbientKde TrainedScoreModel::ambient_kde(double t, const Vector& x) const {
  detail::require_positive_time(t);
  if (x.size() != ambient_dim_) throw Error(ErrorKind::DimensionMismatch, "query point dimension");
  const Vector expo = squared_distances(samples_, x) * (-0.5 / t);
  const double norm_const =
      std::log(static_cast<double>(total_count())) + 0.5 * static_cast<double>(ambient_dim_) * (kLog2Pi + std::log(t));

  AmbientKde out;
  out.log_q.resize(static_cast<Eigen::Index>(subspaces_.size()));
  for (std::size_t i = 0; i < subspaces_.size(); ++i) {
    const auto begin = static_cast<Eigen::Index>(offsets_[i]);
    const auto count = static_cast<Eigen::Index>(offsets_[i + 1] - offsets_[i]);
    out.log_q[static_cast<Eigen::Index>(i)] = log_sum_exp(expo.segment(begin, count)) - norm_const;
  }
  // The label blocks partition the samples, so p_hat is the sum of the q_hat.
  out.log_p = log_sum_exp(out.log_q);
  return out;
}

Vector TrainedScoreModel::weights(double t, const Vector& x) const {
  const AmbientKde kde = ambient_kde(t, x);
  Vector w = Vector::Zero(static_cast<Eigen::Index>(subspaces_.size()));
  for (std::size_t i = 0; i < subspaces_.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (options_.tube_indicator && residual_norm(subspaces_[i], x) > tube_radius(i, t)) continue;
    if (!std::isfinite(kde.log_q[ii])) continue;
    w[ii] = std::min(1.0, std::exp(kde.log_q[ii] - kde.log_p));
  }
  return w;
}

double TrainedScoreModel::weight(std::size_t i, double t, const Vector& x) const {
  check_component(i);
  return weights(t, x)[static_cast<Eigen::Index>(i)];
}

Vector TrainedScoreModel::full_score(double t, const Vector& x) const {
  const Vector w = weights(t, x);
  Vector score = Vector::Zero(ambient_dim_);
  for (std::size_t i = 0; i < subspaces_.size(); ++i) {
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi > 0.0) score += wi * component_score(i, t, x);
  }
  return score;
}

ScoreFn TrainedScoreModel::ve_score_fn() const {
  return [this](double t, const Vector& x) { return full_score(t, x); };
}

Vector TrainedScoreModel::vp_score(double t, const Vector& x) const { return vp_score_from_ve(ve_score_fn(), t, x); }

ScoreFn TrainedScoreModel::vp_score_fn() const {
  return [this](double t, const Vector& x) { return vp_score(t, x); };
}

// ---------------------------------------------------------------------------
// Binary layout (all fields little-endian):
//   char[4] "UOSM", u64 version = 1
//   u64 d, u64 M, u64 N, then M x (u64 k_i, u64 N_i)
//   f64 C_R, u64 flags (bit0 thresholding, bit1 clipping, bit2 tube)
//   M bases, column-major d x k_i f64
//   N samples grouped by component, d f64 each
// ---------------------------------------------------------------------------
namespace {

constexpr char kMagic[4] = {'U', 'O', 'S', 'M'};
constexpr std::uint64_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(v >> (8 * b));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw Error(ErrorKind::IoError, "truncated model file");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void TrainedScoreModel::save(std::ostream& out) const {
  out.write(kMagic, 4);
  put_u64(out, kVersion);
  put_u64(out, static_cast<std::uint64_t>(ambient_dim_));
  put_u64(out, subspaces_.size());
  put_u64(out, total_count());
  for (std::size_t i = 0; i < subspaces_.size(); ++i) {
    put_u64(out, static_cast<std::uint64_t>(subspaces_[i].intrinsic_dim()));
    put_u64(out, component_size(i));
  }
  put_f64(out, options_.c_r);
  put_u64(out, (options_.thresholding ? 1u : 0u) | (options_.clipping ? 2u : 0u) | (options_.tube_indicator ? 4u : 0u));
  for (const auto& s : subspaces_)
    for (Eigen::Index v = 0; v < s.basis().size(); ++v) put_f64(out, s.basis().data()[v]);
  for (Eigen::Index v = 0; v < samples_.size(); ++v) put_f64(out, samples_.data()[v]);
  if (!out) throw Error(ErrorKind::IoError, "failed to write model");
}

TrainedScoreModel TrainedScoreModel::load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(ErrorKind::IoError, "not a score model file");
  if (get_u64(in) != kVersion) throw Error(ErrorKind::IoError, "unsupported model file version");
  const auto d = static_cast<Eigen::Index>(get_u64(in));
  const auto m = static_cast<std::size_t>(get_u64(in));
  const auto n = static_cast<Eigen::Index>(get_u64(in));
  if (d < 1 || m < 1 || n < 1 || m > (1u << 20) || d > (1 << 20))
    throw Error(ErrorKind::IoError, "implausible model header");
  std::vector<Eigen::Index> dims(m);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < m; ++i) {
    dims[i] = static_cast<Eigen::Index>(get_u64(in));
    const auto count = get_u64(in);
    if (count > static_cast<std::uint64_t>(n) - labels.size())
      throw Error(ErrorKind::IoError, "component sizes do not sum to N");
    labels.insert(labels.end(), count, static_cast<int>(i));
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) throw Error(ErrorKind::IoError, "component sizes do not sum to N");

  EstimatorOptions options;
  options.c_r = get_f64(in);
  const auto flags = get_u64(in);
  options.thresholding = flags & 1u;
  options.clipping = flags & 2u;
  options.tube_indicator = flags & 4u;

  std::vector<Subspace> subspaces;
  for (std::size_t i = 0; i < m; ++i) {
    Matrix basis(d, dims[i]);
    for (Eigen::Index v = 0; v < basis.size(); ++v) basis.data()[v] = get_f64(in);
    subspaces.emplace_back(std::move(basis));
  }
  PointSet samples(d, n);
  for (Eigen::Index v = 0; v < samples.size(); ++v) samples.data()[v] = get_f64(in);
  return TrainedScoreModel(std::move(subspaces), samples, labels, options);
}

}  // namespace uosdiff
