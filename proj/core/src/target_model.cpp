#include "uosdiff/target_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uosdiff/error.hpp"

namespace uosdiff {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Matrix symmetric_sqrt(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

void validate_term(const GaussianTerm& term, Eigen::Index k) {
  if (!(term.weight > 0.0)) throw Error(ErrorKind::InvalidArgument, "mixture weights must be positive");
  if (term.mean.size() != k || term.covariance.rows() != k || term.covariance.cols() != k)
    throw Error(ErrorKind::InvalidDims, "mixture term does not match intrinsic dimension");
  if ((term.covariance - term.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(term.covariance, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) throw Error(ErrorKind::InvalidArgument, "covariance is not PSD");
}

}  // namespace

UoSTarget::UoSTarget(std::vector<SubspaceComponent> components, double mass_floor_constant)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorKind::InvalidArgument, "target needs at least one component");
  ambient_dim_ = components_.front().subspace.ambient_dim();
  const auto m = static_cast<double>(components_.size());

  double mass_total = 0.0;
  for (const auto& c : components_) {
    if (c.subspace.ambient_dim() != ambient_dim_)
      throw Error(ErrorKind::InvalidDims, "components live in different ambient spaces");
    if (!(c.mass > 0.0 && c.mass <= 1.0)) throw Error(ErrorKind::InvalidArgument, "component mass outside (0, 1]");
    if (c.mass < 1.0 / (mass_floor_constant * m) - 1e-15)
      throw Error(ErrorKind::InvalidArgument, "component mass below 1/(c_p M)");
    if (c.mixture.empty()) throw Error(ErrorKind::InvalidArgument, "component has an empty mixture");
    double weight_total = 0.0;
    for (const auto& term : c.mixture) {
      validate_term(term, c.subspace.intrinsic_dim());
      weight_total += term.weight;
    }
    if (std::abs(weight_total - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "mixture weights must sum to 1");
    mass_total += c.mass;
  }
  if (std::abs(mass_total - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "component masses must sum to 1");

  for (std::size_t i = 0; i < components_.size(); ++i)
    for (std::size_t j = i + 1; j < components_.size(); ++j)
      if (components_[i].subspace.intrinsic_dim() == components_[j].subspace.intrinsic_dim() &&
          same_subspace(components_[i].subspace, components_[j].subspace))
        throw Error(ErrorKind::InvalidArgument,
                    "components " + std::to_string(i) + " and " + std::to_string(j) + " share a subspace");

  factors_.resize(components_.size());
  double running = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (const auto& term : components_[i].mixture) factors_[i].push_back({symmetric_sqrt(term.covariance)});
    running += components_[i].mass;
    cumulative_mass_.push_back(running);
  }
  cumulative_mass_.back() = 1.0;
}

UoSTarget UoSTarget::random(const TargetSpec& spec, Rng& rng) {
  if (spec.subspace_count < 1 || spec.mixture_terms < 1)
    throw Error(ErrorKind::InvalidArgument, "target spec needs at least one subspace and mixture term");
  if (!(spec.cov_min >= 0.0 && spec.cov_min <= spec.cov_max))
    throw Error(ErrorKind::InvalidArgument, "target spec needs 0 <= cov_min <= cov_max");
  const auto k = spec.intrinsic_dim;

  std::vector<double> raw_mass(spec.subspace_count);
  double mass_sum = 0.0;
  for (auto& m : raw_mass) mass_sum += (m = rng.uniform(1.0, 2.0));

  std::vector<SubspaceComponent> components;
  components.reserve(spec.subspace_count);
  for (std::size_t i = 0; i < spec.subspace_count; ++i) {
    Subspace s = random_subspace(spec.ambient_dim, k, rng);

    std::vector<double> raw_weight(spec.mixture_terms);
    double weight_sum = 0.0;
    for (auto& w : raw_weight) weight_sum += (w = rng.uniform(1.0, 2.0));

    std::vector<GaussianTerm> mixture;
    for (std::size_t j = 0; j < spec.mixture_terms; ++j) {
      Vector mean = spec.mean_scale * rng.normal_vector(k);
      const double norm = mean.norm();
      if (norm > spec.mean_max) mean *= spec.mean_max / norm;

      Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(k, k));
      const Matrix rot = qr.householderQ();
      Vector eig(k);
      for (Eigen::Index e = 0; e < k; ++e) eig[e] = rng.uniform(spec.cov_min, spec.cov_max);
      Matrix cov = rot * eig.asDiagonal() * rot.transpose();
      cov = 0.5 * (cov + cov.transpose()).eval();
      mixture.push_back({raw_weight[j] / weight_sum, std::move(mean), std::move(cov)});
    }
    components.push_back({std::move(s), raw_mass[i] / mass_sum, std::move(mixture)});
  }

  // Renormalize so both sums are 1 to rounding.
  double total = 0.0;
  for (const auto& c : components) total += c.mass;
  for (auto& c : components) {
    c.mass /= total;
    double wt = 0.0;
    for (const auto& term : c.mixture) wt += term.weight;
    for (auto& term : c.mixture) term.weight /= wt;
  }
  return UoSTarget(std::move(components), spec.mass_floor_constant);
}

Eigen::Index UoSTarget::max_intrinsic_dim() const {
  Eigen::Index k = 0;
  for (const auto& c : components_) k = std::max(k, c.subspace.intrinsic_dim());
  return k;
}

LabeledSamples UoSTarget::sample(Eigen::Index n, Rng& rng) const {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  LabeledSamples out{PointSet(ambient_dim_, n), std::vector<int>(static_cast<std::size_t>(n))};
  for (Eigen::Index s = 0; s < n; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_mass_.begin(), cumulative_mass_.end(), u);
    const std::size_t i = std::min<std::size_t>(it - cumulative_mass_.begin(), components_.size() - 1);
    const auto& comp = components_[i];

    double v = rng.uniform();
    std::size_t j = 0;
    while (j + 1 < comp.mixture.size() && v >= comp.mixture[j].weight) v -= comp.mixture[j++].weight;

    const auto& term = comp.mixture[j];
    const Vector z = term.mean + factors_[i][j].sqrt_cov * rng.normal_vector(term.mean.size());
    out.points.col(s) = comp.subspace.basis() * z;
    out.labels[static_cast<std::size_t>(s)] = static_cast<int>(i);
  }
  return out;
}

SmoothedTarget UoSTarget::smoothed(double t) const { return SmoothedTarget(*this, t); }

SmoothedTarget::SmoothedTarget(const UoSTarget& target, double t) : target_(&target), t_(t) {
  detail::require_positive_time(t);
  const auto d = static_cast<double>(target.ambient_dim());
  for (std::size_t i = 0; i < target.components_.size(); ++i) {
    const auto& comp = target.components_[i];
    const auto k = comp.subspace.intrinsic_dim();
    for (const auto& term : comp.mixture) {
      Matrix shifted = term.covariance;
      shifted.diagonal().array() += t;
      Eigen::LLT<Matrix> llt(shifted);
      const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      const double prefactor = std::log(comp.mass) + std::log(term.weight) -
                               0.5 * (d * kLog2Pi + logdet + (d - static_cast<double>(k)) * std::log(t));
      terms_.push_back({i, prefactor, term.mean, std::move(llt)});
    }
  }
}

SmoothedTarget::Evaluation SmoothedTarget::evaluate(const Vector& x, bool with_score) const {
  const auto& comps = target_->components_;
  if (x.size() != target_->ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "query point dimension");

  const std::size_t m = comps.size();
  std::vector<Vector> tangent(m);
  std::vector<Vector> normal(m);
  for (std::size_t i = 0; i < m; ++i) {
    tangent[i] = comps[i].subspace.basis().transpose() * x;
    normal[i] = x - comps[i].subspace.basis() * tangent[i];
  }

  std::vector<double> log_terms(terms_.size());
  std::vector<Vector> solved(terms_.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < terms_.size(); ++q) {
    const auto& term = terms_[q];
    const Vector delta = tangent[term.component] - term.mean;
    solved[q] = term.factor.solve(delta);
    const double quad = delta.dot(solved[q]) + normal[term.component].squaredNorm() / t_;
    log_terms[q] = term.log_prefactor - 0.5 * quad;
    max_log = std::max(max_log, log_terms[q]);
  }

  double total = 0.0;
  for (double v : log_terms) total += std::exp(v - max_log);

  Evaluation out;
  out.log_density = max_log + std::log(total);
  out.weights = Vector::Zero(static_cast<Eigen::Index>(m));
  if (with_score) out.score = Vector::Zero(x.size());
  for (std::size_t q = 0; q < terms_.size(); ++q) {
    const double resp = std::exp(log_terms[q] - out.log_density);
    const auto i = terms_[q].component;
    out.weights[static_cast<Eigen::Index>(i)] += resp;
    if (with_score && resp > 0.0)
      out.score -= resp * (comps[i].subspace.basis() * solved[q] + normal[i] / t_);
  }
  return out;
}

double SmoothedTarget::log_density(const Vector& x) const { return evaluate(x, false).log_density; }

Vector SmoothedTarget::score(const Vector& x) const { return evaluate(x, true).score; }

Vector SmoothedTarget::weights(const Vector& x) const { return evaluate(x, false).weights; }

double smoothed_density(const UoSTarget& target, double t, const Vector& x) {
  return target.smoothed(t).log_density(x);
}

Vector true_score(const UoSTarget& target, double t, const Vector& x) { return target.smoothed(t).score(x); }

double true_weight(const UoSTarget& target, double t, std::size_t i, const Vector& x) {
  if (i >= target.component_count()) throw Error(ErrorKind::InvalidArgument, "component index out of range");
  return target.smoothed(t).weights(x)[static_cast<Eigen::Index>(i)];
}

}  // namespace uosdiff
