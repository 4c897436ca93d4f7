#pragma once

#include <cstddef>
#include <vector>

#include "uosdiff/geometry.hpp"
#include "uosdiff/random.hpp"
#include "uosdiff/types.hpp"

namespace uosdiff {

/// One Gaussian term of a within-subspace mixture, in tangent coordinates.
/// A zero covariance is allowed and yields a point mass.
struct GaussianTerm {
  double weight = 1.0;
  Vector mean;
  Matrix covariance;
};

/// Restriction of the target to one subspace: mass p*(V_i) and the law of
/// A_i^T X as a Gaussian mixture on R^{k_i}.
struct SubspaceComponent {
  Subspace subspace;
  double mass = 1.0;
  std::vector<GaussianTerm> mixture;
};

/// Parameters for random targets. Means are drawn as mean_scale * N(0, I_k)
/// and clamped to norm mean_max; covariance eigenvalues are uniform on
/// [cov_min, cov_max] under a random rotation; component masses are
/// proportional to U[1, 2], so each mass is at least 1/(2M).
struct TargetSpec {
  Eigen::Index ambient_dim = 48;
  std::size_t subspace_count = 128;
  Eigen::Index intrinsic_dim = 3;
  std::size_t mixture_terms = 2;
  double mean_scale = 1.0;
  double mean_max = 3.0;
  double cov_min = 0.05;
  double cov_max = 1.0;
  double mass_floor_constant = 4.0;  // c_p
};

struct LabeledSamples {
  PointSet points;          // d x n
  std::vector<int> labels;  // generating component per column
};

class SmoothedTarget;

/// Distribution supported on a union of subspaces. Immutable after
/// construction; every evaluation is thread-safe.
class UoSTarget {
 public:
  /// Validates: masses sum to 1 (1e-12), each mass >= 1/(c_p M), mixture
  /// weights positive and summing to 1 (1e-12), covariances symmetric PSD,
  /// subspaces pairwise distinct. Throws InvalidArgument / InvalidDims.
  UoSTarget(std::vector<SubspaceComponent> components, double mass_floor_constant = 4.0);

  static UoSTarget random(const TargetSpec& spec, Rng& rng);

  Eigen::Index ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t component_count() const noexcept { return components_.size(); }
  const SubspaceComponent& component(std::size_t i) const { return components_.at(i); }
  const std::vector<SubspaceComponent>& components() const noexcept { return components_; }
  Eigen::Index max_intrinsic_dim() const;

  /// Draws n points: component by mass, tangent point from its mixture, then
  /// lifted by the basis.
  LabeledSamples sample(Eigen::Index n, Rng& rng) const;

  /// Precomputed evaluator for p_t = p* * N(0, t I_d). The evaluator keeps a
  /// pointer to this target, which must outlive it.
  SmoothedTarget smoothed(double t) const;

 private:
  friend class SmoothedTarget;

  struct TermFactor {
    Matrix sqrt_cov;  // L with L L^T = covariance
  };

  Eigen::Index ambient_dim_;
  std::vector<SubspaceComponent> components_;
  std::vector<std::vector<TermFactor>> factors_;
  std::vector<double> cumulative_mass_;
};

/// The target smoothed at VE time t. Each smoothed term is the full-rank
/// Gaussian N(A mu, A Sigma A^T + t I); evaluation splits x into tangent
/// coordinates and normal residual so only k x k systems are solved.
class SmoothedTarget {
 public:
  SmoothedTarget(const UoSTarget& target, double t);

  double time() const noexcept { return t_; }

  double log_density(const Vector& x) const;
  Vector score(const Vector& x) const;
  /// Posterior weights w_t(i, x), i = 0..M-1.
  Vector weights(const Vector& x) const;

  struct Evaluation {
    double log_density = 0.0;
    Vector score;
    Vector weights;
  };
  Evaluation evaluate(const Vector& x, bool with_score = true) const;

 private:
  struct Term {
    std::size_t component;
    double log_prefactor;  // log(mass * weight) - 0.5 (d log 2pi + logdet + (d-k) log t)
    Vector mean;
    Eigen::LLT<Matrix> factor;  // of Sigma + t I_k
  };

  const UoSTarget* target_;
  double t_;
  std::vector<Term> terms_;
};

/// log p_t(x). Throws NonpositiveTime.
double smoothed_density(const UoSTarget& target, double t, const Vector& x);
/// grad log p_t(x), the exact VE score. Throws NonpositiveTime.
Vector true_score(const UoSTarget& target, double t, const Vector& x);
/// q_t(i, x) / p_t(x). Throws NonpositiveTime.
double true_weight(const UoSTarget& target, double t, std::size_t i, const Vector& x);

}  // namespace uosdiff
