#include "test_support.hpp"

#include <cmath>
#include <numbers>

namespace uosdiff {
namespace {

using test::axes;
using test::expect_error;
using test::gaussian_component;
using test::vec;

// Gauss-Hermite nodes/weights for weight exp(-x^2) via Golub-Welsch.
struct Quadrature {
  Vector nodes, weights;
};

Quadrature gauss_hermite(int n) {
  Matrix jacobi = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  Quadrature q;
  q.nodes = eig.eigenvalues();
  q.weights = std::sqrt(std::numbers::pi) * eig.eigenvectors().row(0).transpose().array().square();
  return q;
}

double log_gaussian_iso(const Vector& r, double t) {
  const double d = static_cast<double>(r.size());
  return -0.5 * r.squaredNorm() / t - 0.5 * d * std::log(2.0 * std::numbers::pi * t);
}

// q_t(i, x) by tensor Gauss-Hermite over each term's tangent Gaussian (k <= 2).
double quadrature_component_density(const SubspaceComponent& comp, double t, const Vector& x) {
  static const Quadrature gh = gauss_hermite(80);
  const Eigen::Index k = comp.subspace.intrinsic_dim();
  const Eigen::Index n = gh.nodes.size();
  double total = 0.0;
  for (const auto& term : comp.mixture) {
    const Matrix l = Eigen::LLT<Matrix>(term.covariance).matrixL();
    double acc = 0.0;
    if (k == 1) {
      for (Eigen::Index a = 0; a < n; ++a) {
        const Vector z = term.mean + std::sqrt(2.0) * l * vec({gh.nodes[a]});
        acc += gh.weights[a] * std::exp(log_gaussian_iso(x - comp.subspace.lift(z), t));
      }
      acc /= std::sqrt(std::numbers::pi);
    } else {
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
          const Vector z = term.mean + std::sqrt(2.0) * l * vec({gh.nodes[a], gh.nodes[b]});
          acc += gh.weights[a] * gh.weights[b] * std::exp(log_gaussian_iso(x - comp.subspace.lift(z), t));
        }
      acc /= std::numbers::pi;
    }
    total += term.weight * acc;
  }
  return comp.mass * total;
}

// Two-component target in R^3: a line and a plane, with two-term mixtures.
UoSTarget low_dim_target() {
  Rng rng(77);
  const Subspace line = random_subspace(3, 1, rng);
  const Subspace plane = random_subspace(3, 2, rng);
  Matrix c2(2, 2);
  c2 << 0.6, 0.2, 0.2, 0.4;
  SubspaceComponent a{line, 0.4, {GaussianTerm{0.3, vec({-1.0}), Matrix::Constant(1, 1, 0.5)},
                                  GaussianTerm{0.7, vec({1.5}), Matrix::Constant(1, 1, 0.2)}}};
  SubspaceComponent b{plane, 0.6, {GaussianTerm{0.5, vec({0.5, -0.5}), c2},
                                   GaussianTerm{0.5, vec({-1.0, 1.0}), Matrix(Matrix::Identity(2, 2) * 0.3)}}};
  return UoSTarget({a, b});
}

TEST(Target, PointMassSamplesAreZero) {
  const UoSTarget target({gaussian_component(axes(3, {0, 1}), 1.0, Vector::Zero(2), Matrix::Zero(2, 2))});
  Rng rng(1);
  const LabeledSamples s = target.sample(100, rng);
  EXPECT_EQ(s.points.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Target, ComponentFrequenciesAreBinomial) {
  const UoSTarget target({gaussian_component(axes(2, {0}), 0.5, vec({0.0}), Matrix::Identity(1, 1)),
                          gaussian_component(axes(2, {1}), 0.5, vec({0.0}), Matrix::Identity(1, 1))});
  Rng rng(2);
  const int n = 10000;
  const LabeledSamples s = target.sample(n, rng);
  int first = 0;
  for (int l : s.labels) first += l == 0;
  EXPECT_LE(std::abs(first - n / 2.0), 3.0 * std::sqrt(n * 0.25));
}

TEST(Target, FullScaleSamplesLieOnSubspaces) {
  Rng rng(3);
  const UoSTarget target = UoSTarget::random(TargetSpec{}, rng);
  EXPECT_EQ(target.component_count(), 128u);
  const LabeledSamples s = target.sample(50000, rng);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.points.cols(); ++j)
    worst = std::max(worst, residual_norm(target.component(static_cast<std::size_t>(s.labels[static_cast<std::size_t>(j)])).subspace,
                                          s.points.col(j)));
  EXPECT_LE(worst, 1e-10);
}

TEST(Target, RandomRespectsClamps) {
  Rng rng(4);
  const TargetSpec spec = test::spec(10, 6, 3);
  const UoSTarget target = UoSTarget::random(spec, rng);
  double mass = 0.0;
  for (const auto& c : target.components()) {
    mass += c.mass;
    EXPECT_GE(c.mass, 1.0 / (spec.mass_floor_constant * 6));
    EXPECT_EQ(c.mixture.size(), spec.mixture_terms);
    for (const auto& term : c.mixture) {
      EXPECT_LE(term.mean.norm(), spec.mean_max + 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(term.covariance);
      EXPECT_GE(eig.eigenvalues().minCoeff(), spec.cov_min - 1e-12);
      EXPECT_LE(eig.eigenvalues().maxCoeff(), spec.cov_max + 1e-12);
    }
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Target, SamplingDeterministicPerSeed) {
  Rng a(5), b(5);
  const UoSTarget ta = UoSTarget::random(test::spec(6, 3, 2), a);
  const UoSTarget tb = UoSTarget::random(test::spec(6, 3, 2), b);
  EXPECT_EQ(ta.sample(50, a).points, tb.sample(50, b).points);
}

TEST(Target, ValidationErrors) {
  const Subspace x = axes(2, {0}), y = axes(2, {1});
  const Matrix one = Matrix::Identity(1, 1);
  expect_error(ErrorKind::InvalidArgument, [&] {
    UoSTarget({gaussian_component(x, 0.5, vec({0}), one), gaussian_component(y, 0.6, vec({0}), one)});
  });
  expect_error(ErrorKind::InvalidArgument, [&] {
    UoSTarget({gaussian_component(x, 0.95, vec({0}), one), gaussian_component(y, 0.05, vec({0}), one)});
  });
  expect_error(ErrorKind::InvalidArgument, [&] {
    UoSTarget({gaussian_component(x, 0.5, vec({0}), one), gaussian_component(x, 0.5, vec({0}), one)});
  });
  expect_error(ErrorKind::InvalidArgument, [&] {
    UoSTarget({SubspaceComponent{x, 1.0, {GaussianTerm{0.5, vec({0}), one}, GaussianTerm{0.6, vec({0}), one}}}});
  });
  expect_error(ErrorKind::InvalidArgument, [&] {
    UoSTarget({gaussian_component(x, 1.0, vec({0}), -one)});
  });
  Matrix asym(2, 2);
  asym << 1, 0.1, 0, 1;
  expect_error(ErrorKind::InvalidArgument, [&] {
    UoSTarget({gaussian_component(axes(3, {0, 1}), 1.0, Vector::Zero(2), asym)});
  });
}

TEST(SmoothedDensity, PointMassIsIsotropicGaussian) {
  const UoSTarget target({gaussian_component(axes(4, {0, 1}), 1.0, Vector::Zero(2), Matrix::Zero(2, 2))});
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0.01, 3.0);
    const Vector x = rng.normal_vector(4);
    EXPECT_NEAR(smoothed_density(target, t, x), log_gaussian_iso(x, t), 1e-12);
    EXPECT_LE((true_score(target, t, x) + x / t).norm(), 1e-10 * (1.0 + x.norm() / t));
  }
}

TEST(SmoothedDensity, AxisAlignedGaussianConvolution) {
  const UoSTarget target({gaussian_component(axes(3, {0, 1}), 1.0, Vector::Zero(2), Matrix::Identity(2, 2))});
  const double t = 0.3;
  const Vector x = vec({0.4, -1.0, 0.7});
  const Vector var = vec({1 + t, 1 + t, t});
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) expected += -0.5 * x[i] * x[i] / var[i] - 0.5 * std::log(2 * std::numbers::pi * var[i]);
  EXPECT_NEAR(smoothed_density(target, t, x), expected, 1e-12);
}

TEST(SmoothedDensity, MatchesQuadrature) {
  const UoSTarget target = low_dim_target();
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0.1, 1.0);
    const Vector x = target.sample(1, rng).points.col(0) + std::sqrt(t) * rng.normal_vector(3);
    const double quad = quadrature_component_density(target.component(0), t, x) +
                        quadrature_component_density(target.component(1), t, x);
    EXPECT_NEAR(std::exp(smoothed_density(target, t, x)) / quad, 1.0, 1e-4);
  }
}

TEST(SmoothedDensity, IntegratesToOne) {
  // Importance sampling from N(0, 4 I) in d = 3.
  const UoSTarget target = low_dim_target();
  Rng rng(8);
  const int n = 100000;
  const double t = 0.5, s2 = 4.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = std::sqrt(s2) * rng.normal_vector(3);
    sum += std::exp(smoothed_density(target, t, x) - log_gaussian_iso(x, s2));
  }
  EXPECT_NEAR(sum / n, 1.0, 0.01);
}

TEST(SmoothedDensity, FiniteAtFullScale) {
  Rng rng(9);
  const UoSTarget target = UoSTarget::random(TargetSpec{}, rng);
  const Vector x = 10.0 * rng.normal_vector(48);
  EXPECT_TRUE(std::isfinite(smoothed_density(target, 1e-3, x)));
  EXPECT_TRUE(true_score(target, 1e-3, x).allFinite());
}

TEST(TrueScore, GaussianOnSubspace) {
  const double s2 = 0.7;
  const Subspace s = axes(5, {1, 3});
  const UoSTarget target({gaussian_component(s, 1.0, Vector::Zero(2), Matrix(Matrix::Identity(2, 2) * s2))});
  const Vector x = s.lift(vec({0.8, -1.1}));
  for (double t : {1e-3, 0.1, 2.0}) EXPECT_LE((true_score(target, t, x) + x / (s2 + t)).norm(), 1e-12);
}

TEST(TrueScore, MatchesFiniteDifferences) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    Rng trng = rng.substream(static_cast<std::uint64_t>(trial));
    const UoSTarget target = UoSTarget::random(test::spec(5, 3, 2), trng);
    const double t = std::exp(rng.uniform(std::log(0.05), std::log(3.0)));
    const Vector x = target.sample(1, rng).points.col(0) + std::sqrt(t) * rng.normal_vector(5);
    const Vector s = true_score(target, t, x);
    Vector fd(5);
    for (Eigen::Index i = 0; i < 5; ++i) {
      Vector xp = x, xm = x;
      xp[i] += 1e-5;
      xm[i] -= 1e-5;
      fd[i] = (smoothed_density(target, t, xp) - smoothed_density(target, t, xm)) / 2e-5;
    }
    EXPECT_LE((fd - s).norm(), 1e-5 * std::max(1.0, s.norm()));
  }
}

TEST(TrueWeight, SingleComponentIsOne) {
  Rng rng(11);
  const UoSTarget target = UoSTarget::random(test::spec(4, 1, 2), rng);
  EXPECT_NEAR(true_weight(target, 0.2, 0, rng.normal_vector(4)), 1.0, 1e-15);
}

TEST(TrueWeight, SymmetricComponents) {
  const UoSTarget target({gaussian_component(axes(2, {0}), 0.5, vec({0}), Matrix::Identity(1, 1)),
                          gaussian_component(axes(2, {1}), 0.5, vec({0}), Matrix::Identity(1, 1))});
  EXPECT_NEAR(true_weight(target, 0.3, 0, vec({1.2, 1.2})), 0.5, 1e-14);
  EXPECT_NEAR(true_weight(target, 0.3, 1, vec({-0.4, 0.4})), 0.5, 1e-14);
}

TEST(TrueWeight, MatchesQuadratureAndSumsToOne) {
  const UoSTarget target = low_dim_target();
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0.1, 1.0);
    const Vector x = target.sample(1, rng).points.col(0) + std::sqrt(t) * rng.normal_vector(3);
    const double q0 = quadrature_component_density(target.component(0), t, x);
    const double q1 = quadrature_component_density(target.component(1), t, x);
    EXPECT_NEAR(true_weight(target, t, 0, x), q0 / (q0 + q1), 1e-3);
    EXPECT_NEAR(true_weight(target, t, 0, x) + true_weight(target, t, 1, x), 1.0, 1e-10);
  }
}

TEST(TrueWeight, WeightsSumToOneAtScale) {
  Rng rng(13);
  const UoSTarget target = UoSTarget::random(test::spec(16, 8, 3), rng);
  for (int i = 0; i < 100; ++i) {
    const double t = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    const Vector x = target.sample(1, rng).points.col(0) + std::sqrt(t) * rng.normal_vector(16);
    const Vector w = target.smoothed(t).weights(x);
    EXPECT_NEAR(w.sum(), 1.0, 1e-10);
    EXPECT_GE(w.minCoeff(), 0.0);
  }
}

TEST(Oracle, NonpositiveTime) {
  Rng rng(14);
  const UoSTarget target = UoSTarget::random(test::spec(4, 2, 2), rng);
  const Vector x = Vector::Zero(4);
  expect_error(ErrorKind::NonpositiveTime, [&] { smoothed_density(target, 0.0, x); });
  expect_error(ErrorKind::NonpositiveTime, [&] { true_score(target, -1.0, x); });
  expect_error(ErrorKind::NonpositiveTime, [&] { true_weight(target, 0.0, 0, x); });
}

}  // namespace
}  // namespace uosdiff
