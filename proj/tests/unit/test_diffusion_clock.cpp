#include "test_support.hpp"

#include <cmath>

namespace uosdiff {
namespace {

using test::expect_error;
using test::vec;

TEST(Clock, ValuesAtZero) {
  EXPECT_EQ(clock::c(0.0), 1.0);
  EXPECT_EQ(clock::sigma(0.0), 0.0);
  EXPECT_EQ(clock::h(0.0), 0.0);
}

TEST(Clock, UnitVarianceAndInverse) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double t = std::exp(rng.uniform(std::log(1e-6), std::log(50.0)));
    EXPECT_NEAR(clock::c(t) * clock::c(t) + clock::sigma(t) * clock::sigma(t), 1.0, 1e-12);
    EXPECT_NEAR(clock::h_inverse(clock::h(t)), t, 1e-10 * t);
    const double u = std::exp(rng.uniform(std::log(1e-6), std::log(1e6)));
    EXPECT_NEAR(clock::h(clock::h_inverse(u)), u, 1e-10 * u);
  }
}

TEST(Clock, HMatchesSigmaOverC) {
  for (double t : {1e-3, 0.1, 1.0, 3.0}) {
    const double ratio = clock::sigma(t) * clock::sigma(t) / (clock::c(t) * clock::c(t));
    EXPECT_NEAR(clock::h(t), ratio, 1e-12 * ratio);
  }
}

TEST(Clock, HStrictlyIncreasing) {
  double prev = -1.0;
  for (int i = 0; i < 100; ++i) {
    const double v = clock::h(0.05 * i);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(VpScore, LogTwoArithmetic) {
  const double t = std::log(2.0);
  double seen_t = 0.0;
  Vector seen_x;
  const ScoreFn probe = [&](double s, const Vector& x) {
    seen_t = s;
    seen_x = x;
    return Vector(x * 3.0);
  };
  const Vector x = vec({1.0, -2.0});
  const Vector out = vp_score_from_ve(probe, t, x);
  EXPECT_NEAR(seen_t, 3.0, 1e-14);
  EXPECT_LE((seen_x - 2.0 * x).norm(), 1e-14);
  EXPECT_LE((out - 2.0 * 3.0 * 2.0 * x).norm(), 1e-12);
}

TEST(VpScore, StandardGaussianTargetIsStationary) {
  // N(0, I) smoothed by VE time h has score -x / (1 + h).
  const ScoreFn ve = [](double h, const Vector& x) { return Vector(-x / (1.0 + h)); };
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(0.01, 5.0);
    const Vector x = rng.normal_vector(4);
    EXPECT_LE((vp_score_from_ve(ve, t, x) + x).norm(), 1e-10 * (1.0 + x.norm()));
  }
  const Vector x = rng.normal_vector(4);
  EXPECT_LE((vp_score_from_ve(ve, 20.0, x) + x).norm(), 1e-6);
}

TEST(VpScore, OracleReproducesAnalyticVpMarginal) {
  // Full-support target N(0, diag(s2)) on R^3 built as one 3-dim component.
  const Vector s2 = vec({0.3, 1.0, 2.5});
  const UoSTarget target({test::gaussian_component(test::axes(3, {0, 1, 2}), 1.0, Vector::Zero(3),
                                                   Matrix(s2.asDiagonal()))});
  const ScoreFn vp = make_vp_score([&](double h, const Vector& x) { return true_score(target, h, x); });
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double t = std::exp(rng.uniform(std::log(1e-3), std::log(5.0)));
    const Vector x = rng.normal_vector(3);
    const double c = clock::c(t), s = clock::sigma(t);
    // VP marginal: N(0, c^2 diag(s2) + sigma^2 I).
    const Vector var = (c * c * s2.array() + s * s).matrix();
    const Vector exact = -(x.array() / var.array()).matrix();
    EXPECT_LE((vp(t, x) - exact).norm(), 1e-8 * (1.0 + exact.norm()));
  }
}

TEST(VpScore, NonpositiveTime) {
  const ScoreFn zero = [](double, const Vector& x) { return Vector(Vector::Zero(x.size())); };
  expect_error(ErrorKind::NonpositiveTime, [&] { vp_score_from_ve(zero, 0.0, vec({1.0})); });
  expect_error(ErrorKind::NonpositiveTime, [&] { vp_score_from_ve(zero, -1.0, vec({1.0})); });
}

TEST(DyadicGrid, Examples) {
  EXPECT_EQ(dyadic_grid(1.0, 8.0).times, (std::vector<double>{1, 2, 4, 8}));
  const auto g = dyadic_grid(0.1, 1.0).times;
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[3], 0.8);
  EXPECT_EQ(g.back(), 1.0);
}

TEST(DyadicGrid, SampleSizeDefaults) {
  const double n = 10000.0;
  const TimeGrid g = dyadic_grid(std::pow(n, -2.0 / 2.0), std::log(n));
  EXPECT_DOUBLE_EQ(g.tau, 1e-4);
  EXPECT_EQ(g.times.size(), static_cast<std::size_t>(std::ceil(std::log2(std::log(n) / 1e-4))) + 1);
  EXPECT_EQ(g.times.size(), 18u);
  EXPECT_EQ(g.times.back(), std::log(n));
}

TEST(DyadicGrid, InvalidRange) {
  expect_error(ErrorKind::InvalidRange, [] { dyadic_grid(0.0, 1.0); });
  expect_error(ErrorKind::InvalidRange, [] { dyadic_grid(2.0, 1.0); });
  expect_error(ErrorKind::InvalidRange, [] { dyadic_grid(1.0, 1.0); });
}

TEST(UniformStepGrid, Examples) {
  const auto g = uniform_step_grid(0.01, 1.0, 2).times;
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g.front(), 0.01);
  EXPECT_NEAR(g[1], 0.1, 1e-15);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(uniform_step_grid(0.3, 7.0, 1).times, (std::vector<double>{0.3, 7.0}));
}

TEST(UniformStepGrid, ConstantRatio) {
  const TimeGrid g = uniform_step_grid(1e-3, 10.0, 200);
  ASSERT_EQ(g.steps(), 200u);
  const double ratio = g.times[1] / g.times[0];
  for (std::size_t i = 1; i < g.times.size(); ++i) {
    EXPECT_GT(g.times[i], g.times[i - 1]);
    EXPECT_NEAR(g.times[i] / g.times[i - 1], ratio, 1e-12);
  }
}

TEST(UniformStepGrid, InvalidRange) {
  expect_error(ErrorKind::InvalidRange, [] { uniform_step_grid(0.1, 1.0, 0); });
  expect_error(ErrorKind::InvalidRange, [] { uniform_step_grid(-0.1, 1.0, 3); });
  expect_error(ErrorKind::InvalidRange, [] { uniform_step_grid(1.0, 0.5, 3); });
}

}  // namespace
}  // namespace uosdiff
