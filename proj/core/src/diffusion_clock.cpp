#include "uosdiff/diffusion_clock.hpp"

#include <cmath>

#include "uosdiff/error.hpp"

namespace uosdiff {
namespace clock {

double c(double t) { return std::exp(-t); }

double sigma(double t) { return std::sqrt(-std::expm1(-2.0 * t)); }

double h(double t) { return std::expm1(2.0 * t); }

double h_inverse(double u) { return 0.5 * std::log1p(u); }

}  // namespace clock

Vector vp_score_from_ve(const ScoreFn& score_ve, double t, const Vector& x) {
  detail::require_positive_time(t);
  const double ct = clock::c(t);
  return score_ve(clock::h(t), x / ct) / ct;
}

ScoreFn make_vp_score(ScoreFn score_ve) {
  return [score_ve = std::move(score_ve)](double t, const Vector& x) { return vp_score_from_ve(score_ve, t, x); };
}

namespace {

void check_range(double tau, double T) {
  if (!(tau > 0.0 && tau < T && std::isfinite(T)))
    throw Error(ErrorKind::InvalidRange, "time grid needs 0 < tau < T");
}

}  // namespace

TimeGrid dyadic_grid(double tau, double T) {
  check_range(tau, T);
  TimeGrid grid{{}, tau, T};
  // Nodes within a relative 1e-12 of T are merged into T.
  for (double t = tau; t < T * (1.0 - 1e-12); t *= 2.0) grid.times.push_back(t);
  grid.times.push_back(T);
  return grid;
}

TimeGrid uniform_step_grid(double tau, double T, int steps) {
  check_range(tau, T);
  if (steps < 1) throw Error(ErrorKind::InvalidRange, "time grid needs at least one step");
  TimeGrid grid{{}, tau, T};
  grid.times.reserve(static_cast<std::size_t>(steps) + 1);
  const double log_tau = std::log(tau);
  const double log_span = std::log(T) - log_tau;
  grid.times.push_back(tau);
  for (int j = 1; j < steps; ++j) grid.times.push_back(std::exp(log_tau + log_span * j / steps));
  grid.times.push_back(T);
  return grid;
}

}  // namespace uosdiff
