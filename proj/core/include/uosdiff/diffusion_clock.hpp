#pragma once

#include <vector>

#include "uosdiff/types.hpp"

namespace uosdiff {

/// Time algebra of the OU forward process dX = -X dt + sqrt(2) dB and its
/// variance-exploding counterpart dZ = dB.
namespace clock {

/// Signal scale c_t = e^{-t}.
double c(double t);
/// Noise scale sigma_t = sqrt(1 - e^{-2t}).
double sigma(double t);
/// VE time matching VP time t: h(t) = sigma_t^2 / c_t^2 = e^{2t} - 1.
double h(double t);
/// Inverse of h: 0.5 * log(1 + u).
double h_inverse(double u);

}  // namespace clock

/// s_{X_t}(x) = (1/c_t) s_{Z_{h(t)}}(x / c_t). Throws NonpositiveTime.
Vector vp_score_from_ve(const ScoreFn& score_ve, double t, const Vector& x);

/// Wraps a VE score field into the corresponding VP score field.
ScoreFn make_vp_score(ScoreFn score_ve);

struct TimeGrid {
  std::vector<double> times;  // strictly increasing, times.front() == tau, times.back() == T
  double tau = 0.0;
  double T = 0.0;

  std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
};

/// [tau, 2 tau, 4 tau, ..., T], the last node clamped to exactly T.
/// Throws InvalidRange unless 0 < tau < T.
TimeGrid dyadic_grid(double tau, double T);

/// steps+1 nodes geometric in t from tau to T.
/// Throws InvalidRange unless 0 < tau < T and steps >= 1.
TimeGrid uniform_step_grid(double tau, double T, int steps);

}  // namespace uosdiff
