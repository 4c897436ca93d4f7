#include "uosdiff/sampler.hpp"

#include <cmath>
#include <string>

#include "uosdiff/error.hpp"
#include "uosdiff/parallel.hpp"

namespace uosdiff {

SamplerConfig SamplerConfig::for_sample_size(std::size_t n, Eigen::Index k, int steps) {
  SamplerConfig cfg;
  const double nn = static_cast<double>(n);
  cfg.tau = std::pow(nn, -2.0 / static_cast<double>(k));
  cfg.T = std::log(nn);
  cfg.steps = steps;
  return cfg;
}

TimeGrid SamplerConfig::time_grid() const {
  return grid == GridKind::Dyadic ? dyadic_grid(tau, T) : uniform_step_grid(tau, T, steps);
}

namespace {

Vector integrate(const ScoreFn& score, const TimeGrid& grid, Eigen::Index dim, Rng& rng) {
  Vector y = rng.normal_vector(dim);
  for (std::size_t j = grid.times.size() - 1; j > 0; --j) {
    const double t_hi = grid.times[j];
    const double dt = t_hi - grid.times[j - 1];
    const Vector drift = y + 2.0 * score(t_hi, y);
    y += dt * drift + std::sqrt(2.0 * dt) * rng.normal_vector(dim);
    if (!y.allFinite())
      throw Error(ErrorKind::NonFiniteState, "reverse SDE state became non-finite at t=" + std::to_string(t_hi));
  }
  return y;
}

}  // namespace

Vector sample_one(const ScoreFn& score, const SamplerConfig& config, Eigen::Index dim, Rng& rng) {
  return integrate(score, config.time_grid(), dim, rng);
}

PointSet sample_batch(const ScoreFn& score, const SamplerConfig& config, Eigen::Index dim, std::size_t count) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample_batch needs count >= 1");
  const TimeGrid grid = config.time_grid();
  PointSet out(dim, static_cast<Eigen::Index>(count));
  const Rng base(config.seed);
  parallel_for(count, [&](std::size_t i) {
    Rng rng = base.substream(i);
    out.col(static_cast<Eigen::Index>(i)) = integrate(score, grid, dim, rng);
  });
  return out;
}

}  // namespace uosdiff
