#pragma once

#include <cstdint>

#include "uosdiff/diffusion_clock.hpp"
#include "uosdiff/random.hpp"
#include "uosdiff/types.hpp"

namespace uosdiff {

enum class GridKind { LogUniform, Dyadic };

struct SamplerConfig {
  double tau = 1e-3;  // early-stopping time
  double T = 10.0;    // end time
  int steps = 200;    // ignored by the dyadic grid
  GridKind grid = GridKind::LogUniform;
  std::uint64_t seed = 0;

  /// tau = n^{-2/k}, T = log n.
  static SamplerConfig for_sample_size(std::size_t n, Eigen::Index k, int steps = 200);

  TimeGrid time_grid() const;
};

/// One draw of the reverse OU SDE started from N(0, I_d) and integrated by
/// Euler-Maruyama from forward time T down to tau:
///   y <- y + dt (y + 2 score(t_{j+1}, y)) + sqrt(2 dt) xi.
/// `score` is the VP score field. Throws NonFiniteState on blow-up.
Vector sample_one(const ScoreFn& score, const SamplerConfig& config, Eigen::Index dim, Rng& rng);

/// `count` independent draws; draw i uses the substream derive_seed(config.seed, i),
/// so the result does not depend on the worker count. Returns d x count.
PointSet sample_batch(const ScoreFn& score, const SamplerConfig& config, Eigen::Index dim, std::size_t count);

}  // namespace uosdiff
