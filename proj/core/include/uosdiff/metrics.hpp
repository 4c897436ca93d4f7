#pragma once

#include <cstddef>
#include <vector>

#include "uosdiff/random.hpp"
#include "uosdiff/score_estimator.hpp"
#include "uosdiff/target_model.hpp"
#include "uosdiff/types.hpp"

namespace uosdiff {

struct ScoreErrorRow {
  double t = 0.0;
  double mse = 0.0;     // mean of |s_hat(X) - s*(X)|^2, X ~ p_t
  double std_error = 0.0;  // Monte Carlo standard error of mse
  std::size_t n_eval = 0;
  std::size_t n_train = 0;
  std::size_t replicate = 0;
};

/// Monte Carlo L2 score error of `estimate` (a VE score field) against the
/// exact score of `target` at time t. Evaluation points are Y + sqrt(t) xi
/// with Y ~ target. Throws NonpositiveTime; n_eval must be >= 2.
ScoreErrorRow score_mse(const ScoreFn& estimate, const UoSTarget& target, double t, std::size_t n_eval, Rng& rng,
                        std::size_t n_train = 0);
ScoreErrorRow score_mse(const TrainedScoreModel& model, const UoSTarget& target, double t, std::size_t n_eval,
                        Rng& rng);

/// Largest sample size accepted by w1_exact.
inline constexpr std::size_t kExactW1Cap = 4096;

/// Minimum-cost perfect matching for a square cost matrix (shortest
/// augmenting path with potentials, O(n^3)). Returns the column assigned to
/// each row.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

/// Empirical W1 between equal-size point sets (columns), via optimal
/// assignment on Euclidean costs. Throws SizeMismatch / SizeCap.
double w1_exact(const PointSet& a, const PointSet& b);

/// Mean over random unit directions of the 1-d W1 of the projections.
/// Throws SizeMismatch.
double w1_sliced(const PointSet& a, const PointSet& b, std::size_t n_projections, Rng& rng);

}  // namespace uosdiff
