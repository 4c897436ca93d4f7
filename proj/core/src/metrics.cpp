#include "uosdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uosdiff/error.hpp"
#include "uosdiff/parallel.hpp"

namespace uosdiff {

ScoreErrorRow score_mse(const ScoreFn& estimate, const UoSTarget& target, double t, std::size_t n_eval, Rng& rng,
                        std::size_t n_train) {
  detail::require_positive_time(t);
  if (n_eval < 2) throw Error(ErrorKind::InvalidArgument, "score_mse needs n_eval >= 2");

  const auto n = static_cast<Eigen::Index>(n_eval);
  PointSet points = target.sample(n, rng).points;
  const double scale = std::sqrt(t);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index r = 0; r < points.rows(); ++r) points(r, j) += scale * rng.normal();

  const SmoothedTarget exact = target.smoothed(t);
  std::vector<double> errors(n_eval);
  parallel_for(n_eval, [&](std::size_t j) {
    const Vector x = points.col(static_cast<Eigen::Index>(j));
    errors[j] = (estimate(t, x) - exact.score(x)).squaredNorm();
  });

  // Summed in index order so the result is independent of the worker count.
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= static_cast<double>(n_eval);
  double var = 0.0;
  for (double e : errors) var += (e - mean) * (e - mean);
  var /= static_cast<double>(n_eval - 1);

  ScoreErrorRow row;
  row.t = t;
  row.mse = mean;
  row.std_error = std::sqrt(var / static_cast<double>(n_eval));
  row.n_eval = n_eval;
  row.n_train = n_train;
  return row;
}

ScoreErrorRow score_mse(const TrainedScoreModel& model, const UoSTarget& target, double t, std::size_t n_eval,
                        Rng& rng) {
  return score_mse(model.ve_score_fn(), target, t, n_eval, rng, model.total_count());
}

std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw Error(ErrorKind::SizeMismatch, "assignment needs a square cost matrix");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-based potentials; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r0 = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = cost(static_cast<Eigen::Index>(r0 - 1), static_cast<Eigen::Index>(col - 1)) - u[r0] - v[col];
        if (cur < min_slack[col]) {
          min_slack[col] = cur;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t col = 1; col <= n; ++col) assignment[match[col] - 1] = col - 1;
  return assignment;
}

double w1_exact(const PointSet& a, const PointSet& b) {
  if (a.cols() != b.cols() || a.rows() != b.rows())
    throw Error(ErrorKind::SizeMismatch, "w1_exact needs equal-size point sets in the same dimension");
  if (a.cols() < 1) throw Error(ErrorKind::SizeMismatch, "w1_exact needs at least one point");
  if (static_cast<std::size_t>(a.cols()) > kExactW1Cap)
    throw Error(ErrorKind::SizeCap, "w1_exact is capped at " + std::to_string(kExactW1Cap) + " points");

  const Eigen::Index n = a.cols();
  Matrix cost(n, n);
  for (Eigen::Index j = 0; j < n; ++j) cost.col(j) = (a.colwise() - b.col(j)).colwise().norm().transpose();
  const auto assignment = solve_assignment(cost);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += cost(i, static_cast<Eigen::Index>(assignment[static_cast<std::size_t>(i)]));
  return total / static_cast<double>(n);
}

double w1_sliced(const PointSet& a, const PointSet& b, std::size_t n_projections, Rng& rng) {
  if (a.cols() != b.cols() || a.rows() != b.rows())
    throw Error(ErrorKind::SizeMismatch, "w1_sliced needs equal-size point sets in the same dimension");
  if (a.cols() < 1 || n_projections < 1) throw Error(ErrorKind::InvalidArgument, "w1_sliced needs data and projections");

  const Eigen::Index n = a.cols();
  std::vector<double> pa(static_cast<std::size_t>(n)), pb(static_cast<std::size_t>(n));
  double total = 0.0;
  for (std::size_t p = 0; p < n_projections; ++p) {
    Vector dir = rng.normal_vector(a.rows());
    while (dir.norm() == 0.0) dir = rng.normal_vector(a.rows());
    dir.normalize();
    const Vector proj_a = a.transpose() * dir;
    const Vector proj_b = b.transpose() * dir;
    std::copy(proj_a.data(), proj_a.data() + n, pa.begin());
    std::copy(proj_b.data(), proj_b.data() + n, pb.begin());
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) sum += std::abs(pa[i] - pb[i]);
    total += sum / static_cast<double>(n);
  }
  return total / static_cast<double>(n_projections);
}

}  // namespace uosdiff
