#include "uosdiff/subspace_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uosdiff/error.hpp"

namespace uosdiff {
namespace {

Matrix gather(const PointSet& samples, const std::vector<std::size_t>& pool, const std::vector<std::size_t>& pick) {
  Matrix m(samples.rows(), static_cast<Eigen::Index>(pick.size()));
  for (std::size_t j = 0; j < pick.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = samples.col(static_cast<Eigen::Index>(pool[pick[j]]));
  return m;
}

bool dependent(const Matrix& m, double rank_tol) { return numerical_rank(m, rank_tol) < m.cols(); }

// Advances `c` (strictly increasing, values < n) to the next combination in
// colex order. Returns false after the last one.
bool next_colex(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t r = c.size();
  for (std::size_t j = 0; j < r; ++j) {
    const std::size_t limit = (j + 1 < r) ? c[j + 1] : n;
    if (c[j] + 1 < limit) {
      ++c[j];
      for (std::size_t i = 0; i < j; ++i) c[i] = i;
      return true;
    }
  }
  return false;
}

}  // namespace

RecoveryResult recover(const PointSet& samples, std::size_t m_max, Eigen::Index k_max, Rng& rng,
                       const RecoveryOptions& options) {
  if (samples.cols() == 0) throw Error(ErrorKind::InvalidArgument, "recover needs at least one sample");
  if (m_max < 1 || k_max < 1) throw Error(ErrorKind::InvalidArgument, "recover needs M_max >= 1 and k_max >= 1");

  const auto n = static_cast<std::size_t>(samples.cols());
  const auto subset_size = static_cast<std::size_t>(k_max) + 1;
  const std::size_t pool_cap = options.pool_size > 0 ? options.pool_size : 40 * subset_size;

  RecoveryResult result;
  result.assignments.assign(n, RecoveryResult::kUnassigned);

  const Vector norms = samples.colwise().norm();
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);

  for (std::size_t round = 0; round < m_max && !remaining.empty(); ++round) {
    // Zero vectors lie on every subspace and would form trivial dependent sets.
    std::vector<std::size_t> candidates;
    for (auto idx : remaining)
      if (norms[static_cast<Eigen::Index>(idx)] >= 1e-12) candidates.push_back(idx);
    if (candidates.size() < subset_size) break;

    const std::size_t pool_n = std::min(pool_cap, candidates.size());
    for (std::size_t j = 0; j < pool_n; ++j) {
      const auto swap_with = j + rng.uniform_index(candidates.size() - j);
      std::swap(candidates[j], candidates[swap_with]);
    }
    candidates.resize(pool_n);

    std::vector<std::size_t> combo(subset_size);
    std::iota(combo.begin(), combo.end(), 0);
    bool found = false;
    do {
      if (++result.subsets_examined > options.max_subsets)
        throw Error(ErrorKind::BudgetExceeded,
                    "subset search exceeded " + std::to_string(options.max_subsets) + " candidates");
      if (dependent(gather(samples, candidates, combo), options.rank_tol)) {
        found = true;
        break;
      }
    } while (next_colex(combo, pool_n));
    if (!found) break;

    // Shrink to a minimal dependent subset. One pass suffices: once dropping
    // a member leaves an independent set, every later subset of it stays
    // independent.
    std::vector<std::size_t> circuit = combo;
    for (std::size_t pos = 0; pos < circuit.size() && circuit.size() > 1;) {
      std::vector<std::size_t> reduced = circuit;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(pos));
      if (dependent(gather(samples, candidates, reduced), options.rank_tol))
        circuit = std::move(reduced);
      else
        ++pos;
    }

    Subspace found_space = orthonormalize(gather(samples, candidates, circuit), options.rank_tol);
    const int label = static_cast<int>(result.subspaces.size());
    std::vector<std::size_t> still_remaining;
    for (auto idx : remaining) {
      const auto col = static_cast<Eigen::Index>(idx);
      const double res = residual_norm(found_space, samples.col(col));
      if (res <= options.assign_tol * (1.0 + norms[col]))
        result.assignments[idx] = label;
      else
        still_remaining.push_back(idx);
    }
    remaining = std::move(still_remaining);
    result.subspaces.push_back(std::move(found_space));
  }

  result.unassigned = std::move(remaining);
  return result;
}

std::size_t classify(const RecoveryResult& result, const Vector& x) {
  if (result.subspaces.empty()) throw Error(ErrorKind::EmptyRecovery, "no recovered subspaces to classify against");
  std::size_t best = 0;
  double best_res = residual_norm(result.subspaces[0], x);
  for (std::size_t i = 1; i < result.subspaces.size(); ++i) {
    const double res = residual_norm(result.subspaces[i], x);
    if (res < best_res) {
      best_res = res;
      best = i;
    }
  }
  return best;
}

std::vector<int> classify_all(const RecoveryResult& result, const PointSet& points) {
  std::vector<int> labels(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j)
    labels[static_cast<std::size_t>(j)] = static_cast<int>(classify(result, points.col(j)));
  return labels;
}

std::size_t required_n0(std::size_t m, std::size_t k, std::size_t n, double c_sc) {
  const double raw = std::ceil(c_sc * static_cast<double>(m * m * k) * std::log(static_cast<double>(n)));
  const auto value = raw > 0.0 ? static_cast<std::size_t>(raw) : std::size_t{0};
  return std::min(value, n / 2);
}

}  // namespace uosdiff
