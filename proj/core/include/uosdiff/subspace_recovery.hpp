#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uosdiff/geometry.hpp"
#include "uosdiff/random.hpp"
#include "uosdiff/types.hpp"

namespace uosdiff {

struct RecoveryOptions {
  double rank_tol = kRankTol;
  /// A sample lies on a subspace when its residual is <= assign_tol * (1 + |x|).
  double assign_tol = 1e-8;
  /// Samples drawn from the remainder per round; 0 means 40 * (k_max + 1).
  std::size_t pool_size = 0;
  /// Total (k_max+1)-subsets examined across all rounds before BudgetExceeded.
  std::uint64_t max_subsets = 1'000'000;
};

struct RecoveryResult {
  static constexpr int kUnassigned = -1;

  std::vector<Subspace> subspaces;
  std::vector<int> assignments;       // per input sample, or kUnassigned
  std::vector<std::size_t> unassigned;
  std::uint64_t subsets_examined = 0;
};

/// Exact recovery of a union of subspaces from noiseless samples (columns
/// of `samples`). Each round draws a pool from the remaining samples, scans
/// its (k_max+1)-subsets in colex order for a linearly dependent one, shrinks
/// it greedily to a minimal dependent subset, emits that subset's span and
/// removes every remaining sample lying on it. Stops after m_max rounds or
/// when the pool holds no dependent subset.
///
/// Throws BudgetExceeded when options.max_subsets is exceeded.
RecoveryResult recover(const PointSet& samples, std::size_t m_max, Eigen::Index k_max, Rng& rng,
                       const RecoveryOptions& options = {});

/// Index of the recovered subspace with the smallest residual; ties go to the
/// lowest index. Throws EmptyRecovery when nothing was recovered.
std::size_t classify(const RecoveryResult& result, const Vector& x);
std::vector<int> classify_all(const RecoveryResult& result, const PointSet& points);

/// ceil(C_sc * M^2 * k * log n), clamped to at most n / 2.
std::size_t required_n0(std::size_t m, std::size_t k, std::size_t n, double c_sc = 1.0);

}  // namespace uosdiff
