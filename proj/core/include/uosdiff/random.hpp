#pragma once

#include <cstdint>
#include <random>

#include "uosdiff/types.hpp"

namespace uosdiff {

/// splitmix64 finalizer applied to `state + golden * (stream + 1)`.
/// Used for every seed derivation in the project (replicate seeds,
/// per-purpose substreams, per-sample substreams).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Named substreams used by the experiment pipeline.
enum class Stream : std::uint64_t {
  Target = 1,
  Data = 2,
  Recovery = 3,
  Eval = 4,
  Sampler = 5,
  Fresh = 6,
  Projections = 7,
};

/// Seeded generator. Copyable; copies continue the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent generator for `stream`, derived from the construction seed
  /// only (not from the current engine state).
  Rng substream(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }
  Rng substream(Stream stream) const { return substream(static_cast<std::uint64_t>(stream)); }

  double normal();
  double uniform();
  double uniform(double lo, double hi);
  std::uint64_t uniform_index(std::uint64_t n);
  Vector normal_vector(Eigen::Index n);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace uosdiff
