#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uosdiff/sampler.hpp"
#include "uosdiff/score_estimator.hpp"
#include "uosdiff/subspace_recovery.hpp"
#include "uosdiff/target_model.hpp"

namespace uosdiff {

/// Flat `key = value` text with dotted section keys. '#' starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Applies `key=value`; throws ConfigError on malformed input.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct SamplingSettings {
  std::optional<double> tau;  // default n^{-2/k}
  std::optional<double> T;    // default log n
  int steps = 200;
  GridKind grid = GridKind::LogUniform;
  std::size_t n_gen = 1024;
  std::vector<std::size_t> n_values;  // sample sizes swept by the sampling experiment
  bool oracle = false;                // plug in the exact score instead of the trained model
  std::size_t projections = 200;      // sliced W1 fallback when n_gen exceeds the exact cap
};

struct RecoverySettings {
  double c_sc = 1.0;
  std::size_t m_max = 0;  // 0: use M
  Eigen::Index k_max = 0;  // 0: use k
  RecoveryOptions options;
};

/// Declarative experiment. Defaults reproduce the d=48, M=128, k=3 setup
/// with N=50000 training samples, 10000 evaluation points and 20 replicates.
struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  TargetSpec target;
  std::size_t n = 0;        // total samples (recovery + estimation)
  std::size_t n_train = 0;  // N; used to derive n when n is unset
  std::vector<double> times;
  std::size_t n_eval = 10000;
  std::size_t replicates = 20;
  SamplingSettings sampler;
  RecoverySettings recovery;
  EstimatorOptions estimator;
  std::filesystem::path outputs = ".";

  Eigen::Index d() const noexcept { return target.ambient_dim; }
  std::size_t m() const noexcept { return target.subspace_count; }
  Eigen::Index k() const noexcept { return target.intrinsic_dim; }

  /// Total sample size; when only N is configured, the smallest n with
  /// n - required_n0(n) >= N.
  std::size_t total_samples() const;
  std::size_t m_max() const noexcept { return recovery.m_max ? recovery.m_max : m(); }
  Eigen::Index k_max() const noexcept { return recovery.k_max ? recovery.k_max : k(); }

  static ExperimentConfig from(const KeyValueConfig& kv);

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// count values spaced uniformly in log between lo and hi (inclusive).
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

}  // namespace uosdiff
