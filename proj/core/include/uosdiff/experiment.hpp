#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "uosdiff/config.hpp"
#include "uosdiff/result_table.hpp"
#include "uosdiff/score_estimator.hpp"
#include "uosdiff/target_model.hpp"

namespace uosdiff {

/// Per-replicate seed: derive_seed(master, kReplicateStreamBase + replicate).
inline constexpr std::uint64_t kReplicateStreamBase = 0x1000;
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate);

/// The fixed target of an experiment, generated from the master seed.
UoSTarget make_target(const ExperimentConfig& cfg);

struct PipelineResult {
  std::optional<TrainedScoreModel> model;  // empty when recovery failed
  std::string status = "ok";
  std::size_t n0 = 0;
  std::size_t n_train = 0;
};

/// generate n samples -> first n0 to recovery -> classify the remaining N
/// -> train. Recovery counts as failed when it finds fewer subspaces than the
/// target has, exceeds its budget, or leaves a training sample off every
/// recovered subspace.
PipelineResult train_pipeline(const UoSTarget& target, const ExperimentConfig& cfg, std::size_t n_total,
                              std::uint64_t seed);

/// Columns: t,replicate,mse,stderr,n_eval,n_train,status. One row per
/// (t, replicate) followed by an aggregate row per t (replicate=agg,
/// mean and standard error over successful replicates, status reps=<count>).
ResultTable run_score_error_experiment(const ExperimentConfig& cfg);

/// Columns: n,replicate,w1,n_gen,status, with aggregate rows per n.
/// W1 is computed exactly when n_gen <= 4096, sliced otherwise.
ResultTable run_sampling_experiment(const ExperimentConfig& cfg);

/// Writes <outputs>/<experiment>_<seed>.csv and .svg; returns the CSV path.
std::filesystem::path write_experiment_outputs(const ExperimentConfig& cfg, const std::string& experiment,
                                               const ResultTable& table, const std::string& x_col,
                                               const std::string& y_col, const std::string& err_col);

}  // namespace uosdiff
