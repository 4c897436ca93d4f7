#include "uosdiff/experiment.hpp"

#include <cmath>
#include <fstream>

#include "uosdiff/error.hpp"
#include "uosdiff/metrics.hpp"
#include "uosdiff/sampler.hpp"
#include "uosdiff/subspace_recovery.hpp"

namespace uosdiff {

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate) {
  return derive_seed(master_seed, kReplicateStreamBase + replicate);
}

UoSTarget make_target(const ExperimentConfig& cfg) {
  Rng rng = Rng(cfg.seed).substream(Stream::Target);
  return UoSTarget::random(cfg.target, rng);
}

PipelineResult train_pipeline(const UoSTarget& target, const ExperimentConfig& cfg, std::size_t n_total,
                              std::uint64_t seed) {
  const Rng base(seed);
  Rng data_rng = base.substream(Stream::Data);
  const LabeledSamples data = target.sample(static_cast<Eigen::Index>(n_total), data_rng);

  PipelineResult out;
  out.n0 = required_n0(cfg.m(), static_cast<std::size_t>(cfg.k()), n_total, cfg.recovery.c_sc);
  out.n_train = n_total - out.n0;
  if (out.n0 == 0 || out.n_train < 2) {
    out.status = "recovery_failed";
    return out;
  }

  const PointSet recovery_part = data.points.leftCols(static_cast<Eigen::Index>(out.n0));
  const PointSet train_part = data.points.rightCols(static_cast<Eigen::Index>(out.n_train));
  Rng recovery_rng = base.substream(Stream::Recovery);
  RecoveryResult recovery;
  try {
    recovery = recover(recovery_part, cfg.m_max(), cfg.k_max(), recovery_rng, cfg.recovery.options);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
    out.status = "recovery_failed";
    return out;
  }
  if (recovery.subspaces.size() < target.component_count()) {
    out.status = "recovery_failed";
    return out;
  }

  const std::vector<int> labels = classify_all(recovery, train_part);
  for (Eigen::Index j = 0; j < train_part.cols(); ++j) {
    const auto& s = recovery.subspaces[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
    if (residual_norm(s, train_part.col(j)) > cfg.recovery.options.assign_tol * (1.0 + train_part.col(j).norm())) {
      out.status = "recovery_failed";
      return out;
    }
  }
  out.model.emplace(recovery.subspaces, train_part, labels, cfg.estimator);
  return out;
}

namespace {

struct Aggregate {
  double mean = std::nan("");
  double std_error = std::nan("");
  std::size_t count = 0;
};

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    a.std_error = 0.0;
    return a;
  }
  double var = 0.0;
  for (double v : values) var += (v - a.mean) * (v - a.mean);
  var /= static_cast<double>(values.size() - 1);
  a.std_error = std::sqrt(var / static_cast<double>(values.size()));
  return a;
}

}  // namespace

ResultTable run_score_error_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const UoSTarget target = make_target(cfg);
  const std::size_t n_total = cfg.total_samples();

  // results[r][q] for replicate r and time index q.
  std::vector<std::vector<ScoreErrorRow>> results(cfg.replicates);
  std::vector<std::string> status(cfg.replicates);
  std::size_t n_train = 0;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t seed = replicate_seed(cfg.seed, r);
    PipelineResult pipeline = train_pipeline(target, cfg, n_total, seed);
    status[r] = pipeline.status;
    n_train = pipeline.n_train;
    if (!pipeline.model) continue;
    const Rng eval_base = Rng(seed).substream(Stream::Eval);
    for (std::size_t q = 0; q < cfg.times.size(); ++q) {
      Rng eval_rng = eval_base.substream(q);
      ScoreErrorRow row = score_mse(*pipeline.model, target, cfg.times[q], cfg.n_eval, eval_rng);
      row.replicate = r;
      results[r].push_back(row);
    }
  }

  ResultTable table;
  table.columns = {"t", "replicate", "mse", "stderr", "n_eval", "n_train", "status"};
  for (std::size_t q = 0; q < cfg.times.size(); ++q) {
    const std::string t = format_number(cfg.times[q]);
    std::vector<double> ok_mse;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      if (results[r].empty()) {
        table.rows.push_back({t, std::to_string(r), "nan", "nan", std::to_string(cfg.n_eval), std::to_string(n_train),
                              status[r]});
        continue;
      }
      const auto& row = results[r][q];
      ok_mse.push_back(row.mse);
      table.rows.push_back({t, std::to_string(r), format_number(row.mse), format_number(row.std_error),
                            std::to_string(row.n_eval), std::to_string(row.n_train), "ok"});
    }
    const Aggregate agg = aggregate(ok_mse);
    table.rows.push_back({t, "agg", format_number(agg.mean), format_number(agg.std_error), std::to_string(cfg.n_eval),
                          std::to_string(n_train), "reps=" + std::to_string(agg.count)});
  }
  return table;
}

ResultTable run_sampling_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const UoSTarget target = make_target(cfg);
  std::vector<std::size_t> n_values = cfg.sampler.n_values;
  if (n_values.empty()) n_values.push_back(cfg.total_samples());

  const ScoreFn oracle_vp = make_vp_score([&target](double t, const Vector& x) { return true_score(target, t, x); });

  ResultTable table;
  table.columns = {"n", "replicate", "w1", "n_gen", "status"};
  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    const std::size_t n = n_values[ni];
    std::vector<double> ok_w1;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      const std::uint64_t seed = derive_seed(replicate_seed(cfg.seed, r), n);
      const Rng base(seed);

      std::optional<TrainedScoreModel> model;
      std::string status = "ok";
      if (!cfg.sampler.oracle) {
        PipelineResult pipeline = train_pipeline(target, cfg, n, seed);
        status = pipeline.status;
        model = std::move(pipeline.model);
      }
      if (status != "ok") {
        table.rows.push_back({std::to_string(n), std::to_string(r), "nan", std::to_string(cfg.sampler.n_gen), status});
        continue;
      }

      SamplerConfig sc = SamplerConfig::for_sample_size(n, cfg.k(), cfg.sampler.steps);
      if (cfg.sampler.tau) sc.tau = *cfg.sampler.tau;
      if (cfg.sampler.T) sc.T = *cfg.sampler.T;
      sc.grid = cfg.sampler.grid;
      sc.seed = base.substream(Stream::Sampler).seed();

      const ScoreFn score = model ? model->vp_score_fn() : oracle_vp;
      const PointSet generated = sample_batch(score, sc, cfg.d(), cfg.sampler.n_gen);
      Rng fresh_rng = base.substream(Stream::Fresh);
      const PointSet fresh = target.sample(static_cast<Eigen::Index>(cfg.sampler.n_gen), fresh_rng).points;
      double w1 = 0.0;
      if (cfg.sampler.n_gen <= kExactW1Cap) {
        w1 = w1_exact(generated, fresh);
      } else {
        Rng proj_rng = base.substream(Stream::Projections);
        w1 = w1_sliced(generated, fresh, cfg.sampler.projections, proj_rng);
      }
      ok_w1.push_back(w1);
      table.rows.push_back(
          {std::to_string(n), std::to_string(r), format_number(w1), std::to_string(cfg.sampler.n_gen), "ok"});
    }
    const Aggregate agg = aggregate(ok_w1);
    table.rows.push_back({std::to_string(n), "agg", format_number(agg.mean), std::to_string(cfg.sampler.n_gen),
                          "reps=" + std::to_string(agg.count)});
  }
  return table;
}

std::filesystem::path write_experiment_outputs(const ExperimentConfig& cfg, const std::string& experiment,
                                               const ResultTable& table, const std::string& x_col,
                                               const std::string& y_col, const std::string& err_col) {
  const std::string stem = experiment + "_" + std::to_string(cfg.seed);
  const auto csv_path = cfg.outputs / (stem + ".csv");
  table.write_csv(csv_path);

  PlotSeries series;
  series.label = "mean " + y_col + " (" + (cfg.name.empty() ? experiment : cfg.name) + ")";
  const std::size_t xi = table.column(x_col), yi = table.column(y_col), ri = table.column("replicate");
  const auto ei = err_col.empty() ? std::optional<std::size_t>{} : std::optional<std::size_t>{table.column(err_col)};
  for (const auto& row : table.rows) {
    if (row[ri] != "agg") continue;
    series.x.push_back(std::stod(row[xi]));
    series.y.push_back(std::stod(row[yi]));
    series.err.push_back(ei ? std::stod(row[*ei]) : 0.0);
  }
  std::ofstream svg(cfg.outputs / (stem + ".svg"), std::ios::binary);
  if (!svg) throw Error(ErrorKind::IoError, "cannot write plot for " + stem);
  svg << render_loglog_svg(experiment, x_col, y_col, {series});
  return csv_path;
}

}  // namespace uosdiff
