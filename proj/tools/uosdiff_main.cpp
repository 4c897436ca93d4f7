#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uosdiff/uosdiff.hpp"

namespace {

using namespace uosdiff;

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  KeyValueConfig kv = KeyValueConfig::load(path);
  for (const auto& assignment : overrides) kv.set(assignment);
  ExperimentConfig cfg = ExperimentConfig::from(kv);
  cfg.validate();
  return cfg;
}

void report_slope(const ResultTable& table, const std::string& x, const std::string& y) {
  try {
    const std::size_t xi = table.column(x);
    double lo = 1e300, hi = 0.0;
    for (const auto& row : table.rows) {
      const double v = std::stod(row[xi]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const SlopeFit fit = fit_loglog_slope(table, x, y, lo, hi);
    std::printf("slope %s vs %s: %.4f +- %.4f (%zu points)\n", y.c_str(), x.c_str(), fit.slope, fit.std_error,
                fit.points);
  } catch (const Error& e) {
    std::printf("slope unavailable: %s\n", e.what());
  }
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::InvalidRange, "range must be lo,hi: " + text);
  const double lo = std::stod(text.substr(0, comma));
  const double hi = std::stod(text.substr(comma + 1));
  if (!(lo < hi)) throw Error(ErrorKind::InvalidRange, "range must satisfy lo < hi: " + text);
  return {lo, hi};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Union-of-subspaces diffusion score estimation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* score_error = app.add_subcommand("score-error", "L2 score error versus diffusion time");
  score_error->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  score_error->add_option("--set", overrides, "override a config key (key=value)");

  auto* sample = app.add_subcommand("sample", "W1 of generated samples versus sample size");
  sample->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  sample->add_option("--set", overrides, "override a config key (key=value)");

  std::string csv_path, x_col = "t", y_col = "mse", range_text;
  auto* slope = app.add_subcommand("slope", "log-log slope of a result CSV");
  slope->add_option("--csv", csv_path, "result CSV")->required()->check(CLI::ExistingFile);
  slope->add_option("--x", x_col, "x column");
  slope->add_option("--y", y_col, "y column");
  slope->add_option("--range", range_text, "x range lo,hi")->required();

  std::uint64_t selftest_seed = 0;
  std::string selftest_out;
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  selftest->add_option("--seed", selftest_seed, "seed");
  selftest->add_option("--out", selftest_out, "write the result table to this CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*score_error) {
      const ExperimentConfig cfg = load_config(config_path, overrides);
      const ResultTable table = run_score_error_experiment(cfg);
      const auto path = write_experiment_outputs(cfg, "score_error", table, "t", "mse", "stderr");
      std::cout << "wrote " << path.string() << '\n';
      report_slope(table, "t", "mse");
    } else if (*sample) {
      const ExperimentConfig cfg = load_config(config_path, overrides);
      const ResultTable table = run_sampling_experiment(cfg);
      const auto path = write_experiment_outputs(cfg, "sampling", table, "n", "w1", "");
      std::cout << "wrote " << path.string() << '\n';
      report_slope(table, "n", "w1");
    } else if (*slope) {
      const auto [lo, hi] = parse_range(range_text);
      const SlopeFit fit = fit_loglog_slope(ResultTable::read_csv(csv_path), x_col, y_col, lo, hi);
      std::printf("slope=%.6f stderr=%.6f points=%zu\n", fit.slope, fit.std_error, fit.points);
    } else if (*selftest) {
      const ResultTable table = run_selftest(selftest_seed);
      if (selftest_out.empty()) {
        std::cout << table.to_csv();
      } else {
        table.write_csv(selftest_out);
        std::cout << "wrote " << selftest_out << '\n';
      }
      if (!selftest_passed(table)) {
        std::cerr << "selftest: one or more checks failed\n";
        return 1;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
