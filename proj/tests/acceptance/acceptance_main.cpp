// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "uosdiff/uosdiff.hpp"

namespace fs = std::filesystem;
using namespace uosdiff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig load(const std::string& file, const std::vector<std::string>& overrides = {}) {
  KeyValueConfig kv = KeyValueConfig::load(fs::path(UOSDIFF_CONFIG_DIR) / file);
  for (const auto& o : overrides) kv.set(o);
  return ExperimentConfig::from(kv);
}

std::vector<double> agg_column(const ResultTable& table, const std::string& name) {
  std::vector<double> out;
  const std::size_t ri = table.column("replicate"), ci = table.column(name);
  for (const auto& row : table.rows)
    if (row[ri] == "agg") out.push_back(std::stod(row[ci]));
  return out;
}

Outcome time_scaling() {
  const ExperimentConfig cfg = load("desk_score_error.cfg");
  const ResultTable table = run_score_error_experiment(cfg);
  const SlopeFit fit = fit_loglog_slope(table, "t", "mse", 1e-3, 3e-2);
  std::string detail = "slope " + fmt("%.3f", fit.slope) + " +- " + fmt("%.3f", fit.std_error) + " (band [-3.1,-1.9]); mse";
  for (double m : agg_column(table, "mse")) detail += " " + fmt("%.3g", m);
  return {fit.slope >= -3.1 && fit.slope <= -1.9, detail};
}

Outcome ambient_dimension() {
  double mean[2], se[2];
  const int dims[2] = {8, 32};
  for (int i = 0; i < 2; ++i) {
    const ExperimentConfig cfg = ExperimentConfig::from(KeyValueConfig::parse(
        "seed = 2\nd = " + std::to_string(dims[i]) +
        "\nM = 4\nk = 2\nN = 4000\nn_eval = 5000\nreplicates = 5\ntimes = 0.01\n"));
    const ResultTable table = run_score_error_experiment(cfg);
    mean[i] = agg_column(table, "mse").at(0);
    se[i] = agg_column(table, "stderr").at(0);
  }
  const double ratio = mean[1] / mean[0];
  const double conservative = (mean[1] - 3 * se[1]) / (mean[0] + 3 * se[0]);
  return {conservative <= 8.0, "mse d=8 " + fmt("%.4g", mean[0]) + ", d=32 " + fmt("%.4g", mean[1]) + ", ratio " +
                                   fmt("%.3f", ratio) + " (3-stderr lower " + fmt("%.3f", conservative) + ")"};
}

Outcome discrete_exactness() {
  Rng rng(303);
  const Subspace s = random_subspace(10, 3, rng);
  const Matrix low = rng.normal_matrix(3, 50);
  const PointSet atoms = s.basis() * low;
  EstimatorOptions options;
  options.thresholding = false;
  options.clipping = false;
  const TrainedScoreModel model({s}, atoms, std::vector<int>(50, 0), options);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const double t = std::exp(rng.uniform(std::log(1e-3), std::log(3.0)));
    const Vector x = atoms.col(static_cast<Eigen::Index>(rng.uniform_index(50))) + std::sqrt(t) * rng.normal_vector(10);
    Vector logits(50);
    for (Eigen::Index j = 0; j < 50; ++j) logits[j] = -(x - atoms.col(j)).squaredNorm() / (2 * t);
    const Vector soft = (logits.array() - logits.maxCoeff()).exp();
    const Vector exact = (atoms * soft / soft.sum() - x) / t;
    worst = std::max(worst, (model.full_score(t, x) - exact).norm() / exact.norm());
  }
  return {worst <= 1e-8, "max relative error " + fmt("%.3g", worst) + " over 500 (t, x)"};
}

Outcome bound_invariants() {
  Rng rng(404);
  const UoSTarget target = UoSTarget::random(TargetSpec{6, 3, 2, 2, 1.0, 3.0, 0.05, 1.0, 4.0}, rng);
  const LabeledSamples data = target.sample(600, rng);
  std::vector<Subspace> subspaces;
  for (const auto& c : target.components()) subspaces.push_back(c.subspace);
  const TrainedScoreModel model(subspaces, data.points, data.labels);

  std::size_t clip = 0, weight = 0, threshold = 0, thresholded = 0;
  double lse_gap = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double t = std::exp(rng.uniform(std::log(1e-4), std::log(10.0)));
    const std::size_t i = rng.uniform_index(3);
    const Vector u = 3.0 * rng.normal_vector(2);
    const Vector s = model.low_dim_score(i, t, u);
    if (!(s.norm() <= model.clip_radius(t))) ++clip;
    const KdeValue kde = model.low_dim_kde(i, t, u);
    if (kde.log_density < model.log_threshold(i, t)) {
      ++thresholded;
      if (s != Vector::Zero(2)) ++threshold;
    }
    const Vector x = target.sample(1, rng).points.col(0) + std::sqrt(t) * rng.normal_vector(6);
    const Vector w = model.weights(t, x);
    if (!(w.minCoeff() >= 0.0 && w.maxCoeff() <= 1.0 && w.sum() <= 1.0 + 1e-12)) ++weight;

    // Naive kernel sum where it does not underflow.
    const Matrix& pts = model.low_dim_samples(i);
    double naive = 0.0;
    for (Eigen::Index j = 0; j < pts.cols(); ++j) naive += std::exp(-(pts.col(j) - u).squaredNorm() / (2 * t));
    if (naive > 1e-250) {
      const double log_naive =
          std::log(naive / static_cast<double>(pts.cols())) - std::log(2 * std::numbers::pi * t);
      lse_gap = std::max(lse_gap, std::abs(log_naive - kde.log_density) / std::max(1.0, std::abs(log_naive)));
    }
  }
  const bool ok = clip == 0 && weight == 0 && threshold == 0 && lse_gap <= 1e-10;
  return {ok, "clip violations " + std::to_string(clip) + ", weight violations " + std::to_string(weight) +
                  ", threshold violations " + std::to_string(threshold) + "/" + std::to_string(thresholded) +
                  ", lse gap " + fmt("%.2g", lse_gap)};
}

Outcome exact_recovery() {
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(505, seed));
    const UoSTarget target = UoSTarget::random(TargetSpec{8, 3, 2, 2, 1.0, 3.0, 0.05, 1.0, 4.0}, rng);
    const LabeledSamples data = target.sample(60, rng);
    Rng recovery_rng = rng.substream(Stream::Recovery);
    const RecoveryResult result = recover(data.points, 3, 2, recovery_rng);
    if (result.subspaces.size() != 3) continue;
    std::vector<int> to_true(3, -1);
    bool ok = true;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c)
        if (projector_distance(result.subspaces[r], target.component(c).subspace) <= 1e-8) to_true[r] = static_cast<int>(c);
      ok = ok && to_true[r] >= 0;
    }
    if (!ok) continue;
    const LabeledSamples fresh = target.sample(1000, rng);
    const std::vector<int> labels = classify_all(result, fresh.points);
    for (std::size_t j = 0; j < labels.size(); ++j)
      ok = ok && to_true[static_cast<std::size_t>(labels[j])] == fresh.labels[j];
    successes += ok;
  }
  return {successes == 20, std::to_string(successes) + "/20 seeds recovered and classified exactly"};
}

Outcome n_scaling() {
  const ExperimentConfig cfg = load("desk_sampling.cfg");
  const ResultTable table = run_sampling_experiment(cfg);
  const std::vector<double> w1 = agg_column(table, "w1");
  const SlopeFit fit = fit_loglog_slope(table, "n", "w1", 500, 8000);
  bool monotone = true;
  for (std::size_t i = 1; i < w1.size(); ++i) monotone = monotone && w1[i] <= 1.15 * w1[i - 1];
  std::string detail = "slope " + fmt("%.3f", fit.slope) + " (band [-0.9,-0.15]); mean W1";
  for (double w : w1) detail += " " + fmt("%.4g", w);
  detail += monotone ? "; monotone" : "; not monotone";
  return {fit.slope >= -0.9 && fit.slope <= -0.15 && monotone, detail};
}

Outcome gaussian_sampler() {
  constexpr Eigen::Index d = 4;
  constexpr std::size_t draws = 10000, block = 1024, blocks = draws / block;
  const ScoreFn score = [](double, const Vector& x) -> Vector { return -x; };
  SamplerConfig sc;
  sc.tau = 1e-3;
  sc.T = 10.0;
  sc.steps = 200;
  sc.seed = 707;
  const PointSet coarse = sample_batch(score, sc, d, draws);
  sc.steps = 400;
  sc.seed = 708;
  const PointSet fine = sample_batch(score, sc, d, draws);

  const Vector mean = coarse.rowwise().mean();
  const PointSet centered = coarse.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / static_cast<double>(draws - 1);
  const double cov_err = (cov - Matrix::Identity(d, d)).norm() / std::sqrt(static_cast<double>(d));

  // Paired comparison against shared reference blocks; the floor is the
  // standard error of W1 between independent Gaussian blocks.
  Rng rng(709);
  std::vector<double> diff, floor_w1;
  for (std::size_t b = 0; b < blocks; ++b) {
    const PointSet ref = rng.normal_matrix(d, block);
    const PointSet other = rng.normal_matrix(d, block);
    const auto cols = static_cast<Eigen::Index>(b * block);
    diff.push_back(w1_exact(coarse.middleCols(cols, block), ref) - w1_exact(fine.middleCols(cols, block), ref));
    floor_w1.push_back(w1_exact(other, ref));
  }
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double m = mean_of(floor_w1);
  double var = 0.0;
  for (double v : floor_w1) var += (v - m) * (v - m);
  const double floor_se = std::sqrt(var / static_cast<double>(blocks - 1) / static_cast<double>(blocks));
  const double delta = std::abs(mean_of(diff));
  return {cov_err <= 0.1 && delta < 2 * floor_se,
          "covariance rel. error " + fmt("%.4f", cov_err) + "; step-halving dW1 " + fmt("%.4g", delta) +
              " vs noise floor " + fmt("%.4g", floor_se)};
}

Outcome oracle_gradient() {
  Rng rng(808);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_index(5));
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(std::min<Eigen::Index>(d - 1, 3))));
    const std::size_t m = 1 + rng.uniform_index(3);
    const UoSTarget target = UoSTarget::random(TargetSpec{d, m, k, 2, 1.0, 3.0, 0.05, 1.0, 4.0}, rng);
    const double t = std::exp(rng.uniform(std::log(1e-2), std::log(2.0)));
    const Vector x = target.sample(1, rng).points.col(0) + std::sqrt(t) * rng.normal_vector(d);
    const Vector g = true_score(target, t, x);
    const double h = 1e-5 * std::sqrt(t);
    Vector fd(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      Vector xp = x, xm = x;
      xp[r] += h;
      xm[r] -= h;
      fd[r] = (smoothed_density(target, t, xp) - smoothed_density(target, t, xm)) / (2 * h);
    }
    worst = std::max(worst, (fd - g).norm() / std::max(g.norm(), 1.0));
  }
  return {worst <= 1e-4, "max relative error " + fmt("%.3g", worst) + " over 200 triples"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path root = fs::current_path() / "acceptance_determinism";
  fs::remove_all(root);
  const std::string cli = UOSDIFF_CLI_PATH;
  const std::string cfg = UOSDIFF_CONFIG_DIR;
  std::vector<std::string> files;
  bool ok = true;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    fs::create_directories(dir);
    const std::string out = "--set outputs=" + dir.string();
    const std::vector<std::string> commands = {
        cli + " selftest --seed 3 --out " + (dir / "selftest.csv").string(),
        cli + " score-error --config " + cfg + "/desk_score_error.cfg " + out +
            " --set N=800 --set M=3 --set replicates=2 --set n_eval=300 --set times.count=4",
        cli + " sample --config " + cfg + "/desk_sampling.cfg " + out +
            " --set sampler.n_values=300,600 --set replicates=2 --set sampler.n_gen=128 --set sampler.steps=50"};
    for (const auto& c : commands) ok = ok && std::system((c + " > /dev/null").c_str()) == 0;
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(root / "run0")) {
    const fs::path other = root / "run1" / entry.path().filename();
    ok = ok && fs::exists(other) && slurp(entry.path()) == slurp(other);
    ++compared;
  }
  ok = ok && compared == 5;
  return {ok, std::to_string(compared) + " output files compared byte-for-byte"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 time scaling of the score error", time_scaling},
      {"2 ambient dimension insensitivity", ambient_dimension},
      {"3 discrete target exactness", discrete_exactness},
      {"4 bound invariants", bound_invariants},
      {"5 exact subspace recovery", exact_recovery},
      {"6 sample size scaling of W1", n_scaling},
      {"7 sampler on a Gaussian target", gaussian_sampler},
      {"8 oracle score gradient", oracle_gradient},
      {"9 CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    std::printf("%s criterion %s: %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
