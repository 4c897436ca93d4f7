#include "uosdiff/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uosdiff/diffusion_clock.hpp"
#include "uosdiff/geometry.hpp"
#include "uosdiff/metrics.hpp"
#include "uosdiff/sampler.hpp"
#include "uosdiff/score_estimator.hpp"
#include "uosdiff/subspace_recovery.hpp"
#include "uosdiff/target_model.hpp"

namespace uosdiff {
namespace {

struct Recorder {
  ResultTable table{{"check", "status", "value"}, {}};

  // Passes when value <= limit.
  void bound(const std::string& name, double value, double limit) {
    table.rows.push_back({name, value <= limit ? "pass" : "fail", format_number(value)});
  }
};

TargetSpec small_spec(Eigen::Index d, std::size_t m, Eigen::Index k) {
  TargetSpec spec;
  spec.ambient_dim = d;
  spec.subspace_count = m;
  spec.intrinsic_dim = k;
  return spec;
}

}  // namespace

ResultTable run_selftest(std::uint64_t seed) {
  Recorder rec;
  Rng rng(seed);

  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Subspace s = random_subspace(48, 3, rng);
      worst = std::max(worst, (s.basis().transpose() * s.basis() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff());
    }
    rec.bound("geometry.orthonormality", worst, 1e-12);
  }
  {
    double idem = 0.0, adj = 0.0, pyth = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Subspace s = random_subspace(6, 2, rng);
      const Vector x = rng.normal_vector(6), y = rng.normal_vector(6);
      const Vector px = project(s, x);
      idem = std::max(idem, (project(s, px) - px).cwiseAbs().maxCoeff());
      adj = std::max(adj, std::abs(px.dot(y) - x.dot(project(s, y))));
      const double r = residual_norm(s, x);
      pyth = std::max(pyth, std::abs(x.squaredNorm() - px.squaredNorm() - r * r) / x.squaredNorm());
    }
    rec.bound("geometry.idempotence", idem, 1e-10);
    rec.bound("geometry.self_adjoint", adj, 1e-10);
    rec.bound("geometry.pythagoras", pyth, 1e-9);
  }
  {
    double unit = 0.0, inv = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double t = std::exp(rng.uniform(std::log(1e-6), std::log(50.0)));
      unit = std::max(unit, std::abs(clock::c(t) * clock::c(t) + clock::sigma(t) * clock::sigma(t) - 1.0));
      inv = std::max(inv, std::abs(clock::h_inverse(clock::h(t)) - t) / t);
    }
    rec.bound("clock.unit_variance", unit, 1e-12);
    rec.bound("clock.h_inverse", inv, 1e-10);
  }

  Rng target_rng = rng.substream(Stream::Target);
  const UoSTarget target = UoSTarget::random(small_spec(6, 3, 2), target_rng);
  {
    Rng data_rng = rng.substream(Stream::Data);
    const LabeledSamples data = target.sample(2000, data_rng);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < data.points.cols(); ++j)
      worst = std::max(worst, residual_norm(target.component(static_cast<std::size_t>(data.labels[static_cast<std::size_t>(j)])).subspace,
                                            data.points.col(j)));
    rec.bound("target.on_subspace", worst, 1e-10);
  }
  {
    double fd = 0.0, wsum = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const double t = std::exp(rng.uniform(std::log(0.05), std::log(2.0)));
      const Vector x = rng.normal_vector(6);
      const SmoothedTarget st = target.smoothed(t);
      const Vector s = st.score(x);
      Vector approx(6);
      for (Eigen::Index i = 0; i < 6; ++i) {
        Vector xp = x, xm = x;
        xp[i] += 1e-5;
        xm[i] -= 1e-5;
        approx[i] = (st.log_density(xp) - st.log_density(xm)) / 2e-5;
      }
      fd = std::max(fd, (approx - s).norm() / std::max(1.0, s.norm()));
      wsum = std::max(wsum, std::abs(st.weights(x).sum() - 1.0));
    }
    rec.bound("target.score_finite_difference", fd, 1e-4);
    rec.bound("target.weight_sum", wsum, 1e-10);
  }
  {
    std::size_t failures = 0;
    for (int trial = 0; trial < 5; ++trial) {
      Rng trg = rng.substream(100 + trial);
      const UoSTarget t8 = UoSTarget::random(small_spec(8, 3, 2), trg);
      const LabeledSamples data = t8.sample(60, trg);
      const RecoveryResult res = recover(data.points, 3, 2, trg);
      bool ok = res.subspaces.size() == 3;
      for (std::size_t i = 0; ok && i < 3; ++i) {
        double best = 1e300;
        for (const auto& s : res.subspaces) best = std::min(best, projector_distance(s, t8.component(i).subspace));
        ok = best <= 1e-8;
      }
      failures += ok ? 0 : 1;
    }
    rec.bound("recovery.exact", static_cast<double>(failures), 0.0);
  }

  {
    Rng data_rng = rng.substream(200);
    const LabeledSamples data = target.sample(400, data_rng);
    std::vector<Subspace> subspaces;
    for (const auto& c : target.components()) subspaces.push_back(c.subspace);
    const TrainedScoreModel model(subspaces, data.points, data.labels);
    std::size_t clip_violations = 0, threshold_violations = 0;
    double weight_excess = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      const double t = std::exp(rng.uniform(std::log(1e-4), std::log(10.0)));
      const std::size_t i = rng.uniform_index(3);
      const Vector u = 3.0 * rng.normal_vector(2);
      const Vector s = model.low_dim_score(i, t, u);
      if (s.norm() > model.clip_radius(t)) ++clip_violations;
      if (model.low_dim_kde(i, t, u).log_density < model.log_threshold(i, t) && s.cwiseAbs().maxCoeff() != 0.0)
        ++threshold_violations;
      const Vector w = model.weights(t, 2.0 * rng.normal_vector(6));
      weight_excess = std::max({weight_excess, w.sum() - 1.0, -w.minCoeff(), w.maxCoeff() - 1.0});
    }
    rec.bound("estimator.clip_bound_violations", static_cast<double>(clip_violations), 0.0);
    rec.bound("estimator.threshold_violations", static_cast<double>(threshold_violations), 0.0);
    rec.bound("estimator.weight_range", weight_excess, 1e-12);
  }
  {
    const Subspace line = random_subspace(5, 2, rng);
    const Matrix atoms_low = rng.normal_matrix(2, 20);
    const PointSet atoms = line.basis() * atoms_low;
    EstimatorOptions raw;
    raw.thresholding = false;
    raw.clipping = false;
    const TrainedScoreModel model({line}, atoms, std::vector<int>(20, 0), raw);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double t = std::exp(rng.uniform(std::log(0.01), std::log(2.0)));
      const Vector x = atoms.col(static_cast<Eigen::Index>(rng.uniform_index(20))) + std::sqrt(t) * rng.normal_vector(5);
      Vector logits(20);
      for (Eigen::Index j = 0; j < 20; ++j) logits[j] = -(x - atoms.col(j)).squaredNorm() / (2.0 * t);
      const Vector soft = (logits.array() - log_sum_exp(logits)).exp();
      const Vector exact = (atoms * soft - x) / t;
      worst = std::max(worst, (model.full_score(t, x) - exact).norm() / exact.norm());
    }
    rec.bound("estimator.discrete_exactness", worst, 1e-8);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const PointSet a = rng.normal_matrix(2, 5), b = rng.normal_matrix(2, 5);
      std::vector<int> perm(5);
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double cost = 0.0;
        for (int i = 0; i < 5; ++i) cost += (a.col(i) - b.col(perm[static_cast<std::size_t>(i)])).norm();
        best = std::min(best, cost / 5.0);
      } while (std::next_permutation(perm.begin(), perm.end()));
      worst = std::max(worst, std::abs(w1_exact(a, b) - best));
    }
    rec.bound("metrics.w1_brute_force", worst, 1e-10);
  }
  {
    SamplerConfig cfg;
    cfg.tau = 1e-2;
    cfg.T = 3.0;
    cfg.steps = 20;
    cfg.seed = seed;
    const ScoreFn gaussian = [](double, const Vector& x) { return Vector(-x); };
    const PointSet a = sample_batch(gaussian, cfg, 3, 16);
    const PointSet b = sample_batch(gaussian, cfg, 3, 16);
    rec.bound("sampler.determinism", (a - b).cwiseAbs().maxCoeff(), 0.0);
  }
  return rec.table;
}

bool selftest_passed(const ResultTable& table) {
  const std::size_t si = table.column("status");
  return std::all_of(table.rows.begin(), table.rows.end(), [si](const auto& row) { return row[si] == "pass"; });
}

}  // namespace uosdiff
