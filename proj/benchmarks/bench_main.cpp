#include <benchmark/benchmark.h>

#include "uosdiff/uosdiff.hpp"

namespace {

using namespace uosdiff;

struct Trained {
  UoSTarget target;
  TrainedScoreModel model;
};

Trained make_trained(Eigen::Index d, std::size_t m, Eigen::Index k, Eigen::Index n) {
  Rng rng(11);
  UoSTarget target = UoSTarget::random(TargetSpec{d, m, k, 2, 1.0, 3.0, 0.05, 1.0, 4.0}, rng);
  const LabeledSamples data = target.sample(n, rng);
  std::vector<Subspace> subspaces;
  for (const auto& c : target.components()) subspaces.push_back(c.subspace);
  TrainedScoreModel model(subspaces, data.points, data.labels);
  return {std::move(target), std::move(model)};
}

void BM_FullScore(benchmark::State& state) {
  const Trained c = make_trained(16, 8, 3, state.range(0));
  Rng rng(12);
  const double t = 0.01;
  const Vector x = c.target.sample(1, rng).points.col(0) + 0.1 * rng.normal_vector(16);
  for (auto _ : state) benchmark::DoNotOptimize(c.model.full_score(t, x));
}
BENCHMARK(BM_FullScore)->Arg(1000)->Arg(5000)->Unit(benchmark::kMicrosecond);

void BM_TrueScore(benchmark::State& state) {
  const Trained c = make_trained(16, 8, 3, 100);
  Rng rng(13);
  const Vector x = c.target.sample(1, rng).points.col(0);
  for (auto _ : state) benchmark::DoNotOptimize(true_score(c.target, 0.01, x));
}
BENCHMARK(BM_TrueScore)->Unit(benchmark::kMicrosecond);

void BM_W1Exact(benchmark::State& state) {
  Rng rng(14);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const PointSet a = rng.normal_matrix(4, n), b = rng.normal_matrix(4, n);
  for (auto _ : state) benchmark::DoNotOptimize(w1_exact(a, b));
}
BENCHMARK(BM_W1Exact)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Recover(benchmark::State& state) {
  Rng rng(15);
  const UoSTarget target = UoSTarget::random(TargetSpec{16, 8, 3, 2, 1.0, 3.0, 0.05, 1.0, 4.0}, rng);
  const PointSet points = target.sample(1000, rng).points;
  for (auto _ : state) {
    Rng r(16);
    benchmark::DoNotOptimize(recover(points, 8, 3, r));
  }
}
BENCHMARK(BM_Recover)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
