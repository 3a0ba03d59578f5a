#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bimvs/bimodal.hpp"
#include "bimvs/discontinuity.hpp"
#include "bimvs/eval.hpp"
#include "bimvs/patchmatch.hpp"
#include "bimvs/synth.hpp"

namespace {

using namespace bimvs;

const SyntheticScene& scene() {
  static const SyntheticScene s =
      render_scene(load_scene_spec(BIMVS_SCENE_DIR "/two_plane.txt"));
  return s;
}

void BM_Density(benchmark::State& state) {
  BimodalLaplacian t;
  t.alpha = 0.7;
  t.mu1 = 2.0;
  t.sigma1 = 0.05;
  t.mu2 = 2.6;
  t.sigma2 = 0.2;
  double x = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(density(x, t));
    x += 1e-6;
  }
}
BENCHMARK(BM_Density);

void BM_Laplacian(benchmark::State& state) {
  const GroundTruth& gt = scene().gt_depths[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(laplacian(gt));
  }
}
BENCHMARK(BM_Laplacian);

void BM_NccCost(benchmark::State& state) {
  const SyntheticScene& s = scene();
  const CalibratedView& ref = s.views[1];
  std::vector<HomographyWarper> warpers{{ref, s.views[0]}, {ref, s.views[2]}};
  std::vector<const GridD*> images{&s.views[0].image, &s.views[2].image};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ncc_cost(ref, warpers, images, 32, 32, 2.7, 5, nullptr));
  }
}
BENCHMARK(BM_NccCost);

void BM_NearestDistance(benchmark::State& state) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::vector<Vec3> points;
  for (int i = 0; i < 20000; ++i) points.emplace_back(u(rng), u(rng), u(rng));
  const PointIndex index(points, 0.25);
  Vec3 q(0, 0, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.nearest_distance(q));
    q.x() = u(rng);
  }
}
BENCHMARK(BM_NearestDistance);

void BM_PatchMatchLevel(benchmark::State& state) {
  const SyntheticScene& s = scene();
  PatchMatchConfig config;
  config.rng_seed = 11;
  config.iterations_per_level = 1;
  const std::vector<CalibratedView> sources{s.views[0], s.views[2]};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(s.views[1], sources, config, 2));
  }
}
BENCHMARK(BM_PatchMatchLevel);

}  // namespace

BENCHMARK_MAIN();
