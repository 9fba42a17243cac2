// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ldi4d/renderer.hpp"
#include "ldi4d/synthetic.hpp"

namespace ldi4d {
namespace {

struct RandomCloud {
  std::vector<Eigen::Vector3d> positions;
  std::vector<float> features;
  std::vector<double> weights;
};

RandomCloud random_cloud(const CameraIntrinsics& k, std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, k.width - 0.5), v(-0.5, k.height - 0.5), z(1, 20);
  std::uniform_real_distribution<float> c(0, 1);
  RandomCloud cloud;
  cloud.positions.reserve(n);
  cloud.features.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng), y = v(rng);
    cloud.positions.push_back(unproject(x, y, z(rng), k, {}));
    for (int ch = 0; ch < 3; ++ch) cloud.features.push_back(c(rng));
  }
  cloud.weights.assign(n, 1.0);
  return cloud;
}

// args: image side, point count
void BM_Splat(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const CameraIntrinsics k{double(side), double(side), side / 2.0, side / 2.0, side, side};
  const RandomCloud cloud = random_cloud(k, static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(splat(cloud.positions, cloud.features, 3, cloud.weights, {k, {}}, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_Splat)->Args({256, 100000})->Args({512, 1000000})->Unit(benchmark::kMillisecond);

void BM_SplatDepthAdaptive(benchmark::State& state) {
  const CameraIntrinsics k{512, 512, 256, 256, 512, 512};
  const RandomCloud cloud = random_cloud(k, 1000000);
  SplatConfig config;
  config.depth_adaptive = true;
  config.reference_depth = 4.0 / 512.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(splat(cloud.positions, cloud.features, 3, cloud.weights, {k, {}}, config));
  }
}
BENCHMARK(BM_SplatDepthAdaptive)->Unit(benchmark::kMillisecond);

void BM_RenderFrame(benchmark::State& state) {
  const SyntheticScene s = generate_scene(Preset::kPlanes, 1);
  AnimatedScene scene;
  scene.lift_intrinsics = outpainted_intrinsics(s.assets);
  scene.cloud = lift_layers(s.gt_layer_stack, scene.lift_intrinsics, {});
  scene.flow = EulerianFlow(s.assets.flow);
  const Trajectory t = make_trajectory({}, {}, render_intrinsics(s.assets), 30);
  int frame = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_frame(scene, t, frame, {}));
    frame = (frame + 1) % 30;
  }
}
BENCHMARK(BM_RenderFrame)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ldi4d

BENCHMARK_MAIN();
