// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "ldi4d/codecs.hpp"
#include "ldi4d/error.hpp"
#include "ldi4d/pointcloud.hpp"
#include "ldi4d/renderer.hpp"
#include "ldi4d/synthetic.hpp"
#include "temp_dir.hpp"

namespace ldi4d {
namespace {

using testing::Gen;

const CameraIntrinsics kCam{40, 40, 16, 12, 32, 24};

struct Cloud {
  std::vector<Eigen::Vector3d> positions;
  std::vector<float> features;
  std::vector<double> weights;
  int dim = 3;
};

Cloud random_cloud(Gen& g, const CameraIntrinsics& k, const CameraPose& pose, int n) {
  Cloud c;
  c.dim = g.integer(1, 4);
  for (int i = 0; i < n; ++i) {
    const double z = g.chance(0.05) ? -g.uniform(0.1, 3.0) : g.uniform(0.5, 12.0);
    // Quarter-pixel lattice positions produce exact ties in depth and
    // footprint distance; uniform ones exercise the general case.
    const bool snap = g.chance(0.3);
    double u = g.uniform(-3, k.width + 2), v = g.uniform(-3, k.height + 2);
    if (snap) {
      u = std::round(u * 4) / 4;
      v = std::round(v * 4) / 4;
    }
    const double depth = snap ? std::round(std::abs(z)) + 1.0 : z;
    c.positions.push_back(unproject(u, v, z < 0 ? z : depth, k, pose));
    for (int f = 0; f < c.dim; ++f) c.features.push_back(static_cast<float>(g.uniform(0, 1)));
    c.weights.push_back(g.chance(0.1) ? 0.0 : g.uniform(0.05, 1.2));
  }
  return c;
}

Framebuffer run(const Cloud& c, const RenderCamera& cam, const SplatConfig& config) {
  return splat(c.positions, c.features, c.dim, c.weights, cam, config);
}

double max_diff(const ImageBuffer& a, const ImageBuffer& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return m;
}

TEST(Splat, EmptyCloudIsAllHoles) {
  const Framebuffer fb = splat({}, {}, 3, {}, {kCam, {}}, {});
  EXPECT_EQ(fb.hole_mask.count(), static_cast<std::size_t>(kCam.width * kCam.height));
  EXPECT_EQ(fb.hole_fraction(), 1.0);
  for (float v : fb.coverage.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Splat, SinglePointAtPixelCenter) {
  const std::vector<Eigen::Vector3d> p = {unproject(5, 7, 2.0, kCam, {})};
  const std::vector<float> f = {0.2f, 0.4f, 0.6f};
  const std::vector<double> w = {1.0};
  SplatConfig config;
  config.radius = 0.9;
  config.kernel_sharpness = 3.0;
  const Framebuffer fb = splat(p, f, 3, w, {kCam, {}}, config);
  EXPECT_EQ(fb.coverage.at(5, 7), 1.0f);
  EXPECT_EQ(fb.color.at(5, 7, 1), 0.4f);
  EXPECT_EQ(fb.depth.at(5, 7), 2.0f);
  EXPECT_EQ(fb.hole_mask.count(), static_cast<std::size_t>(kCam.width * kCam.height - 1));
}

TEST(Splat, FrontToBackHandComposite) {
  // Front alpha 0.8 white over back alpha 1.0 black: 0.8 white + 0.2 black.
  const std::vector<Eigen::Vector3d> p = {unproject(3, 3, 5.0, kCam, {}), unproject(3, 3, 2.0, kCam, {})};
  const std::vector<float> f = {0.0f, 0.0f, 0.0f, 1.0f, 1.0f, 1.0f};
  const std::vector<double> w = {1.0, 0.8};
  const Framebuffer fb = splat(p, f, 3, w, {kCam, {}}, {});
  EXPECT_NEAR(fb.color.at(3, 3, 0), 0.8, 1e-7);
  EXPECT_NEAR(fb.coverage.at(3, 3), 1.0, 1e-7);
  EXPECT_EQ(fb.depth.at(3, 3), 2.0f);
}

TEST(Splat, OpaqueFrontHidesBack) {
  const std::vector<Eigen::Vector3d> p = {unproject(3, 3, 5.0, kCam, {}), unproject(3, 3, 2.0, kCam, {})};
  const std::vector<float> f = {0.0f, 0.0f, 0.0f, 1.0f, 0.5f, 0.25f};
  const std::vector<double> w = {1.0, 1.0};
  const Framebuffer fb = splat(p, f, 3, w, {kCam, {}}, {});
  EXPECT_EQ(fb.color.at(3, 3, 0), 1.0f);
  EXPECT_EQ(fb.color.at(3, 3, 1), 0.5f);
  EXPECT_EQ(fb.color.at(3, 3, 2), 0.25f);
}

TEST(Splat, BehindCameraSkipped) {
  const std::vector<Eigen::Vector3d> p = {{0, 0, -2}};
  const std::vector<float> f = {1, 1, 1};
  const std::vector<double> w = {1.0};
  EXPECT_EQ(splat(p, f, 3, w, {kCam, {}}, {}).hole_fraction(), 1.0);
}

TEST(Splat, LengthMismatchAndBadConfig) {
  const std::vector<Eigen::Vector3d> p = {{0, 0, 2}};
  const std::vector<float> f = {1, 1};
  const std::vector<double> w = {1.0};
  EXPECT_THROW(splat(p, f, 3, w, {kCam, {}}, {}), Error);
  SplatConfig bad;
  bad.radius = 0.0;
  EXPECT_THROW(validate(bad), Error);
  bad = {};
  bad.alpha_threshold = 1.0;
  EXPECT_THROW(validate(bad), Error);
}

// The scatter renderer against the gather oracle.
TEST(Splat, MatchesGatherReference) {
  testing::for_cases(12, 71, [](Gen& g) {
    const CameraIntrinsics k = g.intrinsics(g.integer(8, 40), g.integer(8, 40));
    const CameraPose pose = g.pose(0.3, 0.5);
    const Cloud c = random_cloud(g, k, pose, g.integer(0, 2000));
    SplatConfig config;
    config.radius = g.uniform(0.5, 3.0);
    config.kernel_sharpness = g.uniform(0.2, 4.0);
    config.max_points_per_pixel = g.integer(1, 12);
    config.depth_adaptive = g.chance(0.3);
    config.reference_depth = g.uniform(0.005, 0.05);
    const RenderCamera cam{k, pose};
    const Framebuffer a = run(c, cam, config);
    const Framebuffer b = reference_render(c.positions, c.features, c.dim, c.weights, cam, config);
    EXPECT_LE(max_diff(a.color, b.color), 1e-5);
    EXPECT_LE(max_diff(a.coverage, b.coverage), 1e-5);
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(a.hole_mask, b.hole_mask);
  });
}

TEST(Splat, ThreadCountIndependent) {
  Gen g(72);
  const CameraIntrinsics k{60, 60, 40, 30, 80, 60};
  const Cloud c = random_cloud(g, k, {}, 20000);
  SplatConfig config;
  config.radius = 1.7;
  Framebuffer one, many;
  tbb::task_arena(1).execute([&] { one = run(c, {k, {}}, config); });
  tbb::task_arena(8).execute([&] { many = run(c, {k, {}}, config); });
  EXPECT_EQ(one.color, many.color);
  EXPECT_EQ(one.coverage, many.coverage);
  EXPECT_EQ(one.depth, many.depth);
}

// Without the top-K cap binding, an extra point can only add coverage.
TEST(Splat, CoverageMonotone) {
  testing::for_cases(20, 73, [](Gen& g) {
    const Cloud c = random_cloud(g, kCam, {}, g.integer(1, 300));
    SplatConfig config;
    config.radius = g.uniform(0.6, 2.5);
    config.max_points_per_pixel = 1000;
    const Framebuffer before = run(c, {kCam, {}}, config);
    Cloud more = c;
    const Cloud extra = random_cloud(g, kCam, {}, 1);
    more.positions.push_back(extra.positions[0]);
    for (int f = 0; f < c.dim; ++f) more.features.push_back(0.5f);
    more.weights.push_back(extra.weights[0]);
    const Framebuffer after = run(more, {kCam, {}}, config);
    for (std::size_t i = 0; i < before.coverage.data().size(); ++i) {
      EXPECT_GE(after.coverage.data()[i], before.coverage.data()[i] - 1e-7f);
    }
  });
}

TEST(Splat, ResolvedDividesByCoverage) {
  const std::vector<Eigen::Vector3d> p = {unproject(3, 3, 2.0, kCam, {})};
  const std::vector<float> f = {0.6f, 0.3f, 0.9f};
  const std::vector<double> w = {0.5};
  const Framebuffer fb = splat(p, f, 3, w, {kCam, {}}, {});
  const ImageBuffer r = fb.resolved();
  EXPECT_NEAR(r.at(3, 3, 0), 0.6, 1e-6);
  EXPECT_NEAR(r.at(3, 3, 2), 0.9, 1e-6);
  EXPECT_EQ(r.at(0, 0, 0), 0.0f);
}

// One point per pixel at uniform depth, rendered from the lift camera.
TEST(Splat, IdentityReconstruction) {
  Gen g(74);
  const ImageBuffer image = g.image(kCam.width, kCam.height, 3);
  std::vector<Eigen::Vector3d> p;
  std::vector<float> f;
  for (int y = 0; y < kCam.height; ++y) {
    for (int x = 0; x < kCam.width; ++x) {
      p.push_back(unproject(x, y, 3.0, kCam, {}));
      const auto px = image.pixel(x, y);
      f.insert(f.end(), px.begin(), px.end());
    }
  }
  const std::vector<double> w(p.size(), 1.0);
  const Framebuffer fb = splat(p, f, 3, w, {kCam, {}}, {});
  EXPECT_EQ(fb.hole_mask.count(), 0u);
  EXPECT_LE(max_diff(fb.resolved(), image), 1e-5);
}

AnimatedScene small_scene(std::uint64_t seed, int margin, double flow_speed) {
  SceneConfig config;
  config.width = 32;
  config.height = 24;
  config.margin = margin;
  config.flow_speed = flow_speed;
  const SyntheticScene s = generate_scene(Preset::kPlanes, seed, config);
  AnimatedScene scene;
  scene.lift_intrinsics = outpainted_intrinsics(s.assets);
  scene.cloud = lift_layers(s.gt_layer_stack, scene.lift_intrinsics, {});
  scene.flow = EulerianFlow(s.assets.flow);
  return scene;
}

Trajectory still(const CameraIntrinsics& k, int n) { return make_trajectory({}, {}, k, static_cast<std::size_t>(n)); }

TEST(RenderFrame, LoopCloses) {
  const AnimatedScene scene = small_scene(3, 4, 1.5);
  const CameraIntrinsics k = render_intrinsics(scene.lift_intrinsics, {4, 4, 4, 4}, 32, 24);
  const Trajectory t = still(k, 9);
  const Framebuffer first = render_frame(scene, t, 0, {});
  const Framebuffer last = render_frame(scene, t, 8, {});
  EXPECT_LE(max_diff(first.color, last.color), 1e-5);
  const Framebuffer mid = render_frame(scene, t, 4, {});
  EXPECT_GT(max_diff(first.color, mid.color), 1e-3);
  EXPECT_THROW(render_frame(scene, t, 9, {}), Error);
}

TEST(RenderFrame, ZeroFlowFramesIdentical) {
  const AnimatedScene scene = small_scene(4, 4, 0.0);
  const CameraIntrinsics k = render_intrinsics(scene.lift_intrinsics, {4, 4, 4, 4}, 32, 24);
  const Trajectory t = still(k, 6);
  const Framebuffer first = render_frame(scene, t, 0, {});
  EXPECT_EQ(first.hole_fraction(), 0.0);
  for (int i = 1; i < 6; ++i) {
    const Framebuffer fb = render_frame(scene, t, i, {});
    EXPECT_EQ(fb.color, first.color);
    EXPECT_EQ(fb.depth, first.depth);
  }
}

TEST(RenderSequence, MatchesSingleFrames) {
  testing::TempDir dir;
  const AnimatedScene scene = small_scene(5, 4, 0.8);
  const CameraIntrinsics k = render_intrinsics(scene.lift_intrinsics, {4, 4, 4, 4}, 32, 24);
  CameraPose end;
  end.translation = {0.1, 0.0, -0.3};
  const Trajectory t = make_trajectory({}, end, k, 4);
  const SequenceReport report = render_sequence(scene, t, {}, dir.path());
  ASSERT_EQ(report.hole_fractions.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    const Framebuffer fb = render_frame(scene, t, i, {});
    ImageBuffer expected = fb.resolved();
    for (float& v : expected.data()) v = quantize_unit(v);
    EXPECT_EQ(read_png(dir / frame_name(static_cast<std::size_t>(i), "frame", "png")), expected);
    EXPECT_EQ(read_pfm(dir / frame_name(static_cast<std::size_t>(i), "depth", "pfm")), fb.depth);
    EXPECT_EQ(report.hole_fractions[static_cast<std::size_t>(i)], fb.hole_fraction());
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "holes.txt"));
}

TEST(RenderSequence, StaticFramesIdenticalFiles) {
  testing::TempDir dir;
  const AnimatedScene scene = small_scene(6, 0, 0.0);
  const Trajectory t = still(scene.lift_intrinsics, 3);
  render_sequence(scene, t, {}, dir.path());
  const ImageBuffer f0 = read_png(dir / "frame_0000.png");
  EXPECT_EQ(read_png(dir / "frame_0001.png"), f0);
  EXPECT_EQ(read_png(dir / "frame_0002.png"), f0);
}

TEST(FrameName, Format) {
  EXPECT_EQ(frame_name(7, "frame", "png"), "frame_0007.png");
  EXPECT_EQ(frame_name(12345, "depth", "pfm"), "depth_12345.pfm");
}

}  // namespace
}  // namespace ldi4d
