// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ldi4d/assets.hpp"
#include "ldi4d/camera.hpp"
#include "ldi4d/layering.hpp"
#include "ldi4d/renderer.hpp"

namespace ldi4d {

enum class Preset { kPlanes, kTerracedTerrain, kCorridor };

/// Parses "planes", "terraced-terrain" or "corridor".
Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset preset);

struct SceneConfig {
  int width = 128;   // original image
  int height = 128;
  int margin = 32;   // outpaint border on every side
  /// Number of planes for the planes preset (2..4); the last one is a
  /// complete backdrop.
  int plane_count = 3;
  /// Peak flow speed on the fluid region, pixels per frame. Zero disables flow.
  double flow_speed = 0.6;
  /// Poses of SyntheticScene::gt_views, rendered at the render intrinsics.
  std::vector<CameraPose> gt_poses;
  /// Splat settings for the disocclusion masks of the views.
  SplatConfig gt_splat;
};

struct GroundTruthView {
  CameraPose pose;
  ImageBuffer image;  // ray cast against the analytic scene
  ImageBuffer depth;  // 0 where the ray escapes
  /// Pixels not covered when only the visible surface (no occluded content)
  /// is rendered.
  Mask disocclusion;
};

struct SyntheticScene {
  Preset preset = Preset::kPlanes;
  std::uint64_t seed = 0;
  /// Bundle with ground-truth inpainted layers and per-layer depth
  /// predictions (the exact depth of the cumulative overlay).
  SceneAssets assets;
  DepthIntervals intervals;
  /// Exact layered depth image (depths not remapped).
  LayerStack gt_layer_stack;
  Mask fluid_mask;
  std::vector<GroundTruthView> gt_views;
};

SyntheticScene generate_scene(Preset preset, std::uint64_t seed, const SceneConfig& config = {});

/// Gather formulation of splat(): every pixel scans every point. Same
/// contract and compositing math, O(pixels * points), single-threaded.
Framebuffer reference_render(std::span<const Eigen::Vector3d> positions,
                             std::span<const float> features, int feature_dim,
                             std::span<const double> point_weights, const RenderCamera& camera,
                             const SplatConfig& config);

struct RenderedFrame {
  ImageBuffer image;
  ImageBuffer depth;
};

struct PerFrameGenerationConfig {
  /// Standard deviation of the Gaussian noise a generator re-injects into
  /// every frame it re-synthesizes.
  double noise_sigma = 0.04;
  std::uint64_t seed = 1;
  SplatConfig splat;
};

/// Baseline that generates one frame at a time from the previous output:
/// re-lift the last image with its depth, splat it at the next pose, keep the
/// previous pixel where nothing landed and add generator noise.
std::vector<RenderedFrame> per_frame_generation(const ImageBuffer& first_image,
                                                const ImageBuffer& first_depth,
                                                const Trajectory& trajectory,
                                                const PerFrameGenerationConfig& config = {});

}  // namespace ldi4d
