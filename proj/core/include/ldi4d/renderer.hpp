// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ldi4d/animation.hpp"
#include "ldi4d/camera.hpp"
#include "ldi4d/image.hpp"
#include "ldi4d/pointcloud.hpp"

namespace ldi4d {

struct SplatConfig {
  /// Footprint radius in pixels; the kernel is truncated at r = radius
  /// (exclusive), so the default covers exactly one pixel at a pixel center.
  double radius = 1.0;
  /// Use radius * fx * reference_depth / z instead, i.e. a footprint of
  /// world size radius * reference_depth.
  bool depth_adaptive = false;
  double reference_depth = 1.0;
  double kernel_sharpness = 1.0;  // gamma in exp(-gamma r^2 / radius^2)
  double alpha_threshold = 0.05;
  int max_points_per_pixel = 8;
};

/// Throws Error when a field is out of range.
void validate(const SplatConfig& config);

struct RenderCamera {
  CameraIntrinsics intrinsics;
  CameraPose pose;
};

struct Framebuffer {
  ImageBuffer color;     // front-to-back composited, premultiplied
  ImageBuffer coverage;  // accumulated alpha in [0, 1]
  ImageBuffer depth;     // depth of the nearest contribution, 0 on empty pixels
  Mask hole_mask;        // coverage < alpha_threshold

  double hole_fraction() const;
  /// Color divided by coverage on covered pixels, zero on holes.
  ImageBuffer resolved() const;
};

/// Soft point splatting. Each point deposits alpha
///   a = weight * exp(-gamma r^2 / R^2),  r < R
/// on nearby pixels; per pixel the contributions are ordered by (float camera
/// depth, point index), capped at max_points_per_pixel and composited front
/// to back. Points behind the camera or with weight <= 0 are skipped.
/// `features` holds `feature_dim` floats per point.
Framebuffer splat(std::span<const Eigen::Vector3d> positions, std::span<const float> features,
                  int feature_dim, std::span<const double> point_weights,
                  const RenderCamera& camera, const SplatConfig& config);

/// Everything needed to render any frame of an animated scene.
struct AnimatedScene {
  FeaturePointCloud cloud;
  EulerianFlow flow;
  CameraIntrinsics lift_intrinsics;  // outpainted frame
  CameraPose lift_pose;              // c_1
  std::optional<Mask> animation_mask;
};

struct RenderConfig {
  SplatConfig splat;
  BlendCurve blend = BlendCurve::kLinear;
};

/// Frame t in [0, N-1] of an N-frame trajectory. The animation loop spans the
/// N-1 steps between the first and the last frame. Forward and backward copies
/// share one compositing pass; copies that did not move are splatted once
/// with their combined weight.
Framebuffer render_frame(const AnimatedScene& scene, const Trajectory& trajectory, int t,
                         const RenderConfig& config);

struct SequenceReport {
  std::vector<double> hole_fractions;
  double mean_hole_fraction() const;
};

/// Renders every frame to `out_dir/frame_%04d.png` (resolved color) and
/// `out_dir/depth_%04d.pfm`, plus `out_dir/holes.txt`.
SequenceReport render_sequence(const AnimatedScene& scene, const Trajectory& trajectory,
                               const RenderConfig& config, const std::filesystem::path& out_dir);

std::string frame_name(std::size_t index, const char* prefix, const char* extension);

}  // namespace ldi4d
