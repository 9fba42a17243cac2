// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "ldi4d/assets.hpp"

namespace ldi4d {

/// Pinhole intrinsics. Pixel (x, y) has its center at (x, y).
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// World-to-camera rigid transform: x_cam = R * X + t.
struct CameraPose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation * world + translation;
  }
  Eigen::Vector3d to_world(const Eigen::Vector3d& camera) const {
    return rotation.conjugate() * (camera - translation);
  }
  /// Camera center in world coordinates.
  Eigen::Vector3d center() const { return -(rotation.conjugate() * translation); }
};

inline constexpr double kMinCameraDepth = 1e-6;

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
  bool in_front() const noexcept { return z > kMinCameraDepth; }
};

Projection project(const Eigen::Vector3d& world, const CameraIntrinsics& intrinsics,
                   const CameraPose& pose);
Eigen::Vector3d unproject(double u, double v, double depth, const CameraIntrinsics& intrinsics,
                          const CameraPose& pose);

/// Linear translation, shortest-arc slerp rotation. Endpoints are returned
/// verbatim for s <= 0 and s >= 1.
CameraPose interpolate_pose(const CameraPose& c1, const CameraPose& cN, double s);

/// Camera at `eye` whose optical axis points at `target`; the camera y axis
/// stays as close as possible to world +y (identity when looking down +z).
CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target);

/// Camera orbiting `pivot` by `yaw` radians about the world y axis, starting
/// from the world origin and always looking at the pivot.
CameraPose orbit_pose(const Eigen::Vector3d& pivot, double yaw);

/// Transform mapping camera-`from` coordinates to camera-`to` coordinates.
CameraPose relative_pose(const CameraPose& from, const CameraPose& to);

struct TrajectoryFrame {
  CameraPose pose;
  CameraIntrinsics intrinsics;
};

/// N camera frames; the first pose is c_1 and the last c_N.
struct Trajectory {
  std::vector<TrajectoryFrame> frames;
  /// Frames per animation loop: frame N - 1 shows the same scene time as frame 0.
  std::size_t loop_length() const noexcept { return frames.empty() ? 0 : frames.size() - 1; }
};

/// Samples N >= 2 frames at s = k / (N - 1), all with the same intrinsics.
Trajectory make_trajectory(const CameraPose& c1, const CameraPose& cN,
                           const CameraIntrinsics& intrinsics, std::size_t frame_count);

/// Focal length used when a bundle states none.
double default_focal(int width, int height);

/// Intrinsics of the outpainted frame: focal from the bundle or the default
/// for the original resolution, principal point at the frame center.
CameraIntrinsics outpainted_intrinsics(const SceneAssets& assets);

/// Intrinsics that render at the original resolution: same focal lengths,
/// principal point shifted by (-left, -top).
CameraIntrinsics render_intrinsics(const SceneAssets& assets);
CameraIntrinsics render_intrinsics(const CameraIntrinsics& outpainted, const Margins& margin,
                                   int original_width, int original_height);

struct AutocruiseConfig {
  double advance_fraction = 0.3;  // lambda, in (0, 1)
  double far_percentile = 0.95;
};

/// Picks c_N: advance lambda * (median scene depth) toward the centroid of the
/// farthest points in the central horizontal third, then look at it. Falls
/// back to a straight-ahead advance when that set is empty.
CameraPose autocruise_end_pose(std::span<const Eigen::Vector3d> positions, const CameraPose& c1,
                               const CameraIntrinsics& intrinsics,
                               const AutocruiseConfig& config = {});

// Trajectory text file: one frame per line,
//   qw qx qy qz tx ty tz [fx fy cx cy width height]
// '#' starts a comment. Frames without intrinsics take `fallback`.
Trajectory read_trajectory(const std::filesystem::path& path, const CameraIntrinsics& fallback);
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);

}  // namespace ldi4d
