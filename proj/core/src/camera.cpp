// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/camera.hpp"

#include <algorithm>
#include <cmath>

#include "ldi4d/error.hpp"

namespace ldi4d {

Projection project(const Eigen::Vector3d& world, const CameraIntrinsics& k,
                   const CameraPose& pose) {
  const Eigen::Vector3d c = pose.to_camera(world);
  Projection p;
  p.z = c.z();
  if (p.in_front()) {
    p.u = k.fx * c.x() / c.z() + k.cx;
    p.v = k.fy * c.y() / c.z() + k.cy;
  }
  return p;
}

Eigen::Vector3d unproject(double u, double v, double depth, const CameraIntrinsics& k,
                          const CameraPose& pose) {
  const Eigen::Vector3d c((u - k.cx) / k.fx * depth, (v - k.cy) / k.fy * depth, depth);
  return pose.to_world(c);
}

CameraPose interpolate_pose(const CameraPose& c1, const CameraPose& cN, double s) {
  if (s <= 0.0) return c1;
  if (s >= 1.0) return cN;
  CameraPose out;
  out.translation = (1.0 - s) * c1.translation + s * cN.translation;
  out.rotation = c1.rotation.slerp(s, cN.rotation).normalized();
  return out;
}

CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = target - eye;
  if (forward.norm() < 1e-12) throw Error("camera", "look_at target coincides with eye");
  const Eigen::Vector3d z = forward.normalized();
  Eigen::Vector3d x = Eigen::Vector3d::UnitY().cross(z);
  if (x.norm() < 1e-9) x = z.cross(Eigen::Vector3d::UnitZ());
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);

  Eigen::Matrix3d camera_to_world;
  camera_to_world.col(0) = x;
  camera_to_world.col(1) = y;
  camera_to_world.col(2) = z;
  CameraPose pose;
  pose.rotation = Eigen::Quaterniond(camera_to_world.transpose()).normalized();
  pose.translation = -(pose.rotation * eye);
  return pose;
}

CameraPose orbit_pose(const Eigen::Vector3d& pivot, double yaw) {
  const Eigen::AngleAxisd turn(yaw, Eigen::Vector3d::UnitY());
  const Eigen::Vector3d eye = pivot + turn * (-pivot);
  return look_at(eye, pivot);
}

CameraPose relative_pose(const CameraPose& from, const CameraPose& to) {
  CameraPose rel;
  rel.rotation = (to.rotation * from.rotation.conjugate()).normalized();
  rel.translation = to.translation - rel.rotation * from.translation;
  return rel;
}

Trajectory make_trajectory(const CameraPose& c1, const CameraPose& cN,
                           const CameraIntrinsics& intrinsics, std::size_t frame_count) {
  if (frame_count < 2) throw Error("camera", "a trajectory needs at least 2 frames");
  Trajectory traj;
  traj.frames.reserve(frame_count);
  const double last = static_cast<double>(frame_count - 1);
  for (std::size_t k = 0; k < frame_count; ++k) {
    traj.frames.push_back({interpolate_pose(c1, cN, static_cast<double>(k) / last), intrinsics});
  }
  return traj;
}

double default_focal(int width, int height) { return 0.8 * std::max(width, height); }

CameraIntrinsics outpainted_intrinsics(const SceneAssets& assets) {
  const double f = assets.focal_px.value_or(
      default_focal(assets.original.width(), assets.original.height()));
  return {f, f, 0.5 * assets.outpainted.width(), 0.5 * assets.outpainted.height(),
          assets.outpainted.width(), assets.outpainted.height()};
}

CameraIntrinsics render_intrinsics(const CameraIntrinsics& outpainted, const Margins& margin,
                                   int original_width, int original_height) {
  CameraIntrinsics k = outpainted;
  k.cx -= margin.left;
  k.cy -= margin.top;
  k.width = original_width;
  k.height = original_height;
  return k;
}

CameraIntrinsics render_intrinsics(const SceneAssets& assets) {
  return render_intrinsics(outpainted_intrinsics(assets), assets.margin, assets.original.width(),
                           assets.original.height());
}

CameraPose autocruise_end_pose(std::span<const Eigen::Vector3d> positions, const CameraPose& c1,
                               const CameraIntrinsics& intrinsics,
                               const AutocruiseConfig& config) {
  if (positions.empty()) throw Error("camera", "autocruise needs a nonempty point cloud");
  std::vector<double> depths;
  depths.reserve(positions.size());
  for (const auto& p : positions) {
    const double z = c1.to_camera(p).z();
    if (z > kMinCameraDepth) depths.push_back(z);
  }
  if (depths.empty()) throw Error("camera", "no points in front of the start camera");

  std::vector<double> sorted = depths;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[(sorted.size() - 1) / 2];
  const double percentile = std::clamp(config.far_percentile, 0.0, 1.0);
  const double far_depth =
      sorted[static_cast<std::size_t>(std::floor(percentile * static_cast<double>(sorted.size() - 1)))];

  const double left = intrinsics.width / 3.0;
  const double right = 2.0 * intrinsics.width / 3.0;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  for (const auto& p : positions) {
    const Projection proj = project(p, intrinsics, c1);
    if (!proj.in_front() || proj.z < far_depth) continue;
    if (proj.u < left || proj.u > right) continue;
    sum += p;
    ++count;
  }

  const Eigen::Vector3d start = c1.center();
  const double advance = config.advance_fraction * median;
  if (count == 0) {
    CameraPose end = c1;
    const Eigen::Vector3d forward = c1.rotation.conjugate() * Eigen::Vector3d::UnitZ();
    end.translation = -(c1.rotation * (start + advance * forward));
    return end;
  }
  const Eigen::Vector3d target = sum / static_cast<double>(count);
  const Eigen::Vector3d eye = start + advance * (target - start).normalized();
  return look_at(eye, target);
}

}  // namespace ldi4d
