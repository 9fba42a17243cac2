// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/animation.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>

#include "ldi4d/error.hpp"

namespace ldi4d {

EulerianFlow::EulerianFlow(ImageBuffer field, double scale) : field_(std::move(field)) {
  if (field_.channels() != 2) throw Error("animation", "flow field must have two channels");
  if (!field_.all_finite()) throw Error("animation", "flow field must be finite");
  if (scale != 1.0) {
    for (float& v : field_.data()) v = static_cast<float>(v * scale);
  }
}

EulerianFlow EulerianFlow::zero(int width, int height) {
  return EulerianFlow(ImageBuffer(width, height, 2));
}

Eigen::Vector2d EulerianFlow::sample(const Eigen::Vector2d& p) const noexcept {
  const int x = std::clamp(static_cast<int>(std::lround(p.x())), 0, width() - 1);
  const int y = std::clamp(static_cast<int>(std::lround(p.y())), 0, height() - 1);
  return {field_.at(x, y, 0), field_.at(x, y, 1)};
}

Mask animation_mask(const EulerianFlow& flow, double threshold) {
  Mask mask(flow.width(), flow.height());
  const auto& f = flow.field();
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const double u = f.at(x, y, 0);
      const double v = f.at(x, y, 1);
      mask.set(x, y, std::sqrt(u * u + v * v) > threshold);
    }
  }
  return mask;
}

Eigen::Vector2d integrate_flow(const EulerianFlow& flow, const Eigen::Vector2d& start, int steps,
                               Direction direction) {
  if (steps < 0) throw Error("animation", "negative step count");
  const double sign = direction == Direction::kForward ? 1.0 : -1.0;
  const double max_x = flow.width() - 1;
  const double max_y = flow.height() - 1;
  Eigen::Vector2d p = start;
  for (int k = 0; k < steps; ++k) {
    p += sign * flow.sample(p);
    p.x() = std::clamp(p.x(), 0.0, max_x);
    p.y() = std::clamp(p.y(), 0.0, max_y);
  }
  return p;
}

std::vector<Eigen::Vector3d> displace_cloud(const FeaturePointCloud& cloud,
                                            const EulerianFlow& flow,
                                            const CameraIntrinsics& intrinsics,
                                            const CameraPose& pose, int steps,
                                            Direction direction, const Mask* mask) {
  if (steps < 0) throw Error("animation", "negative step count");
  std::optional<Mask> own_mask;
  if (mask == nullptr) {
    own_mask = animation_mask(flow);
    mask = &*own_mask;
  }
  if (mask->width() != flow.width() || mask->height() != flow.height()) {
    throw Error("animation", "animation mask does not match the flow field");
  }

  std::vector<Eigen::Vector3d> out(cloud.positions);
  if (steps == 0) return out;
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, cloud.size(), 4096),
                    [&](const tbb::blocked_range<std::size_t>& range) {
    for (std::size_t i = range.begin(); i != range.end(); ++i) {
      const Eigen::Vector2d& src = cloud.source_pixels[i];
      const int x = std::clamp(static_cast<int>(std::lround(src.x())), 0, flow.width() - 1);
      const int y = std::clamp(static_cast<int>(std::lround(src.y())), 0, flow.height() - 1);
      if (!(*mask)(x, y)) continue;
      const Eigen::Vector2d q = integrate_flow(flow, src, steps, direction);
      if (q == src) continue;
      const double z = cloud.base_depths[i];
      const Eigen::Vector3d moved = unproject(q.x(), q.y(), z, intrinsics, pose);
      const Eigen::Vector3d origin = unproject(src.x(), src.y(), z, intrinsics, pose);
      out[i] = cloud.positions[i] + (moved - origin);
    }
  });
  return out;
}

std::pair<double, double> blend_weights(int t, int loop, BlendCurve curve) {
  if (loop <= 0) throw Error("animation", "loop length must be positive");
  if (t < 0 || t > loop) throw Error("animation", "frame index outside [0, N]");
  double s = static_cast<double>(t) / loop;
  if (curve == BlendCurve::kSmoothstep) s = s * s * (3.0 - 2.0 * s);
  return {1.0 - s, s};
}

AnimatedCloud symmetric_clouds(const FeaturePointCloud& cloud, const EulerianFlow& flow,
                               const CameraIntrinsics& intrinsics, const CameraPose& pose, int t,
                               int loop, BlendCurve curve, const Mask* mask) {
  if (loop == 0) throw Error("animation", "loop length N must be nonzero");
  const auto [wf, wb] = blend_weights(t, loop, curve);
  std::optional<Mask> own_mask;
  if (mask == nullptr) {
    own_mask = animation_mask(flow);
    mask = &*own_mask;
  }
  AnimatedCloud out;
  out.time = t;
  out.forward_weight = wf;
  out.backward_weight = wb;
  out.forward_positions =
      displace_cloud(cloud, flow, intrinsics, pose, t, Direction::kForward, mask);
  out.backward_positions =
      displace_cloud(cloud, flow, intrinsics, pose, loop - t, Direction::kBackward, mask);
  return out;
}

}  // namespace ldi4d
