// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ldi4d/camera.hpp"
#include "ldi4d/image.hpp"
#include "ldi4d/pointcloud.hpp"

namespace ldi4d {

enum class Direction { kForward, kBackward };

/// Time-invariant 2D motion field over the outpainted frame, pixels/frame.
class EulerianFlow {
 public:
  EulerianFlow() = default;
  /// `scale` multiplies every vector (the CLI's --flow-scale).
  explicit EulerianFlow(ImageBuffer field, double scale = 1.0);

  static EulerianFlow zero(int width, int height);

  int width() const noexcept { return field_.width(); }
  int height() const noexcept { return field_.height(); }
  const ImageBuffer& field() const noexcept { return field_; }

  /// Nearest-neighbour lookup, coordinates clamped to the frame.
  Eigen::Vector2d sample(const Eigen::Vector2d& p) const noexcept;

 private:
  ImageBuffer field_;
};

/// Pixels whose flow magnitude exceeds `threshold`.
Mask animation_mask(const EulerianFlow& flow, double threshold = 1e-4);

/// `steps` Euler steps p += F(p) (or -F(p) backward), clamped to the frame.
Eigen::Vector2d integrate_flow(const EulerianFlow& flow, const Eigen::Vector2d& start, int steps,
                               Direction direction);

/// Point positions after `steps` frames of motion. Motion is lifted to 3D at
/// constant depth: X + (unproject(q, z) - unproject(p, z)). Points whose source
/// pixel lies outside `mask` (default: animation_mask(flow)) do not move.
/// `intrinsics` and `pose` are the camera the cloud was lifted with.
std::vector<Eigen::Vector3d> displace_cloud(const FeaturePointCloud& cloud,
                                            const EulerianFlow& flow,
                                            const CameraIntrinsics& intrinsics,
                                            const CameraPose& pose, int steps,
                                            Direction direction, const Mask* mask = nullptr);

enum class BlendCurve { kLinear, kSmoothstep };

/// (forward, backward) weights at frame t of a loop of length N; they sum to 1.
std::pair<double, double> blend_weights(int t, int loop, BlendCurve curve = BlendCurve::kLinear);

struct AnimatedCloud {
  std::vector<Eigen::Vector3d> forward_positions;
  std::vector<Eigen::Vector3d> backward_positions;
  double forward_weight = 1.0;
  double backward_weight = 0.0;
  int time = 0;
};

/// Symmetric animation: the cloud advected t steps forward and N - t steps
/// backward, cross-faded so either copy fills the holes the other opens.
AnimatedCloud symmetric_clouds(const FeaturePointCloud& cloud, const EulerianFlow& flow,
                               const CameraIntrinsics& intrinsics, const CameraPose& pose, int t,
                               int loop, BlendCurve curve = BlendCurve::kLinear,
                               const Mask* mask = nullptr);

}  // namespace ldi4d
