// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ldi4d/camera.hpp"
#include "ldi4d/layering.hpp"

namespace ldi4d {

/// P = {(X_i, f_i)} with the bookkeeping needed to animate it. Features are
/// stored flat, `feature_dim` floats per point (RGB by default).
struct FeaturePointCloud {
  int feature_dim = 3;
  std::vector<Eigen::Vector3d> positions;
  std::vector<float> features;
  std::vector<Eigen::Vector2d> source_pixels;  // outpainted-frame pixel
  std::vector<int> layer_ids;                  // 0 = nearest
  std::vector<double> base_depths;             // camera depth at lift time

  std::size_t size() const noexcept { return positions.size(); }
  std::span<const float> feature(std::size_t i) const {
    return std::span<const float>(features).subspan(i * static_cast<std::size_t>(feature_dim),
                                                    static_cast<std::size_t>(feature_dim));
  }
  void reserve(std::size_t n);
  /// Throws when the parallel arrays disagree in length or hold bad values.
  void check() const;
};

/// One point per validity pixel per layer, layer-major then row-major.
FeaturePointCloud lift_layers(const LayerStack& stack, const CameraIntrinsics& intrinsics,
                              const CameraPose& pose);

/// ASCII PLY with float positions and 8-bit RGB (first three feature channels).
void write_ply(const FeaturePointCloud& cloud, const std::filesystem::path& path);

}  // namespace ldi4d
