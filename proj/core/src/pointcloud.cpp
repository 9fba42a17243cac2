// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ldi4d/error.hpp"

namespace ldi4d {

void FeaturePointCloud::reserve(std::size_t n) {
  positions.reserve(n);
  features.reserve(n * static_cast<std::size_t>(feature_dim));
  source_pixels.reserve(n);
  layer_ids.reserve(n);
  base_depths.reserve(n);
}

void FeaturePointCloud::check() const {
  const std::size_t n = positions.size();
  if (feature_dim < 1 || features.size() != n * static_cast<std::size_t>(feature_dim) ||
      source_pixels.size() != n || layer_ids.size() != n || base_depths.size() != n) {
    throw Error("pointcloud", "point attribute arrays differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!positions[i].allFinite()) throw Error("pointcloud", "non-finite position");
    if (!(base_depths[i] > 0.0)) throw Error("pointcloud", "non-positive base depth");
  }
}

FeaturePointCloud lift_layers(const LayerStack& stack, const CameraIntrinsics& intrinsics,
                              const CameraPose& pose) {
  FeaturePointCloud cloud;
  if (stack.layers.empty()) return cloud;
  cloud.feature_dim = stack.layers.front().color.channels();
  std::size_t total = 0;
  for (const auto& layer : stack.layers) total += layer.validity.count();
  cloud.reserve(total);

  for (const auto& layer : stack.layers) {
    if (layer.color.channels() != cloud.feature_dim) {
      throw Error("pointcloud", "layers disagree on feature dimension");
    }
    for (int y = 0; y < layer.color.height(); ++y) {
      for (int x = 0; x < layer.color.width(); ++x) {
        if (!layer.validity(x, y)) continue;
        const double depth = layer.depth.at(x, y);
        if (!(depth > 0.0)) throw Error("pointcloud", "non-positive layer depth");
        cloud.positions.push_back(unproject(x, y, depth, intrinsics, pose));
        const auto f = layer.color.pixel(x, y);
        cloud.features.insert(cloud.features.end(), f.begin(), f.end());
        cloud.source_pixels.emplace_back(x, y);
        cloud.layer_ids.push_back(static_cast<int>(layer.index));
        cloud.base_depths.push_back(depth);
      }
    }
  }
  return cloud;
}

void write_ply(const FeaturePointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path.string(), "cannot open for writing");
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions[i];
    const auto f = cloud.feature(i);
    auto byte = [&](int c) {
      const float v = f[static_cast<std::size_t>(std::min(c, cloud.feature_dim - 1))];
      return static_cast<int>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    };
    out << static_cast<float>(p.x()) << ' ' << static_cast<float>(p.y()) << ' '
        << static_cast<float>(p.z()) << ' ' << byte(0) << ' ' << byte(1) << ' ' << byte(2)
        << '\n';
  }
  if (!out) throw Error(path.string(), "write failed");
}

}  // namespace ldi4d
