// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

// Math shared by the scatter splatter and the gather reference renderer. Both
// traversals must call exactly these functions so their results agree bit for
// bit.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "ldi4d/renderer.hpp"

namespace ldi4d::detail {

// Strict r < radius, with a relative slack of 1e-6 in r^2 so that lattice
// neighbours exactly one radius away stay outside after projection roundoff.
inline constexpr double kFootprintSlack = 1.0 - 1e-6;

// Trivially constructible so large arrays of it skip zero-filling.
struct SplatPoint {
  double u;
  double v;
  double radius;
  double r2_max;   // footprint bound on r^2
  double falloff;  // gamma / radius^2
  float depth;     // compositing key
  bool visible;
};

inline SplatPoint prepare_point(const Eigen::Vector3d& position, const RenderCamera& camera,
                                const SplatConfig& config) {
  SplatPoint p{};
  const Projection proj = project(position, camera.intrinsics, camera.pose);
  if (!proj.in_front() || !std::isfinite(proj.u) || !std::isfinite(proj.v)) return p;
  p.u = proj.u;
  p.v = proj.v;
  p.depth = static_cast<float>(proj.z);
  p.radius = config.depth_adaptive
                 ? config.radius * camera.intrinsics.fx * config.reference_depth / proj.z
                 : config.radius;
  p.visible = p.radius > 0.0 && std::isfinite(p.radius);
  p.r2_max = p.radius * p.radius * kFootprintSlack;
  p.falloff = config.kernel_sharpness / (p.radius * p.radius);
  return p;
}

inline double squared_distance(int x, int y, const SplatPoint& p) {
  const double dx = static_cast<double>(x) - p.u;
  const double dy = static_cast<double>(y) - p.v;
  return dx * dx + dy * dy;
}

inline bool in_footprint(double r2, const SplatPoint& p) {
  return r2 < p.r2_max;
}

inline double splat_alpha(double weight, double r2, const SplatPoint& p) {
  const double a = weight * std::exp(-p.falloff * r2);
  return a > 1.0 ? 1.0 : a;
}

/// Sort key ordering by (float depth, index); depth is positive so its bit
/// pattern is monotone.
inline std::uint64_t order_key(float depth, std::uint32_t index) {
  return (static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(depth)) << 32) | index;
}

/// Running front-to-back composite of one pixel.
struct PixelAccumulator {
  double transmittance = 1.0;
  double coverage = 0.0;
  float depth = 0.0f;
  int count = 0;

  template <typename Color>
  void add(double alpha, const float* feature, int dim, float point_depth, Color&& color) {
    const double w = transmittance * alpha;
    for (int c = 0; c < dim; ++c) color[c] += w * static_cast<double>(feature[c]);
    coverage += w;
    if (count == 0) depth = point_depth;
    transmittance *= 1.0 - alpha;
    ++count;
  }
};

}  // namespace ldi4d::detail
