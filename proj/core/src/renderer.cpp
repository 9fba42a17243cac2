// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/renderer.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include "ldi4d/codecs.hpp"
#include "ldi4d/error.hpp"
#include "splat_kernel.hpp"

namespace ldi4d {
namespace {

constexpr int kBandRows = 16;
constexpr std::size_t kChunk = 16384;

struct Footprint {
  int x0, x1, y0, y1;
};

// Inclusive pixel box containing every pixel with |p - center| < radius,
// clipped to the image. Empty when the footprint misses the image.
Footprint footprint(const detail::SplatPoint& p, int width, int height) {
  Footprint f{0, -1, 0, -1};
  if (p.u + p.radius < 0.0 || p.v + p.radius < 0.0 || p.u - p.radius > width - 1 ||
      p.v - p.radius > height - 1) {
    return f;
  }
  // Clamped into [0, size - 1] first, so truncation is floor.
  const auto ceil_pos = [](double x) {
    const int i = static_cast<int>(x);
    return i < x ? i + 1 : i;
  };
  f.x0 = ceil_pos(std::max(p.u - p.radius, 0.0));
  f.x1 = static_cast<int>(std::min(p.u + p.radius, static_cast<double>(width - 1)));
  f.y0 = ceil_pos(std::max(p.v - p.radius, 0.0));
  f.y1 = static_cast<int>(std::min(p.v + p.radius, static_cast<double>(height - 1)));
  return f;
}

struct Packed {
  detail::SplatPoint point;
  Footprint box;
  double weight;
  std::uint32_t index;
};

}  // namespace

void validate(const SplatConfig& c) {
  if (!(c.radius > 0.0) || !std::isfinite(c.radius)) throw Error("renderer", "radius must be > 0");
  if (!(c.kernel_sharpness > 0.0)) throw Error("renderer", "kernel_sharpness must be > 0");
  if (!(c.alpha_threshold > 0.0 && c.alpha_threshold < 1.0)) {
    throw Error("renderer", "alpha_threshold must lie in (0, 1)");
  }
  if (c.max_points_per_pixel < 1) throw Error("renderer", "max_points_per_pixel must be >= 1");
  if (c.depth_adaptive && !(c.reference_depth > 0.0)) {
    throw Error("renderer", "reference_depth must be > 0");
  }
}

double Framebuffer::hole_fraction() const {
  if (hole_mask.pixel_count() == 0) return 0.0;
  return static_cast<double>(hole_mask.count()) / static_cast<double>(hole_mask.pixel_count());
}

ImageBuffer Framebuffer::resolved() const {
  ImageBuffer out(color.width(), color.height(), color.channels());
  for (int y = 0; y < color.height(); ++y) {
    for (int x = 0; x < color.width(); ++x) {
      if (hole_mask(x, y)) continue;
      const double cov = coverage.at(x, y);
      for (int c = 0; c < color.channels(); ++c) {
        out.at(x, y, c) = static_cast<float>(color.at(x, y, c) / cov);
      }
    }
  }
  return out;
}

Framebuffer splat(std::span<const Eigen::Vector3d> positions, std::span<const float> features,
                  int feature_dim, std::span<const double> point_weights,
                  const RenderCamera& camera, const SplatConfig& config) {
  validate(config);
  const std::size_t n = positions.size();
  if (feature_dim < 1 || features.size() != n * static_cast<std::size_t>(feature_dim) ||
      point_weights.size() != n) {
    throw Error("renderer", "positions, features and weights differ in length");
  }
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error("renderer", "too many points for one splat pass");
  }
  const int W = camera.intrinsics.width;
  const int H = camera.intrinsics.height;
  if (W < 1 || H < 1) throw Error("renderer", "empty render target");

  // Project and clip in fixed chunks, concatenated in index order.
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::vector<Packed>> chunk_points(chunks);
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, chunks, 1),
                    [&](const tbb::blocked_range<std::size_t>& range) {
    for (std::size_t c = range.begin(); c != range.end(); ++c) {
      auto& out = chunk_points[c];
      out.reserve(kChunk);
      const std::size_t end = std::min(n, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        if (!(point_weights[i] > 0.0)) continue;
        const detail::SplatPoint p = detail::prepare_point(positions[i], camera, config);
        if (!p.visible) continue;
        const Footprint box = footprint(p, W, H);
        if (box.x1 < box.x0 || box.y1 < box.y0) continue;
        out.push_back({p, box, point_weights[i], static_cast<std::uint32_t>(i)});
      }
    }
  });
  // Copy points into horizontal bands, keeping index order within a band;
  // a point whose footprint spans several bands goes into each.
  const auto dim = static_cast<std::size_t>(feature_dim);
  const int bands = (H + kBandRows - 1) / kBandRows;
  std::vector<std::size_t> band_start(static_cast<std::size_t>(bands) + 1, 0);
  for (const auto& chunk : chunk_points) {
    for (const Packed& q : chunk) {
      for (int b = q.box.y0 / kBandRows; b <= q.box.y1 / kBandRows; ++b) ++band_start[b + 1];
    }
  }
  for (int b = 0; b < bands; ++b) band_start[b + 1] += band_start[b];
  const auto banded = std::make_unique_for_overwrite<Packed[]>(band_start.back());
  const auto banded_features = std::make_unique_for_overwrite<float[]>(band_start.back() * dim);
  {
    std::vector<std::size_t> cursor(band_start.begin(), band_start.end() - 1);
    for (auto& chunk : chunk_points) {
      for (const Packed& q : chunk) {
        const float* f = features.data() + static_cast<std::size_t>(q.index) * dim;
        for (int b = q.box.y0 / kBandRows; b <= q.box.y1 / kBandRows; ++b) {
          const std::size_t k = cursor[b]++;
          banded[k] = q;
          std::copy_n(f, dim, banded_features.get() + k * dim);
        }
      }
      std::vector<Packed>().swap(chunk);
    }
  }

  const std::size_t pixels = static_cast<std::size_t>(W) * static_cast<std::size_t>(H);
  std::vector<detail::PixelAccumulator> acc(pixels);
  std::vector<double> color(pixels * dim, 0.0);
  const int cap = config.max_points_per_pixel;

  // Each band sorts its points by (depth, index), so every pixel sees its
  // contributions in exactly that order.
  tbb::parallel_for(tbb::blocked_range<int>(0, bands, 1), [&](const tbb::blocked_range<int>& range) {
    std::vector<std::uint64_t> keys;
    for (int b = range.begin(); b != range.end(); ++b) {
      const int band_y0 = b * kBandRows;
      const int band_y1 = std::min(H - 1, band_y0 + kBandRows - 1);
      const std::size_t first = band_start[b];
      const std::size_t count = band_start[b + 1] - first;
      keys.resize(count);
      for (std::size_t j = 0; j < count; ++j) {
        keys[j] = detail::order_key(banded[first + j].point.depth, static_cast<std::uint32_t>(j));
      }
      std::sort(keys.begin(), keys.end());
      for (std::uint64_t key : keys) {
        const std::size_t k = first + (key & 0xFFFFFFFFu);
        const Packed& q = banded[k];
        const detail::SplatPoint& p = q.point;
        const float* f = banded_features.get() + k * dim;
        const int y_end = std::min(q.box.y1, band_y1);
        for (int y = std::max(q.box.y0, band_y0); y <= y_end; ++y) {
          for (int x = q.box.x0; x <= q.box.x1; ++x) {
            const std::size_t px = static_cast<std::size_t>(y) * W + static_cast<std::size_t>(x);
            auto& a = acc[px];
            if (a.count >= cap) continue;
            const double r2 = detail::squared_distance(x, y, p);
            if (!detail::in_footprint(r2, p)) continue;
            const double alpha = detail::splat_alpha(q.weight, r2, p);
            if (!(alpha > 0.0)) continue;
            a.add(alpha, f, feature_dim, p.depth, &color[px * dim]);
          }
        }
      }
    }
  });

  Framebuffer fb;
  fb.color = ImageBuffer(W, H, feature_dim);
  fb.coverage = ImageBuffer(W, H, 1);
  fb.depth = ImageBuffer(W, H, 1);
  fb.hole_mask = Mask(W, H);
  auto out_color = fb.color.data();
  for (std::size_t px = 0; px < pixels; ++px) {
    for (int c = 0; c < feature_dim; ++c) {
      const std::size_t j = px * static_cast<std::size_t>(feature_dim) + static_cast<std::size_t>(c);
      out_color[j] = static_cast<float>(color[j]);
    }
    const double cov = std::clamp(acc[px].coverage, 0.0, 1.0);
    fb.coverage.data()[px] = static_cast<float>(cov);
    fb.depth.data()[px] = acc[px].depth;
    fb.hole_mask.set(px, cov < config.alpha_threshold);
  }
  return fb;
}

Framebuffer render_frame(const AnimatedScene& scene, const Trajectory& trajectory, int t,
                         const RenderConfig& config) {
  const int frames = static_cast<int>(trajectory.frames.size());
  if (frames < 2) throw Error("renderer", "trajectory needs at least 2 frames");
  if (t < 0 || t >= frames) throw Error("renderer", "frame index outside the trajectory");
  const int loop = frames - 1;
  const Mask* mask = scene.animation_mask ? &*scene.animation_mask : nullptr;
  const AnimatedCloud animated = symmetric_clouds(scene.cloud, scene.flow, scene.lift_intrinsics,
                                                  scene.lift_pose, t, loop, config.blend, mask);

  const std::size_t n = scene.cloud.size();
  const auto dim = static_cast<std::size_t>(scene.cloud.feature_dim);
  std::vector<Eigen::Vector3d> positions;
  std::vector<double> weights;
  std::vector<float> features;
  positions.reserve(2 * n);
  weights.reserve(2 * n);
  features.reserve(2 * n * dim);
  std::vector<std::uint8_t> merged(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    merged[i] = animated.forward_positions[i] == animated.backward_positions[i];
    positions.push_back(animated.forward_positions[i]);
    // Forward and backward weights sum to one.
    weights.push_back(merged[i] ? 1.0 : animated.forward_weight);
  }
  features.assign(scene.cloud.features.begin(), scene.cloud.features.end());
  for (std::size_t i = 0; i < n; ++i) {
    positions.push_back(animated.backward_positions[i]);
    weights.push_back(merged[i] ? 0.0 : animated.backward_weight);
  }
  features.insert(features.end(), scene.cloud.features.begin(), scene.cloud.features.end());

  const auto& frame = trajectory.frames[static_cast<std::size_t>(t)];
  return splat(positions, features, scene.cloud.feature_dim, weights,
               {frame.intrinsics, frame.pose}, config.splat);
}

double SequenceReport::mean_hole_fraction() const {
  if (hole_fractions.empty()) return 0.0;
  double sum = 0.0;
  for (double h : hole_fractions) sum += h;
  return sum / static_cast<double>(hole_fractions.size());
}

std::string frame_name(std::size_t index, const char* prefix, const char* extension) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04zu.%s", prefix, index, extension);
  return buf;
}

SequenceReport render_sequence(const AnimatedScene& scene, const Trajectory& trajectory,
                               const RenderConfig& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(out_dir.string(), "cannot create directory: " + ec.message());

  SequenceReport report;
  for (std::size_t t = 0; t < trajectory.frames.size(); ++t) {
    const Framebuffer fb = render_frame(scene, trajectory, static_cast<int>(t), config);
    write_png(fb.resolved(), out_dir / frame_name(t, "frame", "png"));
    write_pfm(fb.depth, out_dir / frame_name(t, "depth", "pfm"));
    report.hole_fractions.push_back(fb.hole_fraction());
  }

  std::ofstream out(out_dir / "holes.txt", std::ios::trunc);
  if (!out) throw Error((out_dir / "holes.txt").string(), "cannot open for writing");
  out << "# frame hole_fraction\n";
  char line[64];
  for (std::size_t t = 0; t < report.hole_fractions.size(); ++t) {
    std::snprintf(line, sizeof(line), "%04zu %.8f\n", t, report.hole_fractions[t]);
    out << line;
  }
  std::snprintf(line, sizeof(line), "# mean %.8f\n", report.mean_hole_fraction());
  out << line;
  return report;
}

}  // namespace ldi4d
