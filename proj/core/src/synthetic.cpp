// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ldi4d/codecs.hpp"
#include "ldi4d/error.hpp"
#include "ldi4d/pointcloud.hpp"
#include "splat_kernel.hpp"

namespace ldi4d {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_hash(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  const std::uint64_t h = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(i) * 0x8CB92BA72F3D8DD7ull ^
                                                   static_cast<std::uint64_t>(j) * 0xD6E8FEB86659FD93ull));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double value_noise(double s, double t, std::uint64_t seed) {
  const double fs = std::floor(s);
  const double ft = std::floor(t);
  const auto i = static_cast<std::int64_t>(fs);
  const auto j = static_cast<std::int64_t>(ft);
  auto fade = [](double a) { return a * a * (3.0 - 2.0 * a); };
  const double a = fade(s - fs);
  const double b = fade(t - ft);
  const double v00 = unit_hash(seed, i, j);
  const double v10 = unit_hash(seed, i + 1, j);
  const double v01 = unit_hash(seed, i, j + 1);
  const double v11 = unit_hash(seed, i + 1, j + 1);
  return (1 - b) * ((1 - a) * v00 + a * v10) + b * ((1 - a) * v01 + a * v11);
}

struct Plane {
  Eigen::Vector3d normal;
  double offset = 0.0;  // normal . X = offset
  Eigen::Vector3d e1, e2;  // texture axes
  Eigen::Vector3d lo{-kInf, -kInf, -kInf};
  Eigen::Vector3d hi{kInf, kInf, kInf};
  Eigen::Vector3d base_color;
  double feature_size = 0.1;  // world units per noise cell
  std::uint64_t texture_seed = 0;
};

struct Hit {
  double z = 0.0;
  int plane = -1;
  Eigen::Vector3d point;
};

// Ray origin + z * ray, where `ray` has unit component along the camera axis
// so that z is the camera depth of the hit.
std::optional<Hit> intersect(const Plane& plane, int index, const Eigen::Vector3d& ray,
                             const Eigen::Vector3d& origin = Eigen::Vector3d::Zero()) {
  const double denom = plane.normal.dot(ray);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double z = (plane.offset - plane.normal.dot(origin)) / denom;
  if (!(z > kMinCameraDepth)) return std::nullopt;
  const Eigen::Vector3d p = origin + z * ray;
  for (int k = 0; k < 3; ++k) {
    if (p[k] < plane.lo[k] || p[k] > plane.hi[k]) return std::nullopt;
  }
  return Hit{z, index, p};
}

std::array<float, 3> shade(const Plane& plane, const Eigen::Vector3d& p) {
  const double s = p.dot(plane.e1) / plane.feature_size;
  const double t = p.dot(plane.e2) / plane.feature_size;
  std::array<float, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    const std::uint64_t seed = plane.texture_seed + 0x1000u * static_cast<std::uint64_t>(c + 1);
    const double n = 0.65 * value_noise(s, t, seed) + 0.35 * value_noise(2.0 * s + 17.0, 2.0 * t, seed ^ 0x55);
    rgb[c] = quantize_unit(static_cast<float>(plane.base_color[c] * (0.45 + 0.55 * n)));
  }
  return rgb;
}

struct Layout {
  std::vector<Plane> planes;
  int fluid_plane = -1;
  Eigen::Vector3d fluid_lo{-kInf, -kInf, -kInf};
  Eigen::Vector3d fluid_hi{kInf, kInf, kInf};
  std::size_t layers = 3;
};

Plane make_plane(const Eigen::Vector3d& normal, double offset, const Eigen::Vector3d& e1,
                 const Eigen::Vector3d& e2, double nominal_depth, double focal,
                 std::uint64_t seed, int index) {
  Plane p;
  p.normal = normal;
  p.offset = offset;
  p.e1 = e1;
  p.e2 = e2;
  // Roughly ten pixels per noise cell at the nominal depth.
  p.feature_size = 10.0 * nominal_depth / focal;
  p.texture_seed = splitmix(seed * 31 + static_cast<std::uint64_t>(index));
  for (int c = 0; c < 3; ++c) {
    p.base_color[c] = 0.45 + 0.55 * unit_hash(p.texture_seed, 7, c);
  }
  return p;
}

Layout planes_layout(const SceneConfig& config, double focal, std::uint64_t seed) {
  if (config.plane_count < 2 || config.plane_count > 4) {
    throw Error("synthetic", "planes preset supports 2 to 4 planes");
  }
  static constexpr double kDepths[] = {2.0, 5.0, 10.0, 20.0};
  // Normalized image-plane rectangles (x0, x1, y0, y1) of the partial planes.
  static constexpr double kRegions[][4] = {
      {-0.55, -0.12, -0.35, 0.20}, {0.10, 0.50, -0.45, 0.15}, {-0.25, 0.30, -0.70, -0.30}};
  Layout layout;
  const int count = config.plane_count;
  for (int k = 0; k < count; ++k) {
    const double d = kDepths[k];
    // Partial planes lean slightly; the backdrop stays fronto-parallel.
    const double tilt = k + 1 < count ? 0.05 : 0.0;
    Plane p = make_plane(Eigen::Vector3d(0.0, -tilt, 1.0), d, Eigen::Vector3d::UnitX(),
                         Eigen::Vector3d::UnitY(), d, focal, seed, k);
    if (k + 1 < count) {
      p.lo = {kRegions[k][0] * d, kRegions[k][2] * d, -kInf};
      p.hi = {kRegions[k][1] * d, kRegions[k][3] * d, kInf};
    }
    layout.planes.push_back(p);
  }
  layout.fluid_plane = count - 1;
  const double back = kDepths[count - 1];
  layout.fluid_lo = {-kInf, 0.28 * back, -kInf};
  layout.layers = static_cast<std::size_t>(count);
  return layout;
}

Layout terraced_layout(double focal, std::uint64_t seed) {
  Layout layout;
  const Eigen::Vector3d X = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d Y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d Z = Eigen::Vector3d::UnitZ();
  Plane near_terrace = make_plane(Y, 1.2, X, Z, 3.0, focal, seed, 0);
  near_terrace.lo.z() = 1.0;
  near_terrace.hi.z() = 7.0;
  Plane riser = make_plane(Z, 7.0, X, Y, 7.0, focal, seed, 1);
  riser.lo.y() = 0.6;
  riser.hi.y() = 1.2;
  Plane far_terrace = make_plane(Y, 0.6, X, Z, 10.0, focal, seed, 2);
  far_terrace.lo.z() = 7.0;
  far_terrace.hi.z() = 14.0;
  Plane backdrop = make_plane(Z, 20.0, X, Y, 20.0, focal, seed, 3);
  layout.planes = {near_terrace, riser, far_terrace, backdrop};
  layout.fluid_plane = 0;
  layout.fluid_lo = {-1.0, -kInf, 1.5};
  layout.fluid_hi = {1.5, kInf, 4.0};
  layout.layers = 3;
  return layout;
}

Layout corridor_layout(double focal, std::uint64_t seed) {
  Layout layout;
  const Eigen::Vector3d X = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d Y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d Z = Eigen::Vector3d::UnitZ();
  Plane left = make_plane(X, -1.0, Z, Y, 3.0, focal, seed, 0);
  left.lo.z() = 0.3;
  left.hi.z() = 10.0;
  Plane right = make_plane(X, 1.0, Z, Y, 3.0, focal, seed, 1);
  right.lo.z() = 0.3;
  right.hi.z() = 10.0;
  Plane floor = make_plane(Y, 1.0, X, Z, 3.0, focal, seed, 2);
  floor.lo = {-1.0, -kInf, 0.3};
  floor.hi = {1.0, kInf, 10.0};
  Plane end = make_plane(Z, 10.0, X, Y, 10.0, focal, seed, 3);
  layout.planes = {left, right, floor, end};
  layout.fluid_plane = 2;
  layout.fluid_lo = {-0.4, -kInf, 1.0};
  layout.fluid_hi = {0.4, kInf, 9.0};
  layout.layers = 3;
  return layout;
}

}  // namespace

Preset parse_preset(std::string_view name) {
  if (name == "planes") return Preset::kPlanes;
  if (name == "terraced-terrain") return Preset::kTerracedTerrain;
  if (name == "corridor") return Preset::kCorridor;
  throw Error("synthetic", "unknown preset '" + std::string(name) + "'");
}

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::kPlanes: return "planes";
    case Preset::kTerracedTerrain: return "terraced-terrain";
    case Preset::kCorridor: return "corridor";
  }
  return "unknown";
}

SyntheticScene generate_scene(Preset preset, std::uint64_t seed, const SceneConfig& config) {
  if (config.width < 1 || config.height < 1 || config.margin < 0) {
    throw Error("synthetic", "invalid scene dimensions");
  }
  const int W = config.width + 2 * config.margin;
  const int H = config.height + 2 * config.margin;
  const double focal = default_focal(config.width, config.height);
  const CameraIntrinsics K{focal, focal, 0.5 * W, 0.5 * H, W, H};

  Layout layout;
  switch (preset) {
    case Preset::kPlanes: layout = planes_layout(config, focal, seed); break;
    case Preset::kTerracedTerrain: layout = terraced_layout(focal, seed); break;
    case Preset::kCorridor: layout = corridor_layout(focal, seed); break;
  }
  const int plane_count = static_cast<int>(layout.planes.size());

  // All surface hits along every pixel ray, nearest first.
  std::vector<std::vector<Hit>> hits(static_cast<std::size_t>(W) * H);
  ImageBuffer depth(W, H, 1);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const Eigen::Vector3d ray((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
      auto& list = hits[static_cast<std::size_t>(y) * W + x];
      for (int k = 0; k < plane_count; ++k) {
        if (auto h = intersect(layout.planes[static_cast<std::size_t>(k)], k, ray)) list.push_back(*h);
      }
      if (list.empty()) throw Error("synthetic", "pixel ray hits no surface");
      std::sort(list.begin(), list.end(), [](const Hit& a, const Hit& b) {
        return a.z < b.z || (a.z == b.z && a.plane < b.plane);
      });
      depth.at(x, y) = static_cast<float>(list.front().z);
    }
  }

  SyntheticScene scene;
  scene.preset = preset;
  scene.seed = seed;
  ClusterConfig cluster;
  cluster.target_layers = layout.layers;
  scene.intervals = cluster_depth(depth, cluster);
  const std::size_t L = scene.intervals.layer_count();

  auto color_of = [&](const Hit& h) { return shade(layout.planes[static_cast<std::size_t>(h.plane)], h.point); };

  SceneAssets& a = scene.assets;
  a.outpainted = ImageBuffer(W, H, 3);
  a.depth = depth;
  a.margin = {config.margin, config.margin, config.margin, config.margin};
  a.flow = ImageBuffer(W, H, 2);
  scene.fluid_mask = Mask(W, H);

  LayerStack& gt = scene.gt_layer_stack;
  gt.intervals = scene.intervals;
  gt.inpainted = true;
  gt.layers.resize(L);
  for (std::size_t k = 0; k < L; ++k) {
    gt.layers[k].index = k;
    gt.layers[k].mask = Mask(W, H);
    gt.layers[k].validity = Mask(W, H);
    gt.layers[k].color = ImageBuffer(W, H, 3);
    gt.layers[k].depth = ImageBuffer(W, H, 1);
  }
  a.predicted_layer_depths.assign(L, ImageBuffer(W, H, 1));

  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const auto& list = hits[static_cast<std::size_t>(y) * W + x];
      const Hit& visible = list.front();
      const auto rgb = color_of(visible);
      for (int c = 0; c < 3; ++c) a.outpainted.at(x, y, c) = rgb[c];
      gt.layers[scene.intervals.layer_of(depth.at(x, y))].mask.set(x, y);

      for (const Hit& h : list) {
        const std::size_t k = scene.intervals.layer_of(static_cast<float>(h.z));
        Layer& layer = gt.layers[k];
        if (layer.validity(x, y)) continue;
        layer.validity.set(x, y);
        const auto c3 = color_of(h);
        for (int c = 0; c < 3; ++c) layer.color.at(x, y, c) = c3[c];
        layer.depth.at(x, y) = static_cast<float>(h.z);
      }
      // The prediction for layer k sees the overlay of layers >= k.
      for (std::size_t k = 0; k < L; ++k) {
        float d = 0.0f;
        for (std::size_t s = k; s < L; ++s) {
          if (gt.layers[s].validity(x, y)) {
            d = gt.layers[s].depth.at(x, y);
            break;
          }
        }
        if (!(d > 0.0f)) throw Error("synthetic", "back layer does not cover the frame");
        a.predicted_layer_depths[k].at(x, y) = d;
      }

      if (visible.plane == layout.fluid_plane) {
        bool inside = true;
        for (int k = 0; k < 3; ++k) {
          inside = inside && visible.point[k] >= layout.fluid_lo[k] && visible.point[k] <= layout.fluid_hi[k];
        }
        scene.fluid_mask.set(x, y, inside);
      }
    }
  }

  // Drift plus a divergent component about the fluid region's centroid.
  if (config.flow_speed > 0.0 && scene.fluid_mask.any()) {
    double sx = 0.0, sy = 0.0, n = 0.0;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        if (scene.fluid_mask(x, y)) {
          sx += x;
          sy += y;
          n += 1.0;
        }
      }
    }
    const Eigen::Vector2d centroid(sx / n, sy / n);
    const double reach = 0.25 * std::max(W, H);
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        if (!scene.fluid_mask(x, y)) continue;
        Eigen::Vector2d v = Eigen::Vector2d(0.8, 0.0) + 0.4 * (Eigen::Vector2d(x, y) - centroid) / reach;
        if (v.norm() > 1.0) v.normalize();
        a.flow.at(x, y, 0) = static_cast<float>(config.flow_speed * v.x());
        a.flow.at(x, y, 1) = static_cast<float>(config.flow_speed * v.y());
      }
    }
  }

  for (std::size_t k = 0; k < L; ++k) {
    if (!gt.layers[k].mask.any()) {
      throw Error("synthetic", "layer " + std::to_string(k + 1) + " is not visible anywhere");
    }
    a.inpainted_layers.push_back({gt.layers[k].color, gt.layers[k].validity});
  }
  a.original = a.outpainted.crop(config.margin, config.margin, config.width, config.height);
  validate(a);

  if (!config.gt_poses.empty()) {
    const CameraIntrinsics render_k = render_intrinsics(a);
    LayerStack visible_only = gt;
    for (auto& layer : visible_only.layers) layer.validity = layer.mask;
    const FeaturePointCloud surface = lift_layers(visible_only, K, CameraPose{});
    const std::vector<double> surface_w(surface.size(), 1.0);
    for (const CameraPose& pose : config.gt_poses) {
      // Exact view by ray casting; the splatted visible surface only marks
      // what the source view never saw.
      GroundTruthView view{pose, ImageBuffer(render_k.width, render_k.height, 3),
                           ImageBuffer(render_k.width, render_k.height, 1), Mask()};
      const Eigen::Matrix3d Rt = pose.rotation.toRotationMatrix().transpose();
      const Eigen::Vector3d origin = -Rt * pose.translation;
      for (int y = 0; y < render_k.height; ++y) {
        for (int x = 0; x < render_k.width; ++x) {
          const Eigen::Vector3d ray =
              Rt * Eigen::Vector3d((x - render_k.cx) / render_k.fx, (y - render_k.cy) / render_k.fy, 1.0);
          std::optional<Hit> best;
          for (int k = 0; k < plane_count; ++k) {
            const auto h = intersect(layout.planes[static_cast<std::size_t>(k)], k, ray, origin);
            if (h && (!best || h->z < best->z)) best = h;
          }
          if (!best) continue;
          const auto rgb = color_of(*best);
          for (int c = 0; c < 3; ++c) view.image.at(x, y, c) = rgb[c];
          view.depth.at(x, y) = static_cast<float>(best->z);
        }
      }
      view.disocclusion = reference_render(surface.positions, surface.features, 3, surface_w,
                                           {render_k, pose}, config.gt_splat)
                              .hole_mask;
      scene.gt_views.push_back(std::move(view));
    }
  }
  return scene;
}

Framebuffer reference_render(std::span<const Eigen::Vector3d> positions,
                             std::span<const float> features, int feature_dim,
                             std::span<const double> point_weights, const RenderCamera& camera,
                             const SplatConfig& config) {
  validate(config);
  const std::size_t n = positions.size();
  if (feature_dim < 1 || features.size() != n * static_cast<std::size_t>(feature_dim) ||
      point_weights.size() != n) {
    throw Error("synthetic", "positions, features and weights differ in length");
  }
  const int W = camera.intrinsics.width;
  const int H = camera.intrinsics.height;

  std::vector<detail::SplatPoint> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = detail::prepare_point(positions[i], camera, config);

  Framebuffer fb;
  fb.color = ImageBuffer(W, H, feature_dim);
  fb.coverage = ImageBuffer(W, H, 1);
  fb.depth = ImageBuffer(W, H, 1);
  fb.hole_mask = Mask(W, H);

  struct Contribution {
    std::uint64_t key;
    double alpha;
  };
  std::vector<Contribution> found;
  std::vector<double> color(static_cast<std::size_t>(feature_dim));
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      found.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (!(point_weights[i] > 0.0) || !points[i].visible) continue;
        const double r2 = detail::squared_distance(x, y, points[i]);
        if (!detail::in_footprint(r2, points[i])) continue;
        const double alpha = detail::splat_alpha(point_weights[i], r2, points[i]);
        if (!(alpha > 0.0)) continue;
        found.push_back({detail::order_key(points[i].depth, static_cast<std::uint32_t>(i)), alpha});
      }
      std::sort(found.begin(), found.end(),
                [](const Contribution& a, const Contribution& b) { return a.key < b.key; });
      if (found.size() > static_cast<std::size_t>(config.max_points_per_pixel)) {
        found.resize(static_cast<std::size_t>(config.max_points_per_pixel));
      }
      detail::PixelAccumulator acc;
      std::fill(color.begin(), color.end(), 0.0);
      for (const auto& c : found) {
        const std::size_t i = c.key & 0xFFFFFFFFu;
        acc.add(c.alpha, features.data() + i * static_cast<std::size_t>(feature_dim), feature_dim,
                points[i].depth, color);
      }
      for (int c = 0; c < feature_dim; ++c) fb.color.at(x, y, c) = static_cast<float>(color[static_cast<std::size_t>(c)]);
      const double cov = std::clamp(acc.coverage, 0.0, 1.0);
      fb.coverage.at(x, y) = static_cast<float>(cov);
      fb.depth.at(x, y) = acc.depth;
      fb.hole_mask.set(x, y, cov < config.alpha_threshold);
    }
  }
  return fb;
}

std::vector<RenderedFrame> per_frame_generation(const ImageBuffer& first_image,
                                                const ImageBuffer& first_depth,
                                                const Trajectory& trajectory,
                                                const PerFrameGenerationConfig& config) {
  if (trajectory.frames.empty()) return {};
  if (!first_image.same_size(first_depth)) throw Error("synthetic", "image and depth sizes differ");
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.noise_sigma);

  std::vector<RenderedFrame> frames;
  frames.push_back({first_image, first_depth});
  const int dim = first_image.channels();
  for (std::size_t t = 1; t < trajectory.frames.size(); ++t) {
    const RenderedFrame& prev = frames.back();
    const auto& from = trajectory.frames[t - 1];
    const auto& to = trajectory.frames[t];
    std::vector<Eigen::Vector3d> positions;
    std::vector<float> features;
    for (int y = 0; y < prev.image.height(); ++y) {
      for (int x = 0; x < prev.image.width(); ++x) {
        const double d = prev.depth.at(x, y);
        if (!(d > 0.0)) continue;
        positions.push_back(unproject(x, y, d, from.intrinsics, from.pose));
        const auto f = prev.image.pixel(x, y);
        features.insert(features.end(), f.begin(), f.end());
      }
    }
    const std::vector<double> weights(positions.size(), 1.0);
    const Framebuffer fb = splat(positions, features, dim, weights, {to.intrinsics, to.pose}, config.splat);
    RenderedFrame next{fb.resolved(), fb.depth};
    if (!next.image.same_size(prev.image)) throw Error("synthetic", "trajectory changes the frame size");
    for (int y = 0; y < next.image.height(); ++y) {
      for (int x = 0; x < next.image.width(); ++x) {
        if (fb.hole_mask(x, y)) {
          std::ranges::copy(prev.image.pixel(x, y), next.image.pixel(x, y).begin());
          next.depth.at(x, y) = prev.depth.at(x, y);
        }
        for (float& v : next.image.pixel(x, y)) {
          v = std::clamp(static_cast<float>(v + noise(rng)), 0.0f, 1.0f);
        }
      }
    }
    frames.push_back(std::move(next));
  }
  return frames;
}

}  // namespace ldi4d
