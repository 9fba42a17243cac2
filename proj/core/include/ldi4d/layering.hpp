// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ldi4d/assets.hpp"
#include "ldi4d/image.hpp"

namespace ldi4d {

/// Strictly increasing depth boundaries d_1 < ... < d_{L+1}. Layer i (0-based
/// here) owns [d_i, d_{i+1}); the last interval is closed. Every boundary is
/// exactly representable as a float so comparisons against float samples
/// are unambiguous.
struct DepthIntervals {
  std::vector<double> boundaries;

  std::size_t layer_count() const noexcept {
    return boundaries.empty() ? 0 : boundaries.size() - 1;
  }
  double lower(std::size_t layer) const { return boundaries.at(layer); }
  double upper(std::size_t layer) const { return boundaries.at(layer + 1); }

  /// Half-open lookup; values outside [d_1, d_{L+1}] clamp to the end layers.
  std::size_t layer_of(float depth) const noexcept;

  friend bool operator==(const DepthIntervals&, const DepthIntervals&) = default;
};

struct ClusterConfig {
  /// Exact cluster count. std::nullopt selects gap-threshold merging.
  std::optional<std::size_t> target_layers = 3;
  /// Merging stops once the smallest remaining gap exceeds this fraction of
  /// the depth range.
  double merge_threshold = 0.1;
  /// Width given to the single interval of a constant depth map.
  double min_interval_width = 1e-3;
  /// Depth values are subsampled uniformly down to this many before merging.
  std::size_t max_samples = 65536;
};

/// Single-linkage agglomerative clustering of the depth values, which in one
/// dimension amounts to cutting the sorted distinct values at their widest
/// gaps. Interior boundaries sit at gap midpoints.
DepthIntervals cluster_depth(const ImageBuffer& depth, const ClusterConfig& config = {});

/// Same clustering over an explicit value list (no subsampling).
DepthIntervals cluster_values(std::span<const float> values, const ClusterConfig& config = {});

struct RawLayer {
  Mask mask;
  /// Color where `mask` is set, zero elsewhere.
  ImageBuffer color;
};

std::vector<RawLayer> assign_layers(const ImageBuffer& image, const ImageBuffer& depth,
                                    const DepthIntervals& intervals);

/// Cumulative overlay of layers [from_layer, L): each pixel takes the color of
/// the nearest layer whose validity mask covers it. `from_layer` is 0-based.
ImageBuffer composite_overlay(std::span<const InpaintedLayer> layers, std::size_t from_layer);

/// Affinely maps the predicted values under `mask` onto [lower, upper]:
/// min -> lower, max -> upper. Constant input maps to the interval midpoint.
/// Pixels outside the mask follow the same map, clamped into the interval.
ImageBuffer remap_layer_depth(const ImageBuffer& predicted, const Mask& mask, double lower,
                              double upper);

struct Layer {
  std::size_t index = 0;  // 0 = nearest
  Mask mask;              // raw, pre-inpainting membership
  Mask validity;          // pixels carrying color (superset of mask)
  ImageBuffer color;
  ImageBuffer depth;
};

struct LayerStack {
  std::vector<Layer> layers;  // front to back
  DepthIntervals intervals;
  /// False when the bundle carried no inpainted layers and raw masked colors
  /// were used instead; rendering will show holes at depth discontinuities.
  bool inpainted = true;
};

/// Builds the layered depth image. `predicted_depths` holds one prediction per
/// layer, each made over composite_overlay(..., i).
LayerStack build_layer_stack(const SceneAssets& assets, const DepthIntervals& intervals,
                             std::span<const ImageBuffer> predicted_depths);

/// Per-layer predictions to use when no provider supplied any: the bundle
/// depth on each layer's raw mask, and the deepest raw value of that layer on
/// the remaining validity pixels (occluded content is assumed to lie behind).
std::vector<ImageBuffer> fallback_layer_depths(const SceneAssets& assets,
                                               const DepthIntervals& intervals);

}  // namespace ldi4d
