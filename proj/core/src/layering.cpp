// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/layering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ldi4d/error.hpp"

namespace ldi4d {
namespace {

// Boundary strictly above `lo` and at most `hi`, as close to the midpoint as
// float precision allows.
double float_midpoint(float lo, float hi) {
  auto mid = static_cast<float>((static_cast<double>(lo) + static_cast<double>(hi)) * 0.5);
  if (mid <= lo) mid = std::nextafter(lo, std::numeric_limits<float>::infinity());
  return mid;
}

std::string at(int x, int y) {
  return "(" + std::to_string(x) + ", " + std::to_string(y) + ")";
}

}  // namespace

std::size_t DepthIntervals::layer_of(float depth) const noexcept {
  const std::size_t L = layer_count();
  if (L <= 1) return 0;
  // First interior boundary strictly greater than depth.
  const auto it = std::upper_bound(boundaries.begin() + 1, boundaries.end() - 1,
                                   static_cast<double>(depth));
  return static_cast<std::size_t>(it - (boundaries.begin() + 1));
}

DepthIntervals cluster_values(std::span<const float> values, const ClusterConfig& config) {
  if (values.empty()) throw Error("layering", "empty depth map");
  std::vector<float> sorted(values.begin(), values.end());
  for (float v : sorted) {
    if (!std::isfinite(v)) throw Error("layering", "non-finite depth value");
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const float lo = sorted.front();
  const float hi = sorted.back();
  const std::size_t distinct = sorted.size();

  if (config.target_layers == std::size_t{0}) throw Error("layering", "target_layers must be >= 1");

  // A constant map is one layer whatever the target.
  if (distinct == 1) {
    const auto upper = static_cast<float>(static_cast<double>(lo) + config.min_interval_width);
    return {{lo, upper > lo ? upper : std::nextafter(lo, std::numeric_limits<float>::infinity())}};
  }

  if (config.target_layers) {
    if (*config.target_layers > distinct) {
      throw Error("layering", "target_layers " + std::to_string(*config.target_layers) +
                                  " exceeds the " + std::to_string(distinct) +
                                  " distinct depth values");
    }
  }

  // Single linkage in 1-D: every merge joins two neighbours across the
  // smallest open gap, so the surviving splits are the widest gaps.
  std::vector<std::size_t> gaps(distinct - 1);
  std::iota(gaps.begin(), gaps.end(), std::size_t{0});
  auto width = [&](std::size_t g) {
    return static_cast<double>(sorted[g + 1]) - static_cast<double>(sorted[g]);
  };
  std::stable_sort(gaps.begin(), gaps.end(),
                   [&](std::size_t a, std::size_t b) { return width(a) > width(b); });

  std::size_t splits = 0;
  if (config.target_layers) {
    splits = *config.target_layers - 1;
  } else {
    const double cutoff = config.merge_threshold * (static_cast<double>(hi) - lo);
    while (splits < gaps.size() && width(gaps[splits]) > cutoff) ++splits;
  }
  std::vector<std::size_t> cuts(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(splits));
  std::sort(cuts.begin(), cuts.end());

  DepthIntervals out;
  out.boundaries.push_back(lo);
  for (std::size_t g : cuts) out.boundaries.push_back(float_midpoint(sorted[g], sorted[g + 1]));
  out.boundaries.push_back(hi);
  return out;
}

DepthIntervals cluster_depth(const ImageBuffer& depth, const ClusterConfig& config) {
  if (depth.empty()) throw Error("layering", "empty depth map");
  if (depth.channels() != 1) throw Error("layering", "depth must have one channel");
  const auto data = depth.data();
  for (float v : data) {
    if (!(v > 0.0f) || !std::isfinite(v)) throw Error("layering", "depth must be positive and finite");
  }
  if (data.size() <= config.max_samples || config.max_samples == 0) {
    return cluster_values(data, config);
  }
  std::vector<float> sample(config.max_samples);
  for (std::size_t k = 0; k < sample.size(); ++k) {
    sample[k] = data[k * data.size() / sample.size()];
  }
  // The outer boundaries always span the full map, not only the subsample.
  sample.push_back(*std::min_element(data.begin(), data.end()));
  sample.push_back(*std::max_element(data.begin(), data.end()));
  return cluster_values(sample, config);
}

std::vector<RawLayer> assign_layers(const ImageBuffer& image, const ImageBuffer& depth,
                                    const DepthIntervals& intervals) {
  if (!image.same_size(depth)) throw Error("layering", "image and depth dimensions differ");
  if (intervals.layer_count() == 0) throw Error("layering", "no depth intervals");
  std::vector<RawLayer> layers(intervals.layer_count());
  for (auto& layer : layers) {
    layer.mask = Mask(image.width(), image.height());
    layer.color = ImageBuffer(image.width(), image.height(), image.channels());
  }
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      auto& layer = layers[intervals.layer_of(depth.at(x, y))];
      layer.mask.set(x, y);
      std::ranges::copy(image.pixel(x, y), layer.color.pixel(x, y).begin());
    }
  }
  return layers;
}

ImageBuffer composite_overlay(std::span<const InpaintedLayer> layers, std::size_t from_layer) {
  if (from_layer >= layers.size()) {
    throw Error("layering", "overlay start " + std::to_string(from_layer + 1) +
                                " outside [1, " + std::to_string(layers.size()) + "]");
  }
  const auto& back = layers.back().color;
  ImageBuffer out(back.width(), back.height(), back.channels());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      std::size_t s = from_layer;
      while (s < layers.size() && !layers[s].validity(x, y)) ++s;
      if (s == layers.size()) {
        throw Error("layering", "overlay leaves pixel " + at(x, y) + " uncovered");
      }
      std::ranges::copy(layers[s].color.pixel(x, y), out.pixel(x, y).begin());
    }
  }
  return out;
}

ImageBuffer remap_layer_depth(const ImageBuffer& predicted, const Mask& mask, double lower,
                              double upper) {
  if (!mask.same_size(predicted)) throw Error("layering", "mask and depth dimensions differ");
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < predicted.height(); ++y) {
    for (int x = 0; x < predicted.width(); ++x) {
      if (!mask(x, y)) continue;
      const double v = predicted.at(x, y);
      if (!std::isfinite(v)) throw Error("layering", "non-finite predicted depth at " + at(x, y));
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (vmin > vmax) throw Error("layering", "empty layer mask");

  const auto lo = static_cast<float>(lower);
  const auto hi = static_cast<float>(upper);
  const double range = vmax - vmin;
  ImageBuffer out(predicted.width(), predicted.height(), 1);
  for (int y = 0; y < predicted.height(); ++y) {
    for (int x = 0; x < predicted.width(); ++x) {
      float value;
      if (range == 0.0 || !std::isfinite(predicted.at(x, y))) {
        value = static_cast<float>(0.5 * (lower + upper));
      } else {
        const double t = (static_cast<double>(predicted.at(x, y)) - vmin) / range;
        value = t >= 1.0 ? hi : static_cast<float>(lower + t * (upper - lower));
      }
      out.at(x, y) = std::clamp(value, lo, hi);
    }
  }
  return out;
}

LayerStack build_layer_stack(const SceneAssets& assets, const DepthIntervals& intervals,
                             std::span<const ImageBuffer> predicted_depths) {
  const std::size_t L = intervals.layer_count();
  if (predicted_depths.size() != L) {
    throw Error("layering", "layer count mismatch: " + std::to_string(predicted_depths.size()) +
                                " predicted depths for " + std::to_string(L) + " layers");
  }
  const bool inpainted = !assets.inpainted_layers.empty();
  if (inpainted && assets.inpainted_layers.size() != L) {
    throw Error("layering", "layer count mismatch: bundle has " +
                                std::to_string(assets.inpainted_layers.size()) +
                                " inpainted layers, clustering produced " + std::to_string(L));
  }

  auto raw = assign_layers(assets.outpainted, assets.depth, intervals);
  LayerStack stack;
  stack.intervals = intervals;
  stack.inpainted = inpainted;
  stack.layers.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    Layer& layer = stack.layers[i];
    layer.index = i;
    if (!raw[i].mask.any()) {
      throw Error("layering", "layer " + std::to_string(i + 1) + " has an empty mask");
    }
    if (inpainted) {
      const auto& provided = assets.inpainted_layers[i];
      layer.validity = provided.validity | raw[i].mask;
      layer.color = provided.color;
      // Raw pixels the provider left uncovered keep their original color.
      for (int y = 0; y < layer.color.height(); ++y) {
        for (int x = 0; x < layer.color.width(); ++x) {
          if (raw[i].mask(x, y) && !provided.validity(x, y)) {
            std::ranges::copy(raw[i].color.pixel(x, y), layer.color.pixel(x, y).begin());
          }
        }
      }
    } else {
      layer.validity = raw[i].mask;
      layer.color = raw[i].color;
    }
    layer.mask = std::move(raw[i].mask);
    if (!predicted_depths[i].same_size(assets.outpainted) || predicted_depths[i].channels() != 1) {
      throw Error("layering", "predicted depth " + std::to_string(i + 1) +
                                  " does not match the outpainted frame");
    }
    layer.depth = remap_layer_depth(predicted_depths[i], layer.validity, intervals.lower(i),
                                    intervals.upper(i));
  }
  return stack;
}

std::vector<ImageBuffer> fallback_layer_depths(const SceneAssets& assets,
                                               const DepthIntervals& intervals) {
  const std::size_t L = intervals.layer_count();
  const ImageBuffer& depth = assets.depth;
  std::vector<ImageBuffer> out(L, ImageBuffer(depth.width(), depth.height(), 1));
  std::vector<float> deepest(L, 0.0f);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const std::size_t i = intervals.layer_of(depth.at(x, y));
      deepest[i] = std::max(deepest[i], depth.at(x, y));
    }
  }
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const std::size_t own = intervals.layer_of(depth.at(x, y));
      for (std::size_t i = 0; i < L; ++i) {
        out[i].at(x, y) = i == own ? depth.at(x, y) : (deepest[i] > 0.0f ? deepest[i] : 1.0f);
      }
    }
  }
  return out;
}

}  // namespace ldi4d
