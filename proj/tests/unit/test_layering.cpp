// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "generators.hpp"
#include "ldi4d/error.hpp"
#include "ldi4d/layering.hpp"
#include "ldi4d/synthetic.hpp"
#include "oracles.hpp"

namespace ldi4d {
namespace {

using testing::Gen;

ImageBuffer column(const std::vector<float>& values) {
  return ImageBuffer(static_cast<int>(values.size()), 1, 1, values);
}

ClusterConfig target(std::size_t L) {
  ClusterConfig c;
  c.target_layers = L;
  return c;
}

TEST(Cluster, ConstantMapIsOneLayer) {
  const DepthIntervals d = cluster_depth(ImageBuffer(5, 4, 1, 4.0f));
  ASSERT_EQ(d.layer_count(), 1u);
  EXPECT_EQ(d.lower(0), 4.0);
  EXPECT_NEAR(d.upper(0), 4.001, 1e-6);
}

TEST(Cluster, ThreeModesExample) {
  const std::vector<float> v = {1, 1, 1, 5, 5, 9, 9, 9};
  const DepthIntervals d = cluster_depth(column(v), target(3));
  EXPECT_EQ(d.boundaries, (std::vector<double>{1, 3, 7, 9}));
  EXPECT_EQ(d.boundaries, testing::agglomerative_boundaries(v, 3));
}

TEST(Cluster, MatchesAgglomerativeOracle) {
  testing::for_cases(200, 31, [](Gen& g) {
    std::vector<float> v(static_cast<std::size_t>(g.integer(2, 40)));
    for (float& x : v) x = static_cast<float>(g.uniform(0.5, 50.0));
    // Repeated samples, like a real depth map.
    for (int k = 0; k < 5; ++k) v.push_back(v[static_cast<std::size_t>(g.integer(0, static_cast<int>(v.size()) - 1))]);
    std::vector<float> distinct = v;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto L = static_cast<std::size_t>(g.integer(1, static_cast<int>(distinct.size())));

    const DepthIntervals d = cluster_depth(column(v), target(L));
    const auto expected = testing::agglomerative_boundaries(v, L);
    ASSERT_EQ(d.boundaries.size(), expected.size());
    EXPECT_EQ(d.boundaries.front(), expected.front());
    EXPECT_EQ(d.boundaries.back(), expected.back());
    for (std::size_t k = 1; k + 1 < expected.size(); ++k) {
      EXPECT_NEAR(d.boundaries[k], expected[k], 1e-5 * expected[k]);
    }
  });
}

TEST(Cluster, GapThresholdFindsThreeModes) {
  // Foreground 2-5, hills 30-38, sky at 100: the two wide gaps survive.
  Gen g(3);
  ImageBuffer depth(60, 40, 1);
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 60; ++x) {
      float d = y < 12 ? 100.0f : (y < 25 ? static_cast<float>(g.uniform(30, 38))
                                          : static_cast<float>(g.uniform(2, 5)));
      depth.at(x, y) = d;
    }
  }
  ClusterConfig config;
  config.target_layers = std::nullopt;
  const DepthIntervals d = cluster_depth(depth, config);
  ASSERT_EQ(d.layer_count(), 3u);
  EXPECT_GT(d.boundaries[1], 5.0);
  EXPECT_LT(d.boundaries[1], 30.0);
  EXPECT_GT(d.boundaries[2], 38.0);
  EXPECT_LT(d.boundaries[2], 100.0);
}

TEST(Cluster, Errors) {
  EXPECT_THROW(cluster_depth(ImageBuffer()), Error);
  EXPECT_THROW(cluster_depth(column({1, 2}), target(3)), Error);
  EXPECT_THROW(cluster_depth(column({1, -2})), Error);
}

TEST(Cluster, SubsampleKeepsExtremes) {
  Gen g(4);
  ImageBuffer depth = g.image(300, 300, 1, 1.0, 10.0);
  depth.at(123, 201) = 0.25f;
  depth.at(7, 299) = 40.0f;
  ClusterConfig config = target(3);
  config.max_samples = 1000;
  const DepthIntervals d = cluster_depth(depth, config);
  EXPECT_EQ(d.boundaries.front(), 0.25);
  EXPECT_EQ(d.boundaries.back(), 40.0);
}

TEST(Assign, TwoPixels) {
  const DepthIntervals d{{1, 5, 9}};
  const auto layers = assign_layers(ImageBuffer(2, 1, 3, 0.5f), column({1, 9}), d);
  EXPECT_TRUE(layers[0].mask(0, 0));
  EXPECT_FALSE(layers[0].mask(1, 0));
  EXPECT_TRUE(layers[1].mask(1, 0));
}

TEST(Assign, BoundaryGoesToDeeperLayer) {
  const DepthIntervals d{{1, 5, 9}};
  const auto layers = assign_layers(ImageBuffer(1, 1, 1), column({5}), d);
  EXPECT_TRUE(layers[1].mask(0, 0));
  EXPECT_FALSE(layers[0].mask(0, 0));
}

// Every pixel in exactly one mask, and inside that mask's interval.
TEST(Assign, PartitionProperty) {
  testing::for_cases(300, 32, [](Gen& g) {
    const int w = g.integer(1, 24), h = g.integer(1, 24);
    ImageBuffer depth = g.image(w, h, 1, 0.5, 30.0);
    if (g.chance(0.5)) {
      for (float& v : depth.data()) v = std::round(v);
      depth.data()[0] = 0.5f;
    }
    const auto image = g.image(w, h, 3);
    ClusterConfig config;
    config.target_layers = std::nullopt;
    const DepthIntervals d = cluster_depth(depth, config);
    const auto layers = assign_layers(image, depth, d);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int owners = 0;
        for (std::size_t k = 0; k < layers.size(); ++k) {
          if (!layers[k].mask(x, y)) continue;
          ++owners;
          const double z = depth.at(x, y);
          EXPECT_GE(z, d.lower(k));
          if (k + 1 < layers.size()) EXPECT_LT(z, d.upper(k));
          else EXPECT_LE(z, d.upper(k));
          EXPECT_EQ(layers[k].color.at(x, y, 1), image.at(x, y, 1));
        }
        EXPECT_EQ(owners, 1);
      }
    }
  });
}

TEST(Overlay, LastLayerVerbatim) {
  Gen g(5);
  std::vector<InpaintedLayer> layers = {{g.image(4, 3, 3), g.mask(4, 3, 0.5)},
                                        {g.image(4, 3, 3), Mask(4, 3, true)}};
  EXPECT_EQ(composite_overlay(layers, 1), layers[1].color);
}

TEST(Overlay, FrontLeftBackRight) {
  ImageBuffer front(4, 2, 1, 1.0f), back(4, 2, 1, 0.0f);
  Mask left(4, 2);
  for (int y = 0; y < 2; ++y) {
    left.set(0, y);
    left.set(1, y);
  }
  std::vector<InpaintedLayer> layers = {{front, left}, {back, Mask(4, 2, true)}};
  const ImageBuffer out = composite_overlay(layers, 0);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 4; ++x) EXPECT_EQ(out.at(x, y), x < 2 ? 1.0f : 0.0f);
  }
}

TEST(Overlay, MatchesFirstValidScan) {
  testing::for_cases(100, 33, [](Gen& g) {
    const int w = g.integer(1, 12), h = g.integer(1, 12);
    const int L = g.integer(1, 5);
    std::vector<InpaintedLayer> layers;
    for (int k = 0; k < L; ++k) {
      layers.push_back({g.image(w, h, 3), k + 1 == L ? Mask(w, h, true) : g.mask(w, h, 0.4)});
    }
    const auto from = static_cast<std::size_t>(g.integer(0, L - 1));
    const ImageBuffer out = composite_overlay(layers, from);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t s = testing::first_valid_layer(layers, from, x, y);
        for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(x, y, c), layers[s].color.at(x, y, c));
      }
    }
  });
}

TEST(Overlay, UncoveredPixelReported) {
  std::vector<InpaintedLayer> layers = {{ImageBuffer(3, 3, 1), Mask(3, 3)},
                                        {ImageBuffer(3, 3, 1), Mask(3, 3, true)}};
  layers[1].validity.set(2, 1, false);
  try {
    composite_overlay(layers, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("(2, 1)"), std::string::npos);
  }
}

TEST(Remap, AffineExamples) {
  const Mask all(3, 1, true);
  const ImageBuffer a = remap_layer_depth(column({2, 4, 6}), all, 10, 20);
  EXPECT_EQ(a.data()[0], 10.0f);
  EXPECT_EQ(a.data()[1], 15.0f);
  EXPECT_EQ(a.data()[2], 20.0f);
  const ImageBuffer b = remap_layer_depth(column({1, 2, 4}), all, 0, 9);
  EXPECT_EQ(b.data()[0], 0.0f);
  EXPECT_EQ(b.data()[1], 3.0f);
  EXPECT_EQ(b.data()[2], 9.0f);
  const ImageBuffer c = remap_layer_depth(column({7, 7, 7}), all, 3, 5);
  for (float v : c.data()) EXPECT_EQ(v, 4.0f);
}

TEST(Remap, EmptyMaskRejected) {
  EXPECT_THROW(remap_layer_depth(column({1, 2}), Mask(2, 1), 0, 1), Error);
}

TEST(Remap, EndpointsExactAndMonotone) {
  testing::for_cases(200, 34, [](Gen& g) {
    const int w = g.integer(2, 16), h = g.integer(1, 16);
    const ImageBuffer pred = g.image(w, h, 1, g.uniform(0.1, 5), g.uniform(6, 50));
    Mask mask = g.mask(w, h, 0.6);
    mask.set(0, 0);
    mask.set(1, 0);
    const double lo = g.uniform(0.5, 20.0);
    const double hi = lo + g.uniform(1e-3, 20.0);
    const ImageBuffer out = remap_layer_depth(pred, mask, lo, hi);
    float omin = std::numeric_limits<float>::infinity(), omax = -omin;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!mask(x, y)) continue;
        omin = std::min(omin, out.at(x, y));
        omax = std::max(omax, out.at(x, y));
        for (int yy = 0; yy < h; ++yy) {
          for (int xx = 0; xx < w; ++xx) {
            if (mask(xx, yy) && pred.at(x, y) <= pred.at(xx, yy)) {
              EXPECT_LE(out.at(x, y), out.at(xx, yy));
            }
          }
        }
      }
    }
    EXPECT_EQ(omin, static_cast<float>(lo));
    EXPECT_EQ(omax, static_cast<float>(hi));
  });
}

TEST(Stack, SingleLayer) {
  SceneAssets a;
  a.original = ImageBuffer(4, 4, 3, 0.5f);
  a.outpainted = a.original;
  a.depth = ImageBuffer(4, 4, 1, 2.0f);
  a.depth.at(1, 1) = 3.0f;
  a.flow = ImageBuffer(4, 4, 2);
  const DepthIntervals d = cluster_depth(a.depth, target(1));
  const std::vector<ImageBuffer> predicted = {a.depth};
  const LayerStack s = build_layer_stack(a, d, predicted);
  ASSERT_EQ(s.layers.size(), 1u);
  EXPECT_FALSE(s.inpainted);
  EXPECT_EQ(s.layers[0].depth, remap_layer_depth(a.depth, Mask(4, 4, true), 2.0, 3.0));
  EXPECT_THROW(build_layer_stack(a, d, std::vector<ImageBuffer>{}), Error);
}

TEST(Stack, SyntheticLayersOrdered) {
  testing::for_cases(5, 35, [](Gen& g) {
    SceneConfig config;
    config.width = 40;
    config.height = 32;
    config.margin = 6;
    const SyntheticScene scene =
        generate_scene(Preset::kPlanes, static_cast<std::uint64_t>(g.integer(0, 999)), config);
    const LayerStack s =
        build_layer_stack(scene.assets, scene.intervals, scene.assets.predicted_layer_depths);
    ASSERT_EQ(s.layers.size(), 3u);
    for (std::size_t k = 0; k + 1 < s.layers.size(); ++k) {
      float max_k = 0.0f, min_next = std::numeric_limits<float>::infinity();
      for (int y = 0; y < s.layers[k].depth.height(); ++y) {
        for (int x = 0; x < s.layers[k].depth.width(); ++x) {
          if (s.layers[k].validity(x, y)) max_k = std::max(max_k, s.layers[k].depth.at(x, y));
          if (s.layers[k + 1].validity(x, y)) min_next = std::min(min_next, s.layers[k + 1].depth.at(x, y));
        }
      }
      EXPECT_LE(max_k, min_next);
    }
    for (const Layer& layer : s.layers) {
      EXPECT_EQ(layer.validity & layer.mask, layer.mask);
    }
  });
}

TEST(Stack, SyntheticPlanesSeparated) {
  SceneConfig config;
  config.width = 64;
  config.height = 48;
  config.margin = 8;
  const SyntheticScene scene = generate_scene(Preset::kPlanes, 7, config);
  const DepthIntervals d = cluster_depth(scene.assets.depth, target(3));
  // Plane depths 2, 5, 10 with a slight tilt: one boundary between each pair.
  EXPECT_GT(d.boundaries[1], 2.2);
  EXPECT_LT(d.boundaries[1], 4.5);
  EXPECT_GT(d.boundaries[2], 5.5);
  EXPECT_LT(d.boundaries[2], 9.9);
}

TEST(Stack, FallbackDepthsKeepOwnLayer) {
  SceneConfig config;
  config.width = 30;
  config.height = 30;
  config.margin = 5;
  const SceneAssets a = generate_scene(Preset::kPlanes, 9, config).assets;
  const DepthIntervals d = cluster_depth(a.depth, target(3));
  const auto fb = fallback_layer_depths(a, d);
  for (int y = 0; y < a.depth.height(); ++y) {
    for (int x = 0; x < a.depth.width(); ++x) {
      EXPECT_EQ(fb[d.layer_of(a.depth.at(x, y))].at(x, y), a.depth.at(x, y));
    }
  }
}

}  // namespace
}  // namespace ldi4d
