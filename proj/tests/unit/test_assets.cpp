// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "ldi4d/assets.hpp"
#include "ldi4d/codecs.hpp"
#include "ldi4d/error.hpp"
#include "ldi4d/synthetic.hpp"
#include "temp_dir.hpp"

namespace ldi4d {
namespace {

using testing::Gen;
using testing::TempDir;

SceneAssets small_bundle(std::uint64_t seed, Preset preset = Preset::kPlanes) {
  SceneConfig config;
  config.width = 24;
  config.height = 20;
  config.margin = 4;
  return generate_scene(preset, seed, config).assets;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(Bundle, MarginArithmetic) {
  SceneAssets a;
  a.original = ImageBuffer(512, 512, 3);
  a.outpainted = ImageBuffer(640, 640, 3);
  a.margin = {64, 64, 64, 64};
  a.depth = ImageBuffer(640, 640, 1, 3.0f);
  a.flow = ImageBuffer(640, 640, 2);
  EXPECT_NO_THROW(validate(a));
  a.margin.right = 63;
  EXPECT_NE(error_of([&] { validate(a); }).find("outpainted.png"), std::string::npos);
}

TEST(Bundle, ZeroDepthRejected) {
  SceneAssets a = small_bundle(1);
  a.depth.at(5, 7) = 0.0f;
  const std::string msg = error_of([&] { validate(a); });
  EXPECT_NE(msg.find("non-positive depth"), std::string::npos);
  EXPECT_NE(msg.find("depth.pfm"), std::string::npos);
  EXPECT_NE(msg.find("(5, 7)"), std::string::npos);
}

TEST(Bundle, NonFiniteFlowRejected) {
  SceneAssets a = small_bundle(1);
  a.flow.at(2, 3, 1) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_NE(error_of([&] { validate(a); }).find("flow.flo"), std::string::npos);
}

TEST(Bundle, LayerSizeMismatch) {
  SceneAssets a = small_bundle(1);
  a.inpainted_layers[1].validity = Mask(3, 3);
  EXPECT_THROW(validate(a), Error);
}

// Oracle: the loaded bundle must equal what was saved, field by field.
TEST(Bundle, RoundTripRandomSyntheticBundles) {
  TempDir dir;
  testing::for_cases(10, 21, [&](Gen& g) {
    const Preset presets[] = {Preset::kPlanes, Preset::kTerracedTerrain, Preset::kCorridor};
    SceneAssets a = small_bundle(static_cast<std::uint64_t>(g.integer(0, 1 << 20)),
                                 presets[g.integer(0, 2)]);
    if (g.chance(0.5)) a.focal_px = g.uniform(10.0, 100.0);
    if (g.chance(0.5)) a.prompt = "a calm lake " + std::to_string(g.integer(0, 99));
    if (g.chance(0.5)) a.extra["depth_model"] = "provider-" + std::to_string(g.integer(0, 9));
    if (g.chance(0.3)) a.predicted_layer_depths.clear();
    if (g.chance(0.2)) {
      a.inpainted_layers.clear();
      a.predicted_layer_depths.clear();
    }
    const auto path = dir / ("b" + std::to_string(g.integer(0, 1 << 30)));
    save_bundle(a, path);
    EXPECT_EQ(load_bundle(path), a);
  });
}

TEST(Bundle, EmptyLayersStayAbsent) {
  TempDir dir;
  SceneAssets a = small_bundle(3);
  a.inpainted_layers.clear();
  a.predicted_layer_depths.clear();
  save_bundle(a, dir.path());
  EXPECT_FALSE(std::filesystem::exists(dir / "layers"));
  EXPECT_TRUE(load_bundle(dir.path()).inpainted_layers.empty());
}

TEST(Bundle, ZeroMarginsPreserved) {
  TempDir dir;
  SceneConfig config;
  config.width = 16;
  config.height = 16;
  config.margin = 0;
  const SceneAssets a = generate_scene(Preset::kPlanes, 4, config).assets;
  save_bundle(a, dir.path());
  const SceneAssets b = load_bundle(dir.path());
  EXPECT_EQ(b.margin, Margins{});
  EXPECT_EQ(b.original, b.outpainted);
}

TEST(Bundle, MissingFileNamed) {
  TempDir dir;
  save_bundle(small_bundle(2), dir.path());
  std::filesystem::remove(dir / "depth.pfm");
  const std::string msg = error_of([&] { load_bundle(dir.path()); });
  EXPECT_NE(msg.find("depth.pfm"), std::string::npos);
  EXPECT_NE(msg.find("missing file"), std::string::npos);
}

TEST(Bundle, DisparityConversion) {
  TempDir dir;
  SceneAssets a = small_bundle(2);
  a.inpainted_layers.clear();
  a.predicted_layer_depths.clear();
  ImageBuffer disparity(a.depth.width(), a.depth.height(), 1, 0.25f);
  disparity.at(0, 0) = 0.0f;
  a.depth = disparity;
  a.depth.at(0, 0) = 1.0f;  // keeps validate() happy before the manifest flip
  save_bundle(a, dir.path());
  write_pfm(disparity, dir / "depth.pfm");
  std::string manifest = read_text(dir / "manifest");
  const auto at = manifest.find("depth_is_disparity = false");
  ASSERT_NE(at, std::string::npos);
  manifest.replace(at, std::string("depth_is_disparity = false").size(), "depth_is_disparity = true");
  std::ofstream(dir / "manifest") << manifest;

  const SceneAssets b = load_bundle(dir.path());
  EXPECT_FLOAT_EQ(b.depth.at(3, 3), static_cast<float>(1.0 / (0.25 + kDisparityEpsilon)));
  EXPECT_FLOAT_EQ(b.depth.at(0, 0), static_cast<float>(1.0 / kDisparityEpsilon));
}

TEST(Bundle, PromptRecordedWithoutTouchingAssets) {
  TempDir dir;
  const SceneAssets a = small_bundle(5);
  save_bundle(a, dir.path());
  const std::string depth_before = read_text(dir / "depth.pfm");
  record_prompt(dir.path(), "sunset over\nthe sea");
  const SceneAssets b = load_bundle(dir.path());
  EXPECT_EQ(b.prompt, "sunset over the sea");
  EXPECT_EQ(read_text(dir / "depth.pfm"), depth_before);
  SceneAssets expected = a;
  expected.prompt = b.prompt;
  EXPECT_EQ(b, expected);
}

TEST(Manifest, ParseAndFormat) {
  const Manifest m = parse_manifest("# comment\n a = 1 \n\nb = two words # kept\n", "m");
  EXPECT_EQ(m.at("a"), "1");
  EXPECT_EQ(m.at("b"), "two words # kept");
  EXPECT_EQ(parse_manifest(format_manifest(m), "m"), m);
  EXPECT_THROW(parse_manifest("novalue\n", "m"), Error);
  EXPECT_THROW(parse_manifest("a = 1\na = 2\n", "m"), Error);
}

}  // namespace
}  // namespace ldi4d
