// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldi4d/image.hpp"

namespace ldi4d {

/// Outpainting border, in pixels per side.
struct Margins {
  int left = 0;
  int right = 0;
  int top = 0;
  int bottom = 0;

  friend bool operator==(const Margins&, const Margins&) = default;
};

/// Provider-inpainted color for one layer plus the mask of pixels it defines.
struct InpaintedLayer {
  ImageBuffer color;
  Mask validity;

  friend bool operator==(const InpaintedLayer&, const InpaintedLayer&) = default;
};

/// The file-backed scene bundle. Depth is stored as depth (larger = farther)
/// over the outpainted frame; flow is in pixels per frame.
struct SceneAssets {
  ImageBuffer original;
  ImageBuffer outpainted;
  Margins margin;
  ImageBuffer depth;
  ImageBuffer flow;
  std::vector<InpaintedLayer> inpainted_layers;
  /// Per-layer depth predicted over the cumulative overlay of layers >= i.
  /// Either empty or one entry per inpainted layer.
  std::vector<ImageBuffer> predicted_layer_depths;
  std::optional<double> focal_px;
  std::string prompt;
  /// Unrecognized manifest keys (provider model identifiers and the like).
  std::map<std::string, std::string> extra;
  int manifest_version = 1;

  friend bool operator==(const SceneAssets&, const SceneAssets&) = default;
};

inline constexpr int kManifestVersion = 1;
inline constexpr double kDisparityEpsilon = 1e-6;

/// Checks every bundle invariant; throws Error naming the offending asset and
/// pixel location.
void validate(const SceneAssets& assets);

SceneAssets load_bundle(const std::filesystem::path& dir);
void save_bundle(const SceneAssets& assets, const std::filesystem::path& dir);

/// Rewrites only the manifest's prompt entry, leaving asset files untouched.
void record_prompt(const std::filesystem::path& dir, const std::string& prompt);

/// Key/value manifest document. Lines are `key = value`; `#` starts a comment.
using Manifest = std::map<std::string, std::string>;
Manifest parse_manifest(const std::string& text, const std::string& origin);
std::string format_manifest(const Manifest& manifest);

}  // namespace ldi4d
