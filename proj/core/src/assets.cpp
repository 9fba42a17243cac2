// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/assets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ldi4d/codecs.hpp"
#include "ldi4d/error.hpp"

namespace ldi4d {
namespace fs = std::filesystem;
namespace {

constexpr const char* kManifestFile = "manifest";

const char* const kKnownKeys[] = {
    "manifest_version", "original",   "outpainted",   "margin_left",
    "margin_right",     "margin_top", "margin_bottom", "depth",
    "depth_is_disparity", "flow",     "layer_count",  "focal_px",
    "prompt"};

bool is_known_key(const std::string& key) {
  for (const char* k : kKnownKeys) {
    if (key == k) return true;
  }
  return key.rfind("layer_", 0) == 0 && key != "layer_count";
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

int parse_int(const Manifest& m, const std::string& key, int fallback) {
  const auto it = m.find(key);
  if (it == m.end()) return fallback;
  int v = 0;
  const auto& s = it->second;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(kManifestFile, "key '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

const std::string& require(const Manifest& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw Error(kManifestFile, "missing required key '" + key + "'");
  return it->second;
}

std::string layer_key(std::size_t k, const char* what) {
  return "layer_" + std::to_string(k + 1) + "_" + what;
}

void check_finite(const ImageBuffer& image, const std::string& file) {
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        if (!std::isfinite(image.at(x, y, c))) {
          throw Error(file, "non-finite sample at (" + std::to_string(x) + ", " +
                                std::to_string(y) + ", channel " + std::to_string(c) + ")");
        }
      }
    }
  }
}

void check_positive(const ImageBuffer& depth, const std::string& file) {
  check_finite(depth, file);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!(depth.at(x, y) > 0.0f)) {
        throw Error(file, "non-positive depth at (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
      }
    }
  }
}

void check_dims(const ImageBuffer& image, int width, int height, const std::string& file) {
  if (image.width() != width || image.height() != height) {
    throw Error(file, "dimension mismatch: " + std::to_string(image.width()) + "x" +
                          std::to_string(image.height()) + ", expected " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
}

void disparity_to_depth(ImageBuffer& image) {
  for (float& v : image.data()) {
    v = static_cast<float>(1.0 / (static_cast<double>(v) + kDisparityEpsilon));
  }
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& origin) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(origin, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) throw Error(origin, "line " + std::to_string(lineno) + ": empty key");
    if (!m.emplace(key, trim(stripped.substr(eq + 1))).second) {
      throw Error(origin, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return m;
}

std::string format_manifest(const Manifest& manifest) {
  std::string out = "# ldi4d scene bundle\n";
  for (const auto& [key, value] : manifest) out += key + " = " + value + "\n";
  return out;
}

void validate(const SceneAssets& a) {
  const int W = a.outpainted.width();
  const int H = a.outpainted.height();
  if (a.original.empty() || a.outpainted.empty()) {
    throw Error("original.png", "empty image");
  }
  if (a.margin.left < 0 || a.margin.right < 0 || a.margin.top < 0 || a.margin.bottom < 0) {
    throw Error(kManifestFile, "negative outpaint margin");
  }
  if (a.original.width() + a.margin.left + a.margin.right != W ||
      a.original.height() + a.margin.top + a.margin.bottom != H) {
    throw Error("outpainted.png",
                "dimension mismatch: outpainted " + std::to_string(W) + "x" + std::to_string(H) +
                    " != original " + std::to_string(a.original.width()) + "x" +
                    std::to_string(a.original.height()) + " + margins");
  }
  if (a.original.channels() != a.outpainted.channels()) {
    throw Error("outpainted.png", "channel count differs from original.png");
  }
  check_finite(a.original, "original.png");
  check_finite(a.outpainted, "outpainted.png");

  if (a.depth.channels() != 1) throw Error("depth.pfm", "depth must have one channel");
  check_dims(a.depth, W, H, "depth.pfm");
  check_positive(a.depth, "depth.pfm");

  if (a.flow.channels() != 2) throw Error("flow.flo", "flow must have two channels");
  check_dims(a.flow, W, H, "flow.flo");
  check_finite(a.flow, "flow.flo");

  for (std::size_t k = 0; k < a.inpainted_layers.size(); ++k) {
    const auto& layer = a.inpainted_layers[k];
    const std::string color_file = "layers/layer_" + std::to_string(k + 1) + "_color.png";
    check_dims(layer.color, W, H, color_file);
    if (layer.color.channels() != a.outpainted.channels()) {
      throw Error(color_file, "channel count differs from outpainted.png");
    }
    check_finite(layer.color, color_file);
    if (layer.validity.width() != W || layer.validity.height() != H) {
      throw Error("layers/layer_" + std::to_string(k + 1) + "_mask.png", "dimension mismatch");
    }
  }
  if (!a.predicted_layer_depths.empty()) {
    if (a.predicted_layer_depths.size() != a.inpainted_layers.size()) {
      throw Error(kManifestFile, "predicted layer depth count differs from layer_count");
    }
    for (std::size_t k = 0; k < a.predicted_layer_depths.size(); ++k) {
      const std::string file = "layers/layer_" + std::to_string(k + 1) + "_depth.pfm";
      if (a.predicted_layer_depths[k].channels() != 1) {
        throw Error(file, "depth must have one channel");
      }
      check_dims(a.predicted_layer_depths[k], W, H, file);
      check_positive(a.predicted_layer_depths[k], file);
    }
  }
  if (a.focal_px && !(*a.focal_px > 0.0 && std::isfinite(*a.focal_px))) {
    throw Error(kManifestFile, "focal_px must be positive");
  }
}

SceneAssets load_bundle(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestFile;
  std::ifstream in(manifest_path);
  if (!in) throw Error(manifest_path.string(), "missing file");
  std::stringstream text;
  text << in.rdbuf();
  const Manifest m = parse_manifest(text.str(), manifest_path.string());

  SceneAssets a;
  a.manifest_version = parse_int(m, "manifest_version", kManifestVersion);
  if (a.manifest_version != kManifestVersion) {
    throw Error(manifest_path.string(),
                "unsupported manifest_version " + std::to_string(a.manifest_version));
  }
  a.original = read_png(dir / require(m, "original"));
  a.outpainted = read_png(dir / require(m, "outpainted"));
  a.margin = {parse_int(m, "margin_left", 0), parse_int(m, "margin_right", 0),
              parse_int(m, "margin_top", 0), parse_int(m, "margin_bottom", 0)};
  a.depth = read_pfm(dir / require(m, "depth"));

  bool disparity = false;
  if (const auto it = m.find("depth_is_disparity"); it != m.end()) {
    if (it->second == "true" || it->second == "1") {
      disparity = true;
    } else if (it->second != "false" && it->second != "0") {
      throw Error(manifest_path.string(), "depth_is_disparity must be true or false");
    }
  }
  if (disparity) disparity_to_depth(a.depth);

  if (const auto it = m.find("flow"); it != m.end()) {
    a.flow = read_flo(dir / it->second);
  } else {
    a.flow = ImageBuffer(a.outpainted.width(), a.outpainted.height(), 2);
  }

  const int layer_count = parse_int(m, "layer_count", 0);
  if (layer_count < 0) throw Error(manifest_path.string(), "negative layer_count");
  bool any_depth = false;
  for (int k = 0; k < layer_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    a.inpainted_layers.push_back({read_png(dir / require(m, layer_key(uk, "color"))),
                                  read_mask_png(dir / require(m, layer_key(uk, "mask")))});
    any_depth = any_depth || m.count(layer_key(uk, "depth")) != 0;
  }
  if (any_depth) {
    for (int k = 0; k < layer_count; ++k) {
      auto depth = read_pfm(dir / require(m, layer_key(static_cast<std::size_t>(k), "depth")));
      if (disparity) disparity_to_depth(depth);
      a.predicted_layer_depths.push_back(std::move(depth));
    }
  }
  if (const auto it = m.find("focal_px"); it != m.end()) {
    double f = 0.0;
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), f);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw Error(manifest_path.string(), "focal_px is not a number: '" + s + "'");
    }
    a.focal_px = f;
  }
  if (const auto it = m.find("prompt"); it != m.end()) a.prompt = it->second;
  for (const auto& [key, value] : m) {
    if (!is_known_key(key)) a.extra.emplace(key, value);
  }

  validate(a);
  return a;
}

void save_bundle(const SceneAssets& a, const fs::path& dir) {
  validate(a);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(dir.string(), "cannot create directory: " + ec.message());

  Manifest m = a.extra;
  m["manifest_version"] = std::to_string(a.manifest_version);
  m["original"] = "original.png";
  m["outpainted"] = "outpainted.png";
  m["margin_left"] = std::to_string(a.margin.left);
  m["margin_right"] = std::to_string(a.margin.right);
  m["margin_top"] = std::to_string(a.margin.top);
  m["margin_bottom"] = std::to_string(a.margin.bottom);
  m["depth"] = "depth.pfm";
  m["depth_is_disparity"] = "false";
  m["flow"] = "flow.flo";
  if (a.focal_px) m["focal_px"] = format_double(*a.focal_px);
  if (!a.prompt.empty()) m["prompt"] = a.prompt;

  write_png(a.original, dir / "original.png");
  write_png(a.outpainted, dir / "outpainted.png");
  write_pfm(a.depth, dir / "depth.pfm");
  write_flo(a.flow, dir / "flow.flo");

  if (!a.inpainted_layers.empty()) {
    fs::create_directories(dir / "layers", ec);
    if (ec) throw Error((dir / "layers").string(), "cannot create directory: " + ec.message());
    m["layer_count"] = std::to_string(a.inpainted_layers.size());
    for (std::size_t k = 0; k < a.inpainted_layers.size(); ++k) {
      const std::string stem = "layers/layer_" + std::to_string(k + 1);
      m[layer_key(k, "color")] = stem + "_color.png";
      m[layer_key(k, "mask")] = stem + "_mask.png";
      write_png(a.inpainted_layers[k].color, dir / (stem + "_color.png"));
      write_mask_png(a.inpainted_layers[k].validity, dir / (stem + "_mask.png"));
      if (!a.predicted_layer_depths.empty()) {
        m[layer_key(k, "depth")] = stem + "_depth.pfm";
        write_pfm(a.predicted_layer_depths[k], dir / (stem + "_depth.pfm"));
      }
    }
  }

  std::ofstream out(dir / kManifestFile, std::ios::trunc);
  if (!out) throw Error((dir / kManifestFile).string(), "cannot open for writing");
  out << format_manifest(m);
  if (!out) throw Error((dir / kManifestFile).string(), "write failed");
}

void record_prompt(const fs::path& dir, const std::string& prompt) {
  const fs::path path = dir / kManifestFile;
  std::ifstream in(path);
  if (!in) throw Error(path.string(), "missing file");
  std::stringstream text;
  text << in.rdbuf();
  in.close();
  Manifest m = parse_manifest(text.str(), path.string());
  std::string flat = prompt;
  for (char& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  m["prompt"] = trim(flat);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path.string(), "cannot open for writing");
  out << format_manifest(m);
}

}  // namespace ldi4d
