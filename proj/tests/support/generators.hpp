// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded generators for the property tests. Every case gets its own seed so a
// failure can be replayed in isolation.

#pragma once

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "ldi4d/camera.hpp"
#include "ldi4d/image.hpp"

namespace ldi4d::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  ImageBuffer image(int w, int h, int c, double lo = 0.0, double hi = 1.0) {
    ImageBuffer img(w, h, c);
    for (float& v : img.data()) v = static_cast<float>(uniform(lo, hi));
    return img;
  }

  Mask mask(int w, int h, double p) {
    Mask m(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) m.set(x, y, chance(p));
    }
    return m;
  }

  Eigen::Vector3d vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

  Eigen::Quaterniond rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    return q.normalized();
  }

  Eigen::Quaterniond small_rotation(double max_angle) {
    const Eigen::Vector3d axis = vec(-1.0, 1.0).normalized();
    return Eigen::Quaterniond(Eigen::AngleAxisd(uniform(-max_angle, max_angle), axis));
  }

  CameraPose pose(double max_angle = 3.14159, double max_shift = 2.0) {
    CameraPose p;
    p.rotation = small_rotation(max_angle);
    p.translation = vec(-max_shift, max_shift);
    return p;
  }

  CameraIntrinsics intrinsics(int w, int h) {
    const double f = uniform(0.5, 2.0) * std::max(w, h);
    return {f, f * uniform(0.9, 1.1), w * uniform(0.4, 0.6), h * uniform(0.4, 0.6), w, h};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Runs `body(gen)` for `cases` seeds derived from `base`.
template <typename Body>
void for_cases(int cases, std::uint64_t base, Body body) {
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t seed = base * 1000003u + static_cast<std::uint64_t>(i);
    SCOPED_TRACE("seed " + std::to_string(seed));
    Gen gen(seed);
    body(gen);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

}  // namespace ldi4d::testing
