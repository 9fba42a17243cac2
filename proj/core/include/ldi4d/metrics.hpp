// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "ldi4d/camera.hpp"
#include "ldi4d/image.hpp"

namespace ldi4d {

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) over [0,1] samples, capped at 99 dB.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// dynamic range 1, valid windows only, averaged over channels.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Pixels next to a depth jump larger than `relative_jump` (4-neighbourhood),
/// plus pixels with no depth.
Mask depth_discontinuities(const ImageBuffer& depth, double relative_jump = 0.1);

struct ConsistencyOptions {
  /// Pixels of frame t to ignore (holes, disocclusions).
  const Mask* exclusion = nullptr;
  /// Depth rendered for frame t+1. When given, a warp whose predicted depth
  /// differs from it by more than `relative_jump` is treated as disoccluded,
  /// and samples touching empty target pixels are dropped.
  const ImageBuffer* target_depth = nullptr;
  double relative_jump = 0.1;
};

/// Mean L1 (over channels and valid pixels) between frame t and frame t+1
/// backward-warped into view t, times 100. `relative` maps camera-t
/// coordinates to camera-(t+1) coordinates. Throws when no pixel is valid.
double photometric_consistency(const ImageBuffer& frame_t, const ImageBuffer& frame_t1,
                               const ImageBuffer& depth_t, const CameraPose& relative,
                               const CameraIntrinsics& intrinsics,
                               const ConsistencyOptions& options = {});

struct FrameMetrics {
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::optional<double> consistency;  // frame t -> t+1
};

struct MetricsReport {
  std::vector<FrameMetrics> frames;
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::optional<double> consistency;

  /// Fills the headline numbers with the per-frame means.
  void summarize();
};

}  // namespace ldi4d
