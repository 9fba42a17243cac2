// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/metrics.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <array>
#include <cmath>
#include <string>

#include "ldi4d/error.hpp"

namespace ldi4d {
namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) {
    throw Error("metrics", "dimension mismatch: " + std::to_string(a.width()) + "x" +
                               std::to_string(a.height()) + "x" + std::to_string(a.channels()) +
                               " vs " + std::to_string(b.width()) + "x" +
                               std::to_string(b.height()) + "x" + std::to_string(b.channels()));
  }
}

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    taps[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable "valid" Gaussian filter of one channel of f(a, b).
template <typename F>
std::vector<double> filter_valid(const ImageBuffer& a, const ImageBuffer& b, int channel, F f) {
  static const auto taps = gaussian_taps();
  const int W = a.width();
  const int H = a.height();
  const int ow = W - kSsimWindow + 1;
  const int oh = H - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        s += taps[k] * f(a.at(x + k, y, channel), b.at(x + k, y, channel));
      }
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += taps[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

// Offsets below kSnap pixels are projection roundoff and snap to the grid.
constexpr double kSnap = 1e-9;

double bilinear(const ImageBuffer& img, double u, double v, int c) {
  if (std::abs(u - std::round(u)) < kSnap) u = std::round(u);
  if (std::abs(v - std::round(v)) < kSnap) v = std::round(v);
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
  const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
  return (1.0 - fy) * top + fy * bottom;
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  if (a.empty()) throw Error("metrics", "empty image");
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(da.size());
  if (mse < 1e-10) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw Error("metrics", "SSIM needs at least an 11x11 image");
  }
  const double c1 = (kSsimK1 * 1.0) * (kSsimK1 * 1.0);
  const double c2 = (kSsimK2 * 1.0) * (kSsimK2 * 1.0);
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const auto mu_a = filter_valid(a, b, c, [](double x, double) { return x; });
    const auto mu_b = filter_valid(a, b, c, [](double, double y) { return y; });
    const auto aa = filter_valid(a, b, c, [](double x, double) { return x * x; });
    const auto bb = filter_valid(a, b, c, [](double, double y) { return y * y; });
    const auto ab = filter_valid(a, b, c, [](double x, double y) { return x * y; });
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double ma = mu_a[i];
      const double mb = mu_b[i];
      const double va = aa[i] - ma * ma;
      const double vb = bb[i] - mb * mb;
      const double cov = ab[i] - ma * mb;
      sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    total += sum / static_cast<double>(mu_a.size());
  }
  return total / a.channels();
}

Mask depth_discontinuities(const ImageBuffer& depth, double relative_jump) {
  const int W = depth.width();
  const int H = depth.height();
  Mask mask(W, H);
  auto jump = [&](float d0, float d1) {
    if (!(d0 > 0.0f) || !(d1 > 0.0f)) return true;
    return std::abs(static_cast<double>(d0) - d1) / std::min(d0, d1) > relative_jump;
  };
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const float d = depth.at(x, y);
      bool edge = !(d > 0.0f);
      if (x > 0) edge = edge || jump(d, depth.at(x - 1, y));
      if (x + 1 < W) edge = edge || jump(d, depth.at(x + 1, y));
      if (y > 0) edge = edge || jump(d, depth.at(x, y - 1));
      if (y + 1 < H) edge = edge || jump(d, depth.at(x, y + 1));
      mask.set(x, y, edge);
    }
  }
  return mask;
}

double photometric_consistency(const ImageBuffer& frame_t, const ImageBuffer& frame_t1,
                               const ImageBuffer& depth_t, const CameraPose& relative,
                               const CameraIntrinsics& intrinsics,
                               const ConsistencyOptions& options) {
  require_same_shape(frame_t, frame_t1);
  if (!depth_t.same_size(frame_t) || depth_t.channels() != 1) {
    throw Error("metrics", "depth does not match the frame");
  }
  if (options.exclusion && !options.exclusion->same_size(frame_t)) {
    throw Error("metrics", "exclusion mask does not match the frame");
  }
  if (options.target_depth && !options.target_depth->same_size(frame_t)) {
    throw Error("metrics", "target depth does not match the frame");
  }
  const int W = frame_t.width();
  const int H = frame_t.height();
  const int C = frame_t.channels();

  // Per-row partial sums, added in row order so the result does not depend
  // on the thread count.
  std::vector<double> row_l1(static_cast<std::size_t>(H), 0.0);
  std::vector<std::size_t> row_count(static_cast<std::size_t>(H), 0);
  tbb::parallel_for(tbb::blocked_range<int>(0, H), [&](const tbb::blocked_range<int>& rows) {
    for (int y = rows.begin(); y != rows.end(); ++y) {
      double l1_sum = 0.0;
      std::size_t n = 0;
      for (int x = 0; x < W; ++x) {
        if (options.exclusion && (*options.exclusion)(x, y)) continue;
        const double z = depth_t.at(x, y);
        if (!(z > 0.0)) continue;
        const Eigen::Vector3d p((x - intrinsics.cx) / intrinsics.fx * z,
                                (y - intrinsics.cy) / intrinsics.fy * z, z);
        const Projection q = project(p, intrinsics, relative);
        if (!q.in_front()) continue;
        if (q.u < -kSnap || q.v < -kSnap || q.u > W - 1 + kSnap || q.v > H - 1 + kSnap) continue;
        if (const ImageBuffer* td = options.target_depth) {
          const int x0 = static_cast<int>(std::floor(q.u));
          const int y0 = static_cast<int>(std::floor(q.v));
          const int x1 = std::min(x0 + 1, W - 1);
          const int y1 = std::min(y0 + 1, H - 1);
          const float taps[4] = {td->at(x0, y0), td->at(x1, y0), td->at(x0, y1), td->at(x1, y1)};
          bool ok = true;
          for (float d : taps) {
            if (!(d > 0.0f) || std::abs(d - q.z) / q.z > options.relative_jump) ok = false;
          }
          if (!ok) continue;
        }
        double l1 = 0.0;
        for (int c = 0; c < C; ++c) {
          l1 += std::abs(static_cast<double>(frame_t.at(x, y, c)) - bilinear(frame_t1, q.u, q.v, c));
        }
        l1_sum += l1 / C;
        ++n;
      }
      row_l1[static_cast<std::size_t>(y)] = l1_sum;
      row_count[static_cast<std::size_t>(y)] = n;
    }
  });
  struct {
    double l1 = 0.0;
    std::size_t count = 0;
  } total;
  for (int y = 0; y < H; ++y) {
    total.l1 += row_l1[static_cast<std::size_t>(y)];
    total.count += row_count[static_cast<std::size_t>(y)];
  }
  if (total.count == 0) throw Error("metrics", "no valid pixels for photometric consistency");
  return 100.0 * total.l1 / static_cast<double>(total.count);
}

void MetricsReport::summarize() {
  auto mean = [&](auto member) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : frames) {
      if (const auto& v = f.*member) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  psnr = mean(&FrameMetrics::psnr);
  ssim = mean(&FrameMetrics::ssim);
  consistency = mean(&FrameMetrics::consistency);
}

}  // namespace ldi4d
