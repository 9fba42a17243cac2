// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ldi4d/camera.hpp"
#include "ldi4d/error.hpp"

namespace ldi4d {
namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

}  // namespace

Trajectory read_trajectory(const std::filesystem::path& path, const CameraIntrinsics& fallback) {
  std::ifstream in(path);
  if (!in) throw Error(path.string(), "missing file");
  Trajectory traj;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<double> v;
    for (std::string tok; fields >> tok;) {
      double d = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), d);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(d)) {
        throw Error(path.string(), "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
      v.push_back(d);
    }
    if (v.empty()) continue;
    if (v.size() != 7 && v.size() != 13) {
      throw Error(path.string(), "line " + std::to_string(lineno) + ": expected 7 or 13 values");
    }
    TrajectoryFrame frame;
    const Eigen::Quaterniond q(v[0], v[1], v[2], v[3]);
    if (q.norm() < 1e-12) {
      throw Error(path.string(), "line " + std::to_string(lineno) + ": zero quaternion");
    }
    frame.pose.rotation = std::abs(q.norm() - 1.0) > 1e-12 ? q.normalized() : q;
    frame.pose.translation = {v[4], v[5], v[6]};
    frame.intrinsics = fallback;
    if (v.size() == 13) {
      frame.intrinsics = {v[7], v[8], v[9], v[10], static_cast<int>(v[11]), static_cast<int>(v[12])};
      if (!(frame.intrinsics.fx > 0.0 && frame.intrinsics.fy > 0.0) ||
          frame.intrinsics.width < 1 || frame.intrinsics.height < 1) {
        throw Error(path.string(), "line " + std::to_string(lineno) + ": invalid intrinsics");
      }
    }
    traj.frames.push_back(frame);
  }
  if (traj.frames.size() < 2) throw Error(path.string(), "a trajectory needs at least 2 frames");
  return traj;
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path.string(), "cannot open for writing");
  out << "# qw qx qy qz tx ty tz fx fy cx cy width height\n";
  for (const auto& f : trajectory.frames) {
    const auto& q = f.pose.rotation;
    const auto& t = f.pose.translation;
    const auto& k = f.intrinsics;
    out << shortest(q.w()) << ' ' << shortest(q.x()) << ' ' << shortest(q.y()) << ' '
        << shortest(q.z()) << ' ' << shortest(t.x()) << ' ' << shortest(t.y()) << ' '
        << shortest(t.z()) << ' ' << shortest(k.fx) << ' ' << shortest(k.fy) << ' '
        << shortest(k.cx) << ' ' << shortest(k.cy) << ' ' << k.width << ' ' << k.height << '\n';
  }
  if (!out) throw Error(path.string(), "write failed");
}

}  // namespace ldi4d
