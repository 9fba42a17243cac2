// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldi4d/assets.hpp"
#include "ldi4d/codecs.hpp"
#include "ldi4d/error.hpp"
#include "ldi4d/metrics.hpp"
#include "ldi4d/pipeline.hpp"
#include "ldi4d/pointcloud.hpp"
#include "ldi4d/synthetic.hpp"

namespace ldi4d::cli {
namespace {

namespace fs = std::filesystem;

// Bad flag values found after CLI11 parsing succeeded.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::optional<std::size_t> parse_layers(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t n = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), n);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size() || n == 0) {
    throw UsageError("--layers expects a positive integer or 'auto', got '" + text + "'");
  }
  return n;
}

struct RenderFlags {
  std::string bundle;
  std::string out;
  std::string layers = "auto";
  std::string trajectory = "auto";
  std::size_t frames = 30;
  double flow_scale = 1.0;
  double advance = 0.3;
  std::string prompt;
  std::string blend = "linear";
  SplatConfig splat;
};

void add_splat_flags(CLI::App* app, SplatConfig& splat) {
  app->add_option("--radius", splat.radius, "Splat footprint radius in pixels")
      ->capture_default_str();
  app->add_flag("--depth-adaptive", splat.depth_adaptive,
                "Scale the radius by reference-depth / depth");
  app->add_option("--reference-depth", splat.reference_depth,
                  "Depth at which a depth-adaptive splat has --radius")
      ->capture_default_str();
  app->add_option("--sharpness", splat.kernel_sharpness, "Gaussian falloff gamma")
      ->capture_default_str();
  app->add_option("--hole-threshold", splat.alpha_threshold,
                  "Coverage below which a pixel is a hole")
      ->capture_default_str();
  app->add_option("--top-k", splat.max_points_per_pixel, "Contributions kept per pixel")
      ->capture_default_str();
}

CLI::App* add_render_command(CLI::App& app, const char* name, const char* description,
                             RenderFlags& f, bool with_flow) {
  CLI::App* cmd = app.add_subcommand(name, description);
  cmd->add_option("--bundle", f.bundle, "Scene bundle directory")->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--layers", f.layers, "Layer count or 'auto'")->capture_default_str();
  cmd->add_option("--trajectory", f.trajectory, "'auto' or a trajectory file")
      ->capture_default_str();
  cmd->add_option("--frames", f.frames, "Frame count N for an auto trajectory")
      ->capture_default_str();
  cmd->add_option("--advance", f.advance, "Autocruise advance as a fraction of median depth")
      ->capture_default_str();
  cmd->add_option("--prompt", f.prompt, "Text prompt recorded into the bundle manifest");
  if (with_flow) {
    cmd->add_option("--flow-scale", f.flow_scale, "Global multiplier on the flow field")
        ->capture_default_str();
    cmd->add_option("--blend", f.blend, "Cross-fade curve")
        ->check(CLI::IsMember({"linear", "smoothstep"}))
        ->capture_default_str();
  }
  add_splat_flags(cmd, f.splat);
  return cmd;
}

void write_intervals(const DepthIntervals& intervals, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path.string(), "cannot open for writing");
  out << "# layer lower upper\n";
  for (std::size_t k = 0; k < intervals.layer_count(); ++k) {
    out << k + 1 << ' ' << number(intervals.lower(k)) << ' ' << number(intervals.upper(k)) << '\n';
  }
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(dir.string(), "cannot create directory: " + ec.message());
}

std::string layer_file(std::size_t k, const char* what, const char* ext) {
  return "layer_" + std::to_string(k + 1) + "_" + what + "." + ext;
}

void write_stack(const LayerStack& stack, const fs::path& dir) {
  make_dir(dir);
  for (const Layer& layer : stack.layers) {
    write_mask_png(layer.mask, dir / layer_file(layer.index, "mask", "png"));
    write_mask_png(layer.validity, dir / layer_file(layer.index, "validity", "png"));
    write_png(layer.color, dir / layer_file(layer.index, "color", "png"));
    write_pfm(layer.depth, dir / layer_file(layer.index, "depth", "pfm"));
  }
  write_intervals(stack.intervals, dir / "intervals.txt");
}

// ---- synth ----------------------------------------------------------------

struct SynthFlags {
  std::string preset = "planes";
  std::uint64_t seed = 0;
  std::string out;
  SceneConfig scene;
  std::string prompt;
};

void run_synth(const SynthFlags& f, std::ostream& out) {
  const SyntheticScene scene = generate_scene(parse_preset(f.preset), f.seed, f.scene);
  const fs::path dir(f.out);
  SceneAssets assets = scene.assets;
  assets.prompt = f.prompt;
  save_bundle(assets, dir);

  const fs::path gt = dir / "gt";
  write_stack(scene.gt_layer_stack, gt);
  write_mask_png(scene.fluid_mask, gt / "fluid_mask.png");
  out << "synth " << preset_name(scene.preset) << " seed " << f.seed << " layers "
      << scene.intervals.layer_count() << " -> " << dir.string() << '\n';
}

// ---- layer ----------------------------------------------------------------

struct LayerFlags {
  std::string bundle;
  std::string layers = "auto";
  std::string out;
  bool ply = false;
};

void run_layer(const LayerFlags& f, std::ostream& out) {
  const auto layers = parse_layers(f.layers);
  const SceneAssets assets = load_bundle(f.bundle);
  const LayerStack stack = bundle_layer_stack(assets, layers);
  write_stack(stack, f.out);
  if (f.ply) {
    const AnimatedScene scene = make_scene(assets, stack, 0.0);
    write_ply(scene.cloud, fs::path(f.out) / "cloud.ply");
  }
  out << "layer " << stack.layers.size() << " layers" << (stack.inpainted ? "" : " (raw)")
      << " -> " << f.out << '\n';
}

// ---- animate / render -----------------------------------------------------

void run_render(const RenderFlags& f, bool animate, bool frames_given, std::ostream& out) {
  const auto layers = parse_layers(f.layers);
  if (f.frames < 2) throw UsageError("--frames must be at least 2");
  if (!(f.advance > 0.0 && f.advance < 1.0)) throw UsageError("--advance must lie in (0, 1)");
  validate(f.splat);

  if (!f.prompt.empty()) record_prompt(f.bundle, f.prompt);
  const SceneAssets assets = load_bundle(f.bundle);
  const LayerStack stack = bundle_layer_stack(assets, layers);
  const AnimatedScene scene = make_scene(assets, stack, animate ? f.flow_scale : 0.0);

  Trajectory trajectory;
  if (f.trajectory == "auto") {
    AutocruiseConfig cruise;
    cruise.advance_fraction = f.advance;
    trajectory = auto_trajectory(assets, scene, f.frames, cruise);
  } else {
    trajectory = read_trajectory(f.trajectory, render_intrinsics(assets));
    if (frames_given && trajectory.frames.size() != f.frames) {
      throw UsageError("--frames " + std::to_string(f.frames) + " disagrees with the " +
                       std::to_string(trajectory.frames.size()) + " frames in " + f.trajectory);
    }
  }

  RenderConfig config;
  config.splat = f.splat;
  config.blend = f.blend == "smoothstep" ? BlendCurve::kSmoothstep : BlendCurve::kLinear;
  const SequenceReport report = render_sequence(scene, trajectory, config, f.out);
  write_trajectory(trajectory, fs::path(f.out) / "trajectory.txt");
  out << (animate ? "animate " : "render ") << trajectory.frames.size() << " frames, "
      << scene.cloud.size() << " points, mean hole fraction " << fixed(report.mean_hole_fraction())
      << " -> " << f.out << '\n';
}

// ---- eval -----------------------------------------------------------------

struct EvalFlags {
  std::string pred;
  std::string gt;
  std::string depth;
  std::string poses;
  std::string bundle;
  std::string layers = "auto";
  std::string metrics = "psnr,ssim,consistency";
  std::string out;
  SplatConfig splat;
};

std::size_t count_frames(const fs::path& dir) {
  std::size_t n = 0;
  while (fs::exists(dir / frame_name(n, "frame", "png"))) ++n;
  return n;
}

void run_eval(const EvalFlags& f, std::ostream& out) {
  bool want_psnr = false, want_ssim = false, want_consistency = false, want_lpips = false;
  {
    std::stringstream list(f.metrics);
    std::string name;
    while (std::getline(list, name, ',')) {
      if (name == "psnr") want_psnr = true;
      else if (name == "ssim") want_ssim = true;
      else if (name == "consistency") want_consistency = true;
      else if (name == "lpips") want_lpips = true;
      else throw UsageError("unknown metric '" + name + "'");
    }
  }
  if ((want_psnr || want_ssim) && f.gt.empty()) throw UsageError("psnr and ssim need --gt");
  if (want_consistency && f.poses.empty()) throw UsageError("consistency needs --poses");

  const fs::path pred(f.pred);
  const std::size_t n = count_frames(pred);
  if (n == 0) throw Error(pred.string(), "no frame_0000.png found");

  MetricsReport report;
  report.frames.resize(n);
  if (want_psnr || want_ssim) {
    for (std::size_t t = 0; t < n; ++t) {
      const ImageBuffer a = read_png(pred / frame_name(t, "frame", "png"));
      const ImageBuffer b = read_png(fs::path(f.gt) / frame_name(t, "frame", "png"));
      if (want_psnr) report.frames[t].psnr = psnr(a, b);
      if (want_ssim) report.frames[t].ssim = ssim(a, b);
    }
  }

  if (want_consistency) {
    std::optional<SceneAssets> assets;
    if (!f.bundle.empty()) assets = load_bundle(f.bundle);

    const ImageBuffer first = read_png(pred / frame_name(0, "frame", "png"));
    CameraIntrinsics fallback;
    if (assets) {
      fallback = render_intrinsics(*assets);
    } else {
      const double focal = default_focal(first.width(), first.height());
      fallback = {focal, focal, 0.5 * first.width(), 0.5 * first.height(), first.width(),
                  first.height()};
    }
    const Trajectory trajectory = read_trajectory(f.poses, fallback);
    if (trajectory.frames.size() < 2) throw Error(f.poses, "need at least 2 poses");

    // With a bundle the sequence is re-rendered along the poses with the flow
    // held at zero, so only camera motion is measured.
    std::vector<ImageBuffer> frames;
    std::vector<ImageBuffer> depths;
    if (assets) {
      validate(f.splat);
      const LayerStack stack = bundle_layer_stack(*assets, parse_layers(f.layers));
      const AnimatedScene scene = make_scene(*assets, stack, 0.0);
      RenderConfig config;
      config.splat = f.splat;
      for (std::size_t t = 0; t < trajectory.frames.size(); ++t) {
        const Framebuffer fb = render_frame(scene, trajectory, static_cast<int>(t), config);
        frames.push_back(fb.resolved());
        depths.push_back(fb.depth);
      }
    } else {
      if (trajectory.frames.size() != n) {
        throw Error(f.poses, std::to_string(trajectory.frames.size()) + " poses for " +
                                 std::to_string(n) + " frames");
      }
      const fs::path depth_dir = f.depth.empty() ? pred : fs::path(f.depth);
      for (std::size_t t = 0; t < n; ++t) {
        frames.push_back(read_png(pred / frame_name(t, "frame", "png")));
        depths.push_back(read_pfm(depth_dir / frame_name(t, "depth", "pfm")));
      }
    }
    if (report.frames.size() < frames.size()) report.frames.resize(frames.size());
    for (std::size_t t = 0; t + 1 < frames.size(); ++t) {
      const Mask edges = depth_discontinuities(depths[t]);
      ConsistencyOptions options;
      options.exclusion = &edges;
      options.target_depth = &depths[t + 1];
      const auto& a = trajectory.frames[t];
      const auto& b = trajectory.frames[t + 1];
      report.frames[t].consistency = photometric_consistency(
          frames[t], frames[t + 1], depths[t], relative_pose(a.pose, b.pose), a.intrinsics, options);
    }
  }
  report.summarize();

  auto line = [&](const char* name, const std::optional<double>& v) {
    if (v) out << name << ' ' << fixed(*v) << '\n';
  };
  line("psnr", report.psnr);
  line("ssim", report.ssim);
  line("consistency", report.consistency);
  if (want_lpips) out << "lpips unavailable\n";

  if (!f.out.empty()) {
    std::ofstream csv(f.out, std::ios::trunc);
    if (!csv) throw Error(f.out, "cannot open for writing");
    auto cell = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string(); };
    csv << "frame,psnr,ssim,consistency\n";
    for (std::size_t t = 0; t < report.frames.size(); ++t) {
      const auto& m = report.frames[t];
      csv << t << ',' << cell(m.psnr) << ',' << cell(m.ssim) << ',' << cell(m.consistency) << '\n';
    }
    csv << "mean," << cell(report.psnr) << ',' << cell(report.ssim) << ','
        << cell(report.consistency) << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered depth image 4D scene engine", "ldi4d"};
  app.require_subcommand(1);

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic bundle with ground truth");
  synth_cmd->add_option("--preset", synth.preset, "planes | terraced-terrain | corridor")
      ->check(CLI::IsMember({"planes", "terraced-terrain", "corridor"}))
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Texture seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--width", synth.scene.width, "Original width")->capture_default_str();
  synth_cmd->add_option("--height", synth.scene.height, "Original height")->capture_default_str();
  synth_cmd->add_option("--margin", synth.scene.margin, "Outpaint margin per side")
      ->capture_default_str();
  synth_cmd->add_option("--planes", synth.scene.plane_count, "Plane count for the planes preset")
      ->capture_default_str();
  synth_cmd->add_option("--flow-speed", synth.scene.flow_speed, "Peak fluid speed, px/frame")
      ->capture_default_str();
  synth_cmd->add_option("--prompt", synth.prompt, "Text prompt recorded into the manifest");

  LayerFlags layer;
  CLI::App* layer_cmd = app.add_subcommand("layer", "Split a bundle into depth layers");
  layer_cmd->add_option("--bundle", layer.bundle, "Scene bundle directory")->required()
      ->check(CLI::ExistingDirectory);
  layer_cmd->add_option("--layers", layer.layers, "Layer count or 'auto'")->capture_default_str();
  layer_cmd->add_option("--out", layer.out, "Output directory")->required();
  layer_cmd->add_flag("--ply", layer.ply, "Also write the lifted point cloud as cloud.ply");

  RenderFlags animate;
  CLI::App* animate_cmd =
      add_render_command(app, "animate", "Render the animated camera fly-through", animate, true);
  RenderFlags render;
  CLI::App* render_cmd =
      add_render_command(app, "render", "Render the static scene along a trajectory", render, false);

  EvalFlags eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score rendered frames");
  eval_cmd->add_option("--pred", eval.pred, "Directory of frame_%04d.png")->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--gt", eval.gt, "Directory of ground-truth frame_%04d.png")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--depth", eval.depth, "Directory of depth_%04d.pfm (default --pred)")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--poses", eval.poses, "Trajectory file of the frames")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--bundle", eval.bundle,
                       "Re-render the consistency sequence from this bundle with zero flow")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--layers", eval.layers, "Layer count or 'auto' for --bundle")
      ->capture_default_str();
  eval_cmd->add_option("--metrics", eval.metrics, "Comma list of psnr,ssim,consistency,lpips")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "CSV report path");
  add_splat_flags(eval_cmd, eval.splat);

  try {
    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  try {
    if (*synth_cmd) run_synth(synth, out);
    else if (*layer_cmd) run_layer(layer, out);
    else if (*animate_cmd) run_render(animate, true, animate_cmd->count("--frames") > 0, out);
    else if (*render_cmd) run_render(render, false, render_cmd->count("--frames") > 0, out);
    else if (*eval_cmd) run_eval(eval, out);
  } catch (const UsageError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: ldi4d: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace ldi4d::cli
