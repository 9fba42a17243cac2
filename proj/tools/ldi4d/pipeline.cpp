// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/pipeline.hpp"

#include <string>

#include "ldi4d/animation.hpp"
#include "ldi4d/error.hpp"
#include "ldi4d/pointcloud.hpp"

namespace ldi4d::cli {

DepthIntervals bundle_intervals(const SceneAssets& assets, std::optional<std::size_t> layers) {
  ClusterConfig config;
  config.target_layers = layers;
  if (!assets.inpainted_layers.empty()) {
    const std::size_t provided = assets.inpainted_layers.size();
    if (layers && *layers != provided) {
      throw Error("layering", "--layers " + std::to_string(*layers) + " conflicts with " +
                                  std::to_string(provided) + " inpainted layers in the bundle");
    }
    config.target_layers = provided;
  }
  return cluster_depth(assets.depth, config);
}

LayerStack bundle_layer_stack(const SceneAssets& assets, std::optional<std::size_t> layers) {
  const DepthIntervals intervals = bundle_intervals(assets, layers);
  if (!assets.predicted_layer_depths.empty()) {
    return build_layer_stack(assets, intervals, assets.predicted_layer_depths);
  }
  const auto predicted = fallback_layer_depths(assets, intervals);
  return build_layer_stack(assets, intervals, predicted);
}

AnimatedScene make_scene(const SceneAssets& assets, const LayerStack& stack, double flow_scale) {
  AnimatedScene scene;
  scene.lift_intrinsics = outpainted_intrinsics(assets);
  scene.cloud = lift_layers(stack, scene.lift_intrinsics, scene.lift_pose);
  scene.flow = EulerianFlow(assets.flow, flow_scale);
  return scene;
}

Trajectory auto_trajectory(const SceneAssets& assets, const AnimatedScene& scene,
                           std::size_t frames, const AutocruiseConfig& config) {
  const CameraIntrinsics K = render_intrinsics(assets);
  const CameraPose c1 = scene.lift_pose;
  const CameraPose cN = autocruise_end_pose(scene.cloud.positions, c1, K, config);
  return make_trajectory(c1, cN, K, frames);
}

}  // namespace ldi4d::cli
