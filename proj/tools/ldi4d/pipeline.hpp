// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

// The load -> layer -> lift -> trajectory chain shared by the subcommands.

#pragma once

#include <cstddef>
#include <optional>

#include "ldi4d/assets.hpp"
#include "ldi4d/camera.hpp"
#include "ldi4d/layering.hpp"
#include "ldi4d/renderer.hpp"

namespace ldi4d::cli {

/// Intervals for a bundle. A bundle with inpainted layers fixes the layer
/// count; `layers` must then agree with it. Without them, `layers` is the
/// clustering target and nullopt lets the gap threshold decide.
DepthIntervals bundle_intervals(const SceneAssets& assets, std::optional<std::size_t> layers);

/// Layer stack using the bundle's per-layer depth predictions when present and
/// fallback_layer_depths otherwise.
LayerStack bundle_layer_stack(const SceneAssets& assets, std::optional<std::size_t> layers);

/// Lifts the stack at c_1 = identity with the outpainted intrinsics.
AnimatedScene make_scene(const SceneAssets& assets, const LayerStack& stack, double flow_scale);

/// c_1 = identity, c_N from autocruise, N frames at the render intrinsics.
Trajectory auto_trajectory(const SceneAssets& assets, const AnimatedScene& scene,
                           std::size_t frames, const AutocruiseConfig& config = {});

}  // namespace ldi4d::cli
