// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations. None of these call into the code they
// check; they trade speed for the most literal formulation available.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ldi4d/assets.hpp"
#include "ldi4d/camera.hpp"
#include "ldi4d/image.hpp"

namespace ldi4d::testing {

/// Agglomerative single-linkage clustering by repeated all-pairs search:
/// start from one cluster per distinct value and merge the two clusters with
/// the smallest minimum pairwise distance (ties: the pair lying furthest
/// right) until `target` remain. Returns [min, midpoints of the separating
/// gaps..., max].
std::vector<double> agglomerative_boundaries(std::span<const float> values, std::size_t target);

/// Index of the first layer at or after `from` whose validity covers (x, y),
/// or layers.size().
std::size_t first_valid_layer(std::span<const InpaintedLayer> layers, std::size_t from, int x,
                              int y);

double naive_mse(const ImageBuffer& a, const ImageBuffer& b);

/// SSIM evaluated window by window with a 2-D Gaussian built directly from
/// exp(-(dx^2 + dy^2) / 2 sigma^2), sums taken over the full 11x11 window.
double ssim_direct(const ImageBuffer& a, const ImageBuffer& b);

/// Euler integration of a two-channel field read with round-half-away
/// nearest lookup and clamped to the frame after every step.
Eigen::Vector2d euler_reference(const ImageBuffer& field, Eigen::Vector2d p, int steps, double sign);

/// Pixel position of `world` seen by a pinhole with the given rotation matrix
/// R and translation t (camera = R X + t), written out with scalars.
Eigen::Vector2d scalar_projection(const Eigen::Vector3d& world, const CameraIntrinsics& k,
                                  const CameraPose& pose);

}  // namespace ldi4d::testing
