// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "ldi4d/image.hpp"

namespace ldi4d {

// Portable float map. "Pf" carries one channel, "PF" three. Scanlines are
// stored bottom-to-top; a negative scale marks little-endian samples.
ImageBuffer read_pfm(const std::filesystem::path& path);
void write_pfm(const ImageBuffer& image, const std::filesystem::path& path);

// Middlebury optical flow: magic 202021.25, int32 width and height, then
// interleaved (u, v) float32 little-endian, top-to-bottom.
inline constexpr float kFloMagic = 202021.25f;
ImageBuffer read_flo(const std::filesystem::path& path);
void write_flo(const ImageBuffer& flow, const std::filesystem::path& path);

// 8-bit PNG. Gray decodes to one channel and color to three (alpha is
// dropped); samples map to k/255.
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const ImageBuffer& image, const std::filesystem::path& path);

// Masks are 8-bit gray PNGs holding 0 or 255; any sample >= 128 reads as set.
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const Mask& mask, const std::filesystem::path& path);

/// Rounds to the nearest 8-bit level, so that write_png/read_png is lossless.
float quantize_unit(float v) noexcept;

}  // namespace ldi4d
