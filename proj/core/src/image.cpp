// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/image.hpp"

#include <algorithm>
#include <cmath>

#include "ldi4d/error.hpp"

namespace ldi4d {

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels < 1) {
    throw Error("image", "invalid image shape");
  }
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 0 || height < 0 || channels < 1 ||
      data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw Error("image", "sample count does not match width*height*channels");
  }
}

bool ImageBuffer::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

ImageBuffer ImageBuffer::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > width_ || y0 + h > height_) {
    throw Error("image", "crop rectangle outside image");
  }
  ImageBuffer out(w, h, channels_);
  for (int y = 0; y < h; ++y) {
    const auto src = row(y0 + y).subspan(static_cast<std::size_t>(x0) * channels_,
                                         static_cast<std::size_t>(w) * channels_);
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error("image", "invalid mask shape");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask Mask::operator|(const Mask& other) const {
  if (!same_size(other)) throw Error("image", "mask size mismatch");
  Mask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] |= other.bits_[i];
  return out;
}

Mask Mask::operator&(const Mask& other) const {
  if (!same_size(other)) throw Error("image", "mask size mismatch");
  Mask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= other.bits_[i];
  return out;
}

Mask Mask::operator~() const {
  Mask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

}  // namespace ldi4d
