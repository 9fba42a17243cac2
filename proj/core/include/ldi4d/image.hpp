// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ldi4d {

/// Row-major interleaved float image. Color samples live in [0,1]; depth and
/// flow samples are unbounded.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0f);
  ImageBuffer(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return data_.empty(); }

  float& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  std::span<float> pixel(int x, int y) noexcept {
    return {data_.data() + index(x, y, 0), static_cast<std::size_t>(channels_)};
  }
  std::span<const float> pixel(int x, int y) const noexcept {
    return {data_.data() + index(x, y, 0), static_cast<std::size_t>(channels_)};
  }

  std::span<float> row(int y) noexcept {
    return {data_.data() + index(0, y, 0), row_size()};
  }
  std::span<const float> row(int y) const noexcept {
    return {data_.data() + index(0, y, 0), row_size()};
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  bool same_size(const ImageBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// True when every sample is finite.
  bool all_finite() const noexcept;

  /// Copies the rectangle [x0, x0+w) x [y0, y0+h).
  ImageBuffer crop(int x0, int y0, int w, int h) const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t row_size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(channels_);
  }
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Binary per-pixel mask.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return bits_.size(); }

  bool operator()(int x, int y) const noexcept { return bits_[offset(x, y)] != 0; }
  void set(int x, int y, bool value = true) noexcept { bits_[offset(x, y)] = value ? 1 : 0; }

  bool test(std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool value = true) noexcept { bits_[i] = value ? 1 : 0; }

  std::size_t count() const noexcept;
  bool any() const noexcept { return count() != 0; }
  bool same_size(const ImageBuffer& image) const noexcept {
    return width_ == image.width() && height_ == image.height();
  }
  bool same_size(const Mask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  Mask operator|(const Mask& other) const;
  Mask operator&(const Mask& other) const;
  Mask operator~() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace ldi4d
