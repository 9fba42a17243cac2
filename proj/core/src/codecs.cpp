// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldi4d/codecs.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "ldi4d/error.hpp"

namespace ldi4d {
namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(path.string(), what);
}

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "missing file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(path, "write failed");
}

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

float load_float(const char* p, bool little_endian) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if (little_endian != (std::endian::native == std::endian::little)) bits = byteswap32(bits);
  return std::bit_cast<float>(bits);
}

void append_float_le(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native != std::endian::little) bits = byteswap32(bits);
  char buf[4];
  std::memcpy(buf, &bits, 4);
  out.append(buf, 4);
}

void append_int32_le(std::string& out, std::int32_t v) {
  append_float_le(out, std::bit_cast<float>(v));
}

// Reads one whitespace-delimited PFM header token starting at `pos`.
std::string header_token(const std::vector<char>& bytes, std::size_t& pos,
                         const std::filesystem::path& path) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos || pos >= bytes.size()) fail(path, "malformed PFM header");
  return {bytes.begin() + static_cast<std::ptrdiff_t>(start),
          bytes.begin() + static_cast<std::ptrdiff_t>(pos)};
}

int parse_dimension(const std::string& token, const std::filesystem::path& path) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(token, &used);
  } catch (const std::exception&) {
    fail(path, "malformed header dimension '" + token + "'");
  }
  if (used != token.size() || v <= 0 || v > (1 << 20)) {
    fail(path, "malformed header dimension '" + token + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

ImageBuffer read_pfm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  std::size_t pos = 0;
  const std::string magic = header_token(bytes, pos, path);
  int channels = 0;
  if (magic == "Pf") {
    channels = 1;
  } else if (magic == "PF") {
    channels = 3;
  } else {
    fail(path, "malformed PFM header: bad magic '" + magic + "'");
  }
  const int width = parse_dimension(header_token(bytes, pos, path), path);
  const int height = parse_dimension(header_token(bytes, pos, path), path);
  const std::string scale_token = header_token(bytes, pos, path);
  double scale = 0.0;
  try {
    scale = std::stod(scale_token);
  } catch (const std::exception&) {
    fail(path, "malformed PFM header: bad scale '" + scale_token + "'");
  }
  if (scale == 0.0 || !std::isfinite(scale)) fail(path, "malformed PFM header: zero scale");
  ++pos;  // single whitespace byte ends the header

  const bool little_endian = scale < 0.0;
  const std::size_t row_floats = static_cast<std::size_t>(width) * channels;
  const std::size_t need = row_floats * static_cast<std::size_t>(height) * 4;
  if (bytes.size() - pos < need) fail(path, "truncated PFM payload");

  ImageBuffer image(width, height, channels);
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    const char* src = bytes.data() + pos + static_cast<std::size_t>(row) * row_floats * 4;
    auto dst = image.row(y);
    for (std::size_t i = 0; i < row_floats; ++i) dst[i] = load_float(src + 4 * i, little_endian);
  }
  return image;
}

void write_pfm(const ImageBuffer& image, const std::filesystem::path& path) {
  if (image.channels() != 1 && image.channels() != 3) {
    fail(path, "PFM supports 1 or 3 channels, got " + std::to_string(image.channels()));
  }
  std::string out = (image.channels() == 1 ? "Pf\n" : "PF\n") + std::to_string(image.width()) +
                    " " + std::to_string(image.height()) + "\n-1.0\n";
  out.reserve(out.size() + image.data().size() * 4);
  for (int y = image.height() - 1; y >= 0; --y) {
    for (float v : image.row(y)) append_float_le(out, v);
  }
  spill(path, out);
}

ImageBuffer read_flo(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < 12) fail(path, "truncated .flo header");
  if (load_float(bytes.data(), true) != kFloMagic) fail(path, "bad .flo magic");
  const auto width = std::bit_cast<std::int32_t>(load_float(bytes.data() + 4, true));
  const auto height = std::bit_cast<std::int32_t>(load_float(bytes.data() + 8, true));
  if (width <= 0 || height <= 0 || width > (1 << 20) || height > (1 << 20)) {
    fail(path, "bad .flo dimensions");
  }
  const std::size_t count = static_cast<std::size_t>(width) * height * 2;
  if (bytes.size() - 12 < count * 4) fail(path, "truncated .flo payload");
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = load_float(bytes.data() + 12 + 4 * i, true);
  return ImageBuffer(width, height, 2, std::move(data));
}

void write_flo(const ImageBuffer& flow, const std::filesystem::path& path) {
  if (flow.channels() != 2) fail(path, ".flo requires a 2-channel buffer");
  std::string out;
  out.reserve(12 + flow.data().size() * 4);
  append_float_le(out, kFloMagic);
  append_int32_le(out, flow.width());
  append_int32_le(out, flow.height());
  for (float v : flow.data()) append_float_le(out, v);
  spill(path, out);
}

float quantize_unit(float v) noexcept {
  const float c = std::clamp(std::isfinite(v) ? v : 0.0f, 0.0f, 1.0f);
  return static_cast<float>(std::lround(c * 255.0f)) / 255.0f;
}

namespace {

struct PngImage {
  png_image img{};
  PngImage() {
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> decode_png(const std::filesystem::path& path, int& width,
                                     int& height, int& channels) {
  // libpng's stdio reader would lose the path in error messages; read bytes first.
  const auto bytes = slurp(path);
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size())) {
    fail(path, std::string("PNG decode failed: ") + png.img.message);
  }
  const bool color = (png.img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  channels = color ? 3 : 1;
  width = static_cast<int>(png.img.width);
  height = static_cast<int>(png.img.height);
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png.img));
  if (!png_image_finish_read(&png.img, nullptr, pixels.data(), 0, nullptr)) {
    fail(path, std::string("PNG decode failed: ") + png.img.message);
  }
  return pixels;
}

void encode_png(const std::filesystem::path& path, const std::uint8_t* pixels, int width,
                int height, int channels) {
  PngImage png;
  png.img.width = static_cast<png_uint_32>(width);
  png.img.height = static_cast<png_uint_32>(height);
  png.img.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.img, nullptr, &size, 0, pixels, 0, nullptr)) {
    fail(path, std::string("PNG encode failed: ") + png.img.message);
  }
  std::string buffer(size, '\0');
  if (!png_image_write_to_memory(&png.img, buffer.data(), &size, 0, pixels, 0, nullptr)) {
    fail(path, std::string("PNG encode failed: ") + png.img.message);
  }
  buffer.resize(size);
  spill(path, buffer);
}

}  // namespace

ImageBuffer read_png(const std::filesystem::path& path) {
  int width = 0, height = 0, channels = 0;
  const auto pixels = decode_png(path, width, height, channels);
  std::vector<float> data(pixels.size());
  std::transform(pixels.begin(), pixels.end(), data.begin(),
                 [](std::uint8_t b) { return static_cast<float>(b) / 255.0f; });
  return ImageBuffer(width, height, channels, std::move(data));
}

void write_png(const ImageBuffer& image, const std::filesystem::path& path) {
  if (image.channels() != 1 && image.channels() != 3) {
    fail(path, "PNG output supports 1 or 3 channels, got " + std::to_string(image.channels()));
  }
  std::vector<std::uint8_t> pixels(image.data().size());
  std::transform(image.data().begin(), image.data().end(), pixels.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::lround(quantize_unit(v) * 255.0f));
  });
  encode_png(path, pixels.data(), image.width(), image.height(), image.channels());
}

Mask read_mask_png(const std::filesystem::path& path) {
  int width = 0, height = 0, channels = 0;
  const auto pixels = decode_png(path, width, height, channels);
  Mask mask(width, height);
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    mask.set(i, pixels[i * static_cast<std::size_t>(channels)] >= 128);
  }
  return mask;
}

void write_mask_png(const Mask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> pixels(mask.pixel_count());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = mask.test(i) ? 255 : 0;
  encode_png(path, pixels.data(), mask.width(), mask.height(), 1);
}

}  // namespace ldi4d
