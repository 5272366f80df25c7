// Copyright 2026 The TerraTile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "terra/error.hpp"

namespace terra {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr std::uint8_t kFillGray = 128;
inline constexpr Rgb kFillColor{kFillGray, kFillGray, kFillGray};

/// Color with alpha, parsed from the 8-hex-digit wire form AARRGGBB.
struct Argb {
  std::uint8_t a = 255, r = 0, g = 0, b = 0;
  friend bool operator==(const Argb&, const Argb&) = default;

  Rgb rgb() const { return {r, g, b}; }

  static Argb parse(std::string_view hex, const std::string& parameter = {}) {
    if (hex.size() == 9 && hex.front() == '#') hex.remove_prefix(1);
    if (hex.size() != 8) {
      throw ValidationError("ARGB color must be 8 hex digits", parameter);
    }
    std::array<std::uint8_t, 4> bytes{};
    for (std::size_t i = 0; i < 4; ++i) {
      int v = 0;
      for (std::size_t k = 0; k < 2; ++k) {
        const char c = hex[2 * i + k];
        int d = 0;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else throw ValidationError("ARGB color must be 8 hex digits", parameter);
        v = v * 16 + d;
      }
      bytes[i] = static_cast<std::uint8_t>(v);
    }
    return {bytes[0], bytes[1], bytes[2], bytes[3]};
  }

  std::string hex() const {
    static constexpr char kDigits[] = "0123456789ABCDEF";
    std::string s;
    for (std::uint8_t v : {a, r, g, b}) {
      s += kDigits[v >> 4];
      s += kDigits[v & 15];
    }
    return s;
  }
};

/// out = alpha * over + (1 - alpha) * under, alpha = a / 255, rounded.
inline std::uint8_t blendChannel(std::uint8_t under, std::uint8_t over, std::uint8_t alpha) {
  const int v = (over * alpha + under * (255 - alpha) + 127) / 255;
  return static_cast<std::uint8_t>(v);
}

inline Rgb blend(Rgb under, Argb over) {
  return {blendChannel(under.r, over.r, over.a), blendChannel(under.g, over.g, over.a),
          blendChannel(under.b, over.b, over.a)};
}

/// 8-bit RGB raster, row-major, row 0 at the top.
class Canvas {
 public:
  Canvas() = default;
  Canvas(int width, int height, Rgb fill = {}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw ValidationError("canvas size must be non-negative");
    pixels_.resize(static_cast<std::size_t>(width) * height * 3);
    this->fill(fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  Rgb at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }

  void set(int x, int y, Rgb c) {
    const std::size_t i = index(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  void blendAt(int x, int y, Argb c) {
    if (contains(x, y)) set(x, y, blend(at(x, y), c));
  }

  void fill(Rgb c) {
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
      pixels_[i] = c.r;
      pixels_[i + 1] = c.g;
      pixels_[i + 2] = c.b;
    }
  }

  /// Copies `src` with its top-left corner at (dx, dy), clipped to this canvas.
  void blit(const Canvas& src, int dx, int dy) {
    const int x0 = std::max(0, dx), y0 = std::max(0, dy);
    const int x1 = std::min(width_, dx + src.width()), y1 = std::min(height_, dy + src.height());
    if (x0 >= x1) return;
    for (int y = y0; y < y1; ++y) {
      const auto* from = &src.pixels_[src.index(x0 - dx, y - dy)];
      std::copy(from, from + 3 * (x1 - x0), &pixels_[index(x0, y)]);
    }
  }

  /// Mean of all channels of all pixels.
  double meanIntensity() const {
    if (pixels_.empty()) return 0.0;
    double sum = 0.0;
    for (std::uint8_t v : pixels_) sum += v;
    return sum / static_cast<double>(pixels_.size());
  }

  std::span<const std::uint8_t> bytes() const noexcept { return pixels_; }
  std::span<std::uint8_t> bytes() noexcept { return pixels_; }

  friend bool operator==(const Canvas&, const Canvas&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace terra
