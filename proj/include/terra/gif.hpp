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

// Minimal GIF89a codec: single-frame images with a global color table.
// Images with more than 256 distinct colors are quantized to a 6x7x6
// color cube before encoding.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "terra/error.hpp"
#include "terra/image.hpp"

namespace terra::gif {

namespace detail {

class BitWriter {
 public:
  void write(unsigned code, int bits) {
    acc_ |= static_cast<std::uint32_t>(code) << nbits_;
    nbits_ += bits;
    while (nbits_ >= 8) {
      out_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
      acc_ >>= 8;
      nbits_ -= 8;
    }
  }
  std::vector<std::uint8_t> finish() {
    if (nbits_ > 0) out_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
    acc_ = 0;
    nbits_ = 0;
    return std::move(out_);
  }

 private:
  std::vector<std::uint8_t> out_;
  std::uint32_t acc_ = 0;
  int nbits_ = 0;
};

inline std::vector<std::uint8_t> lzwEncode(std::span<const std::uint8_t> indices, int minCodeSize) {
  const unsigned clear = 1u << minCodeSize;
  const unsigned eoi = clear + 1;
  BitWriter w;
  std::unordered_map<std::uint32_t, unsigned> dict;
  unsigned next = eoi + 1;
  int width = minCodeSize + 1;
  w.write(clear, width);
  if (indices.empty()) {
    w.write(eoi, width);
    return w.finish();
  }
  unsigned prefix = indices[0];
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const std::uint8_t k = indices[i];
    const std::uint32_t key = (prefix << 8) | k;
    if (auto it = dict.find(key); it != dict.end()) {
      prefix = it->second;
      continue;
    }
    w.write(prefix, width);
    if (next < 4096) {
      dict.emplace(key, next);
      if (next == (1u << width) && width < 12) ++width;
      ++next;
    } else {
      w.write(clear, width);
      dict.clear();
      next = eoi + 1;
      width = minCodeSize + 1;
    }
    prefix = k;
  }
  w.write(prefix, width);
  w.write(eoi, width);
  return w.finish();
}

inline std::vector<std::uint8_t> lzwDecode(std::span<const std::uint8_t> data, int minCodeSize,
                                           std::size_t expected) {
  if (minCodeSize < 2 || minCodeSize > 8) throw DecodeError("gif: bad LZW code size");
  const unsigned clear = 1u << minCodeSize;
  const unsigned eoi = clear + 1;
  std::vector<std::uint16_t> prefix(4096);
  std::vector<std::uint8_t> suffix(4096);
  std::vector<std::uint8_t> first(4096);
  for (unsigned i = 0; i < clear; ++i) {
    suffix[i] = static_cast<std::uint8_t>(i);
    first[i] = static_cast<std::uint8_t>(i);
  }
  std::vector<std::uint8_t> out;
  out.reserve(expected);
  std::vector<std::uint8_t> stack;

  int width = minCodeSize + 1;
  unsigned next = eoi + 1;
  int prev = -1;
  std::uint32_t acc = 0;
  int nbits = 0;
  std::size_t pos = 0;

  auto emit = [&](unsigned code) {
    stack.clear();
    while (code >= clear) {
      stack.push_back(suffix[code]);
      code = prefix[code];
    }
    stack.push_back(static_cast<std::uint8_t>(code));
    out.insert(out.end(), stack.rbegin(), stack.rend());
  };

  while (true) {
    while (nbits < width) {
      if (pos >= data.size()) return out;  // truncated stream; caller checks size
      acc |= static_cast<std::uint32_t>(data[pos++]) << nbits;
      nbits += 8;
    }
    const unsigned code = acc & ((1u << width) - 1);
    acc >>= width;
    nbits -= width;

    if (code == clear) {
      width = minCodeSize + 1;
      next = eoi + 1;
      prev = -1;
      continue;
    }
    if (code == eoi) break;
    if (prev < 0) {
      if (code >= clear) throw DecodeError("gif: invalid first code");
      out.push_back(static_cast<std::uint8_t>(code));
      prev = static_cast<int>(code);
      continue;
    }
    std::uint8_t head = 0;
    if (code < next) {
      emit(code);
      head = first[code];
    } else if (code == next) {
      head = first[prev];
      emit(static_cast<unsigned>(prev));
      out.push_back(head);
    } else {
      throw DecodeError("gif: LZW code out of range");
    }
    if (next < 4096) {
      prefix[next] = static_cast<std::uint16_t>(prev);
      suffix[next] = head;
      first[next] = first[prev];
      ++next;
      if (next == (1u << width) && width < 12) ++width;
    }
    prev = static_cast<int>(code);
    if (out.size() > expected) break;
  }
  return out;
}

inline std::uint8_t cubeLevel(std::uint8_t v, int levels) {
  return static_cast<std::uint8_t>((v * (levels - 1) + 127) / 255);
}

}  // namespace detail

inline std::vector<std::uint8_t> encode(const Canvas& c) {
  if (c.width() > 0xFFFF || c.height() > 0xFFFF) throw ValidationError("gif: image too large");
  const std::size_t n = static_cast<std::size_t>(c.width()) * c.height();

  std::vector<Rgb> palette;
  std::vector<std::uint8_t> indices(n);
  {
    std::map<std::uint32_t, std::uint8_t> lookup;
    bool fits = true;
    for (std::size_t i = 0; i < n && fits; ++i) {
      const Rgb p = c.at(static_cast<int>(i % c.width()), static_cast<int>(i / c.width()));
      const std::uint32_t key = (p.r << 16) | (p.g << 8) | p.b;
      auto [it, inserted] = lookup.try_emplace(key, static_cast<std::uint8_t>(palette.size()));
      if (inserted) {
        if (palette.size() == 256) {
          fits = false;
          break;
        }
        palette.push_back(p);
      }
      indices[i] = it->second;
    }
    if (!fits) {
      palette.clear();
      for (int r = 0; r < 6; ++r)
        for (int g = 0; g < 7; ++g)
          for (int b = 0; b < 6; ++b)
            palette.push_back({static_cast<std::uint8_t>(r * 255 / 5),
                               static_cast<std::uint8_t>(g * 255 / 6),
                               static_cast<std::uint8_t>(b * 255 / 5)});
      for (std::size_t i = 0; i < n; ++i) {
        const Rgb p = c.at(static_cast<int>(i % c.width()), static_cast<int>(i / c.width()));
        indices[i] = static_cast<std::uint8_t>(detail::cubeLevel(p.r, 6) * 42 +
                                               detail::cubeLevel(p.g, 7) * 6 +
                                               detail::cubeLevel(p.b, 6));
      }
    }
  }

  int tableBits = 1;
  while ((1u << tableBits) < palette.size()) ++tableBits;
  palette.resize(std::size_t{1} << tableBits);
  const int minCodeSize = std::max(2, tableBits);

  std::vector<std::uint8_t> out = {'G', 'I', 'F', '8', '9', 'a'};
  auto u16 = [&](int v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  };
  u16(c.width());
  u16(c.height());
  out.push_back(static_cast<std::uint8_t>(0x80 | ((tableBits - 1) << 4) | (tableBits - 1)));
  out.push_back(0);  // background index
  out.push_back(0);  // aspect
  for (const Rgb& p : palette) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  out.push_back(0x2C);
  u16(0);
  u16(0);
  u16(c.width());
  u16(c.height());
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(minCodeSize));
  const auto lzw = detail::lzwEncode(indices, minCodeSize);
  for (std::size_t i = 0; i < lzw.size(); i += 255) {
    const std::size_t len = std::min<std::size_t>(255, lzw.size() - i);
    out.push_back(static_cast<std::uint8_t>(len));
    out.insert(out.end(), lzw.begin() + static_cast<std::ptrdiff_t>(i),
               lzw.begin() + static_cast<std::ptrdiff_t>(i + len));
  }
  out.push_back(0);
  out.push_back(0x3B);
  return out;
}

inline Canvas decode(std::span<const std::uint8_t> in) {
  std::size_t pos = 0;
  auto need = [&](std::size_t k) {
    if (pos + k > in.size()) throw DecodeError("gif: truncated");
  };
  auto u8 = [&]() {
    need(1);
    return in[pos++];
  };
  auto u16 = [&]() {
    need(2);
    const int v = in[pos] | (in[pos + 1] << 8);
    pos += 2;
    return v;
  };
  need(6);
  if (!(in[0] == 'G' && in[1] == 'I' && in[2] == 'F' && in[3] == '8' &&
        (in[4] == '7' || in[4] == '9') && in[5] == 'a')) {
    throw DecodeError("gif: bad signature");
  }
  pos = 6;
  const int screenW = u16();
  const int screenH = u16();
  const std::uint8_t flags = u8();
  u8();
  u8();
  std::vector<Rgb> global;
  auto readTable = [&](int bits) {
    std::vector<Rgb> t(std::size_t{1} << bits);
    need(3 * t.size());
    for (Rgb& p : t) {
      p = {in[pos], in[pos + 1], in[pos + 2]};
      pos += 3;
    }
    return t;
  };
  if (flags & 0x80) global = readTable((flags & 7) + 1);

  while (true) {
    const std::uint8_t block = u8();
    if (block == 0x3B) throw DecodeError("gif: no image data");
    if (block == 0x21) {
      u8();
      for (std::uint8_t len = u8(); len != 0; len = u8()) {
        need(len);
        pos += len;
      }
      continue;
    }
    if (block != 0x2C) throw DecodeError("gif: unexpected block");
    const int left = u16(), top = u16(), w = u16(), h = u16();
    const std::uint8_t imgFlags = u8();
    std::vector<Rgb> palette = global;
    if (imgFlags & 0x80) palette = readTable((imgFlags & 7) + 1);
    if (palette.empty()) throw DecodeError("gif: no color table");
    const bool interlaced = imgFlags & 0x40;
    const int minCodeSize = u8();
    std::vector<std::uint8_t> data;
    for (std::uint8_t len = u8(); len != 0; len = u8()) {
      need(len);
      data.insert(data.end(), in.begin() + static_cast<std::ptrdiff_t>(pos),
                  in.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;
    }
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const auto indices = detail::lzwDecode(data, minCodeSize, n);
    if (indices.size() < n) throw DecodeError("gif: truncated image data");

    std::vector<int> rowOrder;
    rowOrder.reserve(static_cast<std::size_t>(h));
    if (interlaced) {
      for (int r = 0; r < h; r += 8) rowOrder.push_back(r);
      for (int r = 4; r < h; r += 8) rowOrder.push_back(r);
      for (int r = 2; r < h; r += 4) rowOrder.push_back(r);
      for (int r = 1; r < h; r += 2) rowOrder.push_back(r);
    } else {
      for (int r = 0; r < h; ++r) rowOrder.push_back(r);
    }
    Canvas c(screenW, screenH);
    for (int i = 0; i < h; ++i) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t idx = indices[static_cast<std::size_t>(i) * w + x];
        if (idx >= palette.size()) throw DecodeError("gif: color index out of range");
        const int cx = left + x, cy = top + rowOrder[static_cast<std::size_t>(i)];
        if (c.contains(cx, cy)) c.set(cx, cy, palette[idx]);
      }
    }
    return c;
  }
}

}  // namespace terra::gif
