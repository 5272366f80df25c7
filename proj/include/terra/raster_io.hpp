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

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "terra/codec.hpp"
#include "terra/error.hpp"
#include "terra/image.hpp"

namespace terra::raster_io {

inline std::vector<std::uint8_t> readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.filename().string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void writeFile(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.filename().string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.filename().string());
}

/// Binary (P6) or ASCII (P3) PPM with maxval 255.
inline Canvas decodePpm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skipSpace = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&] {
    skipSpace();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw DecodeError("ppm: expected number");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1 << 20) throw DecodeError("ppm: value too large");
    }
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '3')) {
    throw DecodeError("ppm: bad signature");
  }
  const bool ascii = bytes[1] == '3';
  pos = 2;
  const int w = number(), h = number(), maxval = number();
  if (maxval != 255) throw DecodeError("ppm: only maxval 255 is supported");
  if (w < 1 || h < 1 || w > 1 << 15 || h > 1 << 15) throw DecodeError("ppm: bad dimensions");
  Canvas c(w, h);
  auto out = c.bytes();
  if (ascii) {
    for (auto& v : out) {
      const int n = number();
      if (n > 255) throw DecodeError("ppm: sample out of range");
      v = static_cast<std::uint8_t>(n);
    }
  } else {
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + out.size()) throw DecodeError("ppm: truncated");
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), out.size(), out.begin());
  }
  return c;
}

inline std::vector<std::uint8_t> encodePpm(const Canvas& c) {
  const std::string header =
      "P6\n" + std::to_string(c.width()) + " " + std::to_string(c.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), c.bytes().begin(), c.bytes().end());
  return out;
}

/// Reads PPM, PNG, JPEG or GIF, sniffing the format from the content.
inline Canvas readImage(const std::filesystem::path& path) {
  const auto bytes = readFile(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '3')) {
    return decodePpm(bytes);
  }
  const auto enc = detectEncoding(bytes);
  if (!enc) throw DecodeError("unrecognized image format: " + path.filename().string());
  return decode(bytes, *enc);
}

/// Writes by extension: .ppm, .png, .jpg/.jpeg, .gif.
inline void writeImage(const std::filesystem::path& path, const Canvas& c) {
  std::string ext = path.extension().string();
  if (!ext.empty()) ext.erase(0, 1);
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == "ppm") {
    writeFile(path, encodePpm(c));
    return;
  }
  const auto enc = encodingFromExtension(ext);
  if (!enc) throw ValidationError("unsupported output extension ." + ext, "output");
  writeFile(path, encode(c, *enc));
}

}  // namespace terra::raster_io
