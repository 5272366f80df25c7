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

// Tile and map image encoders. PNG and JPEG go through libpng/libjpeg
// with in-memory I/O; GIF uses the bundled codec in gif.hpp.

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <jpeglib.h>
#include <png.h>
#include <zlib.h>

#include "terra/error.hpp"
#include "terra/gif.hpp"
#include "terra/image.hpp"

namespace terra {

enum class Encoding { Jpeg, Gif, Png };

inline constexpr int kJpegQuality = 90;

inline std::string_view mediaType(Encoding e) {
  switch (e) {
    case Encoding::Jpeg: return "image/jpeg";
    case Encoding::Gif: return "image/gif";
    case Encoding::Png: return "image/png";
  }
  return "application/octet-stream";
}

inline std::string_view extension(Encoding e) {
  switch (e) {
    case Encoding::Jpeg: return "jpg";
    case Encoding::Gif: return "gif";
    case Encoding::Png: return "png";
  }
  return "bin";
}

inline std::optional<Encoding> encodingFromExtension(std::string_view ext) {
  if (ext == "jpg" || ext == "jpeg") return Encoding::Jpeg;
  if (ext == "gif") return Encoding::Gif;
  if (ext == "png") return Encoding::Png;
  return std::nullopt;
}

inline std::optional<Encoding> encodingFromMediaType(std::string_view type) {
  if (type == "image/jpeg") return Encoding::Jpeg;
  if (type == "image/gif") return Encoding::Gif;
  if (type == "image/png") return Encoding::Png;
  return std::nullopt;
}

/// Sniffs the format from magic numbers.
inline std::optional<Encoding> detectEncoding(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return Encoding::Jpeg;
  }
  if (bytes.size() >= 6 && std::memcmp(bytes.data(), "GIF8", 4) == 0) return Encoding::Gif;
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0) {
    return Encoding::Png;
  }
  return std::nullopt;
}

namespace codec_detail {

// libpng and libjpeg report fatal errors through callbacks that must not
// return; both paths longjmp back to the setjmp in the calling function.
// Nothing with a non-trivial destructor may be constructed between the
// setjmp and the library calls in those functions.

struct PngReadState {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;
};

inline void pngRead(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->pos + len > st->data.size()) png_error(png, "truncated");
  std::memcpy(out, st->data.data() + st->pos, len);
  st->pos += len;
}

inline void pngWrite(png_structp png, png_bytep in, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + len);
}

inline void pngFlush(png_structp) {}

inline void pngSilentWarning(png_structp, png_const_charp) {}

[[noreturn]] inline void pngSilentError(png_structp png, png_const_charp) { png_longjmp(png, 1); }

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

inline void jpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

// Corrupt-data warnings (level -1), such as a premature end of data,
// are treated as fatal.
inline void jpegEmit(j_common_ptr cinfo, int level) {
  if (level < 0) jpegErrorExit(cinfo);
}

}  // namespace codec_detail

inline std::vector<std::uint8_t> encodePng(const Canvas& c) {
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(c.height()));
  auto bytes = c.bytes();
  for (int y = 0; y < c.height(); ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * c.width() * 3);
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, codec_detail::pngSilentError,
                                            codec_detail::pngSilentWarning);
  if (!png) throw RenderError("png: cannot allocate encoder");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw RenderError("png: encode failed");
  }
  png_set_write_fn(png, &out, codec_detail::pngWrite, codec_detail::pngFlush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(c.width()),
               static_cast<png_uint_32>(c.height()), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 1);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_set_compression_strategy(png, Z_RLE);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

inline Canvas decodePng(std::span<const std::uint8_t> bytes) {
  codec_detail::PngReadState state{bytes, 0};
  Canvas canvas;
  std::vector<png_bytep> rows;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, codec_detail::pngSilentError,
                                           codec_detail::pngSilentWarning);
  if (!png) throw DecodeError("png: cannot allocate decoder");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("png: corrupt data");
  }
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("png: bad signature");
  }
  png_set_read_fn(png, &state, codec_detail::pngRead);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  const auto w = png_get_image_width(png, info);
  const auto h = png_get_image_height(png, info);
  if (w > 1u << 15 || h > 1u << 15 || png_get_rowbytes(png, info) != w * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("png: unsupported layout");
  }
  canvas = Canvas(static_cast<int>(w), static_cast<int>(h));
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = canvas.bytes().data() + static_cast<std::size_t>(y) * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return canvas;
}

inline std::vector<std::uint8_t> encodeJpeg(const Canvas& c, int quality = kJpegQuality) {
  if (c.empty()) throw RenderError("jpeg: empty image");
  jpeg_compress_struct cinfo{};
  codec_detail::JpegError err{};
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = codec_detail::jpegErrorExit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw RenderError("jpeg: encode failed");
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(c.width());
  cinfo.image_height = static_cast<JDIMENSION>(c.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  auto bytes = c.bytes();
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(bytes.data() +
                                        static_cast<std::size_t>(cinfo.next_scanline) * c.width() * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

inline Canvas decodeJpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  codec_detail::JpegError err{};
  Canvas canvas;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = codec_detail::jpegErrorExit;
  err.mgr.emit_message = codec_detail::jpegEmit;
  if (bytes.size() < 3 || bytes[0] != 0xFF || bytes[1] != 0xD8) {
    throw DecodeError("jpeg: bad signature");
  }
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError("jpeg: corrupt data");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_components != 3 || cinfo.output_width > 1u << 15 ||
      cinfo.output_height > 1u << 15) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError("jpeg: unsupported layout");
  }
  canvas = Canvas(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = canvas.bytes().data() +
                   static_cast<std::size_t>(cinfo.output_scanline) * cinfo.output_width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return canvas;
}

inline std::vector<std::uint8_t> encode(const Canvas& c, Encoding e) {
  switch (e) {
    case Encoding::Jpeg: return encodeJpeg(c);
    case Encoding::Gif: return gif::encode(c);
    case Encoding::Png: return encodePng(c);
  }
  throw RenderError("unknown encoding");
}

inline Canvas decode(std::span<const std::uint8_t> bytes, Encoding e) {
  switch (e) {
    case Encoding::Jpeg: return decodeJpeg(bytes);
    case Encoding::Gif: return gif::decode(bytes);
    case Encoding::Png: return decodePng(bytes);
  }
  throw DecodeError("unknown encoding");
}

}  // namespace terra
