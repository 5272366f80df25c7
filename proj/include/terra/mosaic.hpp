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
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "terra/codec.hpp"
#include "terra/error.hpp"
#include "terra/font.hpp"
#include "terra/geo.hpp"
#include "terra/image.hpp"
#include "terra/projection.hpp"

namespace terra {

struct FetchedTile {
  Encoding encoding = Encoding::Png;
  std::vector<std::uint8_t> bytes;
};

/// Returns the encoded tile, or nullopt when no tile is stored for the id.
using TileFetcher = std::function<std::optional<FetchedTile>(const TileId&)>;

inline std::string describe(const TileId& id) {
  return "tile(theme=" + std::to_string(static_cast<int>(id.theme)) +
         ", scale=" + std::to_string(id.scale.code) + ", scene=" + std::to_string(id.scene.zone) +
         ", x=" + std::to_string(id.x) + ", y=" + std::to_string(id.y) + ")";
}

struct ImageSize {
  int width = 0;
  int height = 0;
};

/// Image dimensions implied by the corner coordinates of an AreaBoundingBox.
inline ImageSize imageSize(const AreaBoundingBox& abb) {
  const auto& nw = abb.northWest;
  const auto& ne = abb.northEast;
  const auto& sw = abb.southWest;
  return {static_cast<int>((ne.tileMeta.id.x - nw.tileMeta.id.x) * kTilePixels +
                           ne.offset.xOffset - nw.offset.xOffset + 1),
          static_cast<int>((nw.tileMeta.id.y - sw.tileMeta.id.y) * kTilePixels +
                           sw.offset.yOffset - nw.offset.yOffset + 1)};
}

struct ComposeOptions {
  /// When set, tiles are fetched in parallel and `fetch` must be thread-safe.
  bool concurrentFetch = false;
};

/// Assembles the tiles named by `abb` into one image. Tiles are visited
/// column by column from the north-west tile eastward, and within a column
/// from north to south; each lands at
///   ((x - xStart) * 200 - xOffset, (yStart - y) * 200 - yOffset)
/// so the north-west offsets crop the left and top edges, and the canvas
/// bounds crop the right and bottom. Absent tiles stay mid-gray.
inline Canvas composeArea(const AreaBoundingBox& abb, const TileFetcher& fetch,
                          ComposeOptions options = {}) {
  const TileId start = abb.northWest.tileMeta.id;
  const std::int64_t xEnd = abb.northEast.tileMeta.id.x;
  const std::int64_t yEnd = abb.southWest.tileMeta.id.y;
  const int xOffset = abb.northWest.offset.xOffset;
  const int yOffset = abb.northWest.offset.yOffset;
  const ImageSize size = imageSize(abb);
  if (size.width < 1 || size.height < 1 || xEnd < start.x || yEnd > start.y) {
    throw ValidationError("inconsistent AreaBoundingBox");
  }
  Canvas canvas(size.width, size.height, kFillColor);

  std::vector<TileId> order;
  for (std::int64_t x = start.x; x <= xEnd; ++x) {
    for (std::int64_t y = start.y; y >= yEnd; --y) {
      TileId tid = start;
      tid.x = x;
      tid.y = y;
      order.push_back(tid);
    }
  }

  auto place = [&](const TileId& tid, const std::optional<FetchedTile>& fetched) {
    if (!fetched) return;
    Canvas tile;
    try {
      tile = decode(fetched->bytes, fetched->encoding);
    } catch (const DecodeError& e) {
      throw RenderError("cannot decode " + describe(tid) + ": " + e.what());
    }
    if (tile.width() != kTilePixels || tile.height() != kTilePixels) {
      throw RenderError(describe(tid) + " is not 200x200");
    }
    canvas.blit(tile, static_cast<int>((tid.x - start.x) * kTilePixels - xOffset),
                static_cast<int>((start.y - tid.y) * kTilePixels - yOffset));
  };

  if (options.concurrentFetch) {
    std::vector<std::future<std::optional<FetchedTile>>> pending;
    pending.reserve(order.size());
    for (const TileId& tid : order) {
      pending.push_back(std::async(std::launch::async, [&fetch, tid] { return fetch(tid); }));
    }
    for (std::size_t i = 0; i < order.size(); ++i) place(order[i], pending[i].get());
  } else {
    for (const TileId& tid : order) place(tid, fetch(tid));
  }
  return canvas;
}

enum class GridStyle { None, UtmGrid, GeoGrid };

struct RenderStyle {
  GridStyle gridStyle = GridStyle::None;
  int gridWidthPx = 1;
  Argb gridColor{0xFF, 0xFF, 0xFF, 0x00};
  /// Overrides the automatic grid spacing (meters for UtmGrid, degrees for GeoGrid).
  std::optional<double> gridSpacing;
  int borderWidthPx = 0;
  Argb borderColor{0xFF, 0x00, 0x00, 0x00};
  std::string fontName = "Arial";
  Argb fontColor{0xFF, 0xFF, 0xFF, 0xFF};
  bool logo = false;
  std::string caption;
  /// Debug aid: outline the tiles that contributed to the image.
  bool tileBoundaries = false;
};

inline constexpr double kMinGridSpacingPx = 100.0;
inline constexpr double kMetersPerDegreeLat = 111320.0;

/// Smallest value of the form {1,2,5} * 10^k whose on-screen size
/// (value * unitsToPixels) is at least 100 pixels.
inline double niceSpacing(double unitsToPixels) {
  double decade = std::pow(10.0, std::floor(std::log10(kMinGridSpacingPx / unitsToPixels)) - 1);
  while (true) {
    for (double m : {1.0, 2.0, 5.0}) {
      const double v = m * decade;
      if (v * unitsToPixels >= kMinGridSpacingPx * (1 - 1e-12)) return v;
    }
    decade *= 10.0;
  }
}

inline double utmGridSpacingMeters(double metersPerPixel) {
  return niceSpacing(1.0 / metersPerPixel);
}

inline double geoGridSpacingDegrees(double metersPerPixel) {
  return niceSpacing(kMetersPerDegreeLat / metersPerPixel);
}

namespace mosaic_detail {

class LineMask {
 public:
  LineMask(int w, int h) : w_(w), h_(h), bits_(static_cast<std::size_t>(w) * h, false) {}
  void mark(int x, int y) {
    if (x >= 0 && y >= 0 && x < w_ && y < h_) bits_[static_cast<std::size_t>(y) * w_ + x] = true;
  }
  void markColumnBand(int col, int row, int width) {
    const int start = col - (width - 1) / 2;
    for (int i = 0; i < width; ++i) mark(start + i, row);
  }
  void markRowBand(int col, int row, int width) {
    const int start = row - (width - 1) / 2;
    for (int i = 0; i < width; ++i) mark(col, start + i);
  }
  void apply(Canvas& c, Argb color) const {
    for (int y = 0; y < h_; ++y)
      for (int x = 0; x < w_; ++x)
        if (bits_[static_cast<std::size_t>(y) * w_ + x]) c.blendAt(x, y, color);
  }

 private:
  int w_, h_;
  std::vector<bool> bits_;
};

inline void utmGrid(LineMask& mask, const Canvas& c, const PixelGeoref& g, double spacing,
                    int width) {
  const double right = g.leftEasting + c.width() * g.metersPerPixelX;
  const double bottom = g.topNorthing - c.height() * g.metersPerPixelY;
  for (double k = std::ceil(g.leftEasting / spacing); k * spacing < right; k += 1.0) {
    const int col =
        static_cast<int>(std::floor((k * spacing - g.leftEasting) / g.metersPerPixelX + 1e-9));
    for (int row = 0; row < c.height(); ++row) mask.markColumnBand(col, row, width);
  }
  for (double k = std::floor(g.topNorthing / spacing); k * spacing > bottom; k -= 1.0) {
    // Row whose top edge sits on the grid northing.
    const double fromTop = (g.topNorthing - k * spacing) / g.metersPerPixelY;
    const int row = static_cast<int>(std::ceil(fromTop - 1e-9));
    if (row >= c.height()) continue;
    for (int col = 0; col < c.width(); ++col) mask.markRowBand(col, row, width);
  }
}

inline std::optional<LonLatPt> tryInverse(const UtmPt& p) {
  try {
    return projection::utmToLonLat(p);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

inline std::optional<UtmPt> tryForward(const LonLatPt& p, int zone) {
  try {
    return projection::lonLatToUtm(p, zone);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

inline void geoGrid(LineMask& mask, const Canvas& c, const PixelGeoref& g, double spacing,
                    int width) {
  const double midE = g.leftEasting + c.width() * g.metersPerPixelX / 2.0;
  const double midN = g.topNorthing - c.height() * g.metersPerPixelY / 2.0;
  // Meridians: one point per canvas row.
  for (int row = 0; row < c.height(); ++row) {
    const double n = g.topNorthing - (row + 0.5) * g.metersPerPixelY;
    const auto west = tryInverse({g.zone, g.leftEasting, n});
    const auto east = tryInverse({g.zone, g.leftEasting + c.width() * g.metersPerPixelX, n});
    if (!west || !east) continue;
    for (double k = std::ceil(west->lon / spacing); k * spacing <= east->lon; k += 1.0) {
      double e = midE;
      std::optional<UtmPt> p;
      for (int it = 0; it < 3; ++it) {
        const auto ll = tryInverse({g.zone, e, n});
        if (!ll) break;
        p = tryForward({k * spacing, ll->lat}, g.zone);
        if (!p) break;
        e = p->easting;
      }
      if (!p) continue;
      const int col = static_cast<int>(std::floor((e - g.leftEasting) / g.metersPerPixelX));
      mask.markColumnBand(col, row, width);
    }
  }
  // Parallels: one point per canvas column.
  for (int col = 0; col < c.width(); ++col) {
    const double e = g.leftEasting + (col + 0.5) * g.metersPerPixelX;
    const auto top = tryInverse({g.zone, e, g.topNorthing});
    const auto bottom = tryInverse({g.zone, e, g.topNorthing - c.height() * g.metersPerPixelY});
    if (!top || !bottom) continue;
    for (double k = std::ceil(bottom->lat / spacing); k * spacing <= top->lat; k += 1.0) {
      double n = midN;
      std::optional<UtmPt> p;
      for (int it = 0; it < 3; ++it) {
        const auto ll = tryInverse({g.zone, e, n});
        if (!ll) break;
        p = tryForward({ll->lon, k * spacing}, g.zone);
        if (!p) break;
        n = p->northing;
      }
      if (!p) continue;
      const int row = static_cast<int>(std::floor((g.topNorthing - n) / g.metersPerPixelY));
      mask.markRowBand(col, row, width);
    }
  }
}

}  // namespace mosaic_detail

/// Draws grid lines alpha-blended with style.gridColor. A zero grid width
/// or GridStyle::None leaves the canvas untouched.
inline void drawGrid(Canvas& canvas, const PixelGeoref& georef, const RenderStyle& style) {
  if (style.gridStyle == GridStyle::None || style.gridWidthPx <= 0 || canvas.empty()) return;
  mosaic_detail::LineMask mask(canvas.width(), canvas.height());
  if (style.gridStyle == GridStyle::UtmGrid) {
    const double spacing = style.gridSpacing.value_or(utmGridSpacingMeters(georef.metersPerPixelX));
    mosaic_detail::utmGrid(mask, canvas, georef, spacing, style.gridWidthPx);
  } else {
    const double spacing =
        style.gridSpacing.value_or(geoGridSpacingDegrees(georef.metersPerPixelX));
    mosaic_detail::geoGrid(mask, canvas, georef, spacing, style.gridWidthPx);
  }
  mask.apply(canvas, style.gridColor);
}

inline void drawGrid(Canvas& canvas, const AreaBoundingBox& abb, const RenderStyle& style) {
  drawGrid(canvas, georefFor(abb), style);
}

/// Frame of `widthPx` pixels along the canvas edges.
inline void drawBorder(Canvas& canvas, int widthPx, Argb color) {
  if (widthPx <= 0) return;
  for (int y = 0; y < canvas.height(); ++y) {
    for (int x = 0; x < canvas.width(); ++x) {
      if (x < widthPx || y < widthPx || x >= canvas.width() - widthPx ||
          y >= canvas.height() - widthPx) {
        canvas.blendAt(x, y, color);
      }
    }
  }
}

inline constexpr int kLogoWidth = 48;
inline constexpr int kLogoHeight = 24;
inline constexpr int kLogoMargin = 4;

/// Placeholder mark: a one-pixel frame around the letters "TS" at 2x size,
/// anchored at the bottom-right corner.
inline void drawLogo(Canvas& canvas, Argb color) {
  const int x0 = canvas.width() - kLogoMargin - kLogoWidth;
  const int y0 = canvas.height() - kLogoMargin - kLogoHeight;
  for (int x = 0; x < kLogoWidth; ++x) {
    canvas.blendAt(x0 + x, y0, color);
    canvas.blendAt(x0 + x, y0 + kLogoHeight - 1, color);
  }
  for (int y = 1; y < kLogoHeight - 1; ++y) {
    canvas.blendAt(x0, y0 + y, color);
    canvas.blendAt(x0 + kLogoWidth - 1, y0 + y, color);
  }
  const int tw = font::textWidth("TS", 2);
  font::drawText(canvas, "TS", x0 + (kLogoWidth - tw) / 2,
                 y0 + (kLogoHeight - font::kGlyphHeight * 2) / 2, color, 2);
}

inline void drawTileBoundaries(Canvas& canvas, const AreaBoundingBox& abb, Argb color) {
  const TileId start = abb.northWest.tileMeta.id;
  const int xOff = abb.northWest.offset.xOffset;
  const int yOff = abb.northWest.offset.yOffset;
  for (std::int64_t x = start.x; x <= abb.northEast.tileMeta.id.x; ++x) {
    const int col = static_cast<int>((x - start.x) * kTilePixels - xOff);
    for (int y = 0; y < canvas.height(); ++y) canvas.blendAt(col, y, color);
  }
  for (std::int64_t y = start.y; y >= abb.southWest.tileMeta.id.y; --y) {
    const int row = static_cast<int>((start.y - y) * kTilePixels - yOff);
    for (int x = 0; x < canvas.width(); ++x) canvas.blendAt(x, row, color);
  }
}

/// Grid, border, caption and logo, in that order.
inline void applyStyle(Canvas& canvas, const PixelGeoref& georef, const RenderStyle& style) {
  drawGrid(canvas, georef, style);
  drawBorder(canvas, style.borderWidthPx, style.borderColor);
  if (!style.caption.empty()) {
    font::drawText(canvas, style.caption, kLogoMargin + std::max(0, style.borderWidthPx),
                   canvas.height() - kLogoMargin - font::kGlyphHeight -
                       std::max(0, style.borderWidthPx),
                   style.fontColor);
  }
  if (style.logo) drawLogo(canvas, style.fontColor);
}

/// Bilinear resampling with pixel-center alignment: output pixel i samples
/// the source at (i + 0.5) * src / dst - 0.5, clamped to the edge.
inline Canvas rescale(const Canvas& src, int targetW, int targetH) {
  if (src.width() < 1 || src.height() < 1 || targetW < 1 || targetH < 1) {
    throw ValidationError("rescale needs non-empty source and target");
  }
  if (targetW == src.width() && targetH == src.height()) return src;
  Canvas out(targetW, targetH);
  const double sx = static_cast<double>(src.width()) / targetW;
  const double sy = static_cast<double>(src.height()) / targetH;
  for (int y = 0; y < targetH; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < targetW; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, src.width() - 1);
      const double wx = fx - x0;
      const Rgb a = src.at(x0, y0), b = src.at(x1, y0), c = src.at(x0, y1), d = src.at(x1, y1);
      auto mix = [&](std::uint8_t pa, std::uint8_t pb, std::uint8_t pc, std::uint8_t pd) {
        const double top = pa + (pb - pa) * wx;
        const double bot = pc + (pd - pc) * wx;
        return static_cast<std::uint8_t>(std::lround(top + (bot - top) * wy));
      };
      out.set(x, y, {mix(a.r, b.r, c.r, d.r), mix(a.g, b.g, c.g, d.g), mix(a.b, b.b, c.b, d.b)});
    }
  }
  return out;
}

inline constexpr Rgb kMessageBackground{255, 255, 255};
inline constexpr Argb kMessageInk{0xFF, 0x00, 0x00, 0x00};

/// White image of the given size with `message` word-wrapped in black from
/// the top-left, as used for in-image error reports.
inline Canvas renderMessageImage(const std::string& message, int width, int height) {
  Canvas c(width, height, kMessageBackground);
  const int margin = 2;
  const auto maxChars = static_cast<std::size_t>(
      std::max(1, (width - 2 * margin + 1) / font::kAdvance));
  int y = margin;
  for (const std::string& line : font::wrap(message, maxChars)) {
    font::drawText(c, line, margin, y, kMessageInk);
    y += font::kLineHeight;
  }
  return c;
}

}  // namespace terra
