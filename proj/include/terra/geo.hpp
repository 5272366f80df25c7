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

// Tile-grid geometry: the scale ladder, tile extents, adjacency and the
// AreaBoundingBox that describes how to cut an image out of the grid.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "terra/error.hpp"
#include "terra/projection.hpp"
#include "terra/types.hpp"

namespace terra {

template <class P>
concept Projector = requires(const P& p, LonLatPt ll, UtmPt utm, std::optional<int> zone) {
  { p.toUtm(ll, zone) } -> std::same_as<UtmPt>;
  { p.toLonLat(utm) } -> std::same_as<LonLatPt>;
};

inline bool isValidTheme(int code) { return code == 1 || code == 2; }

inline std::string themeName(Theme t) { return t == Theme::Doq ? "DOQ" : "DRG"; }

inline double metersPerPixel(Scale scale) {
  if (scale.code < kMinScaleCode || scale.code > kMaxScaleCode) {
    throw DomainError("scale " + std::to_string(scale.code) + " outside [8, 24]", "scale");
  }
  return std::ldexp(1.0, scale.code - 10);
}

/// Ground span of one tile edge in meters.
inline double tileSpan(Scale scale) { return kTilePixels * metersPerPixel(scale); }

inline bool isServedZone(int zone) { return zone >= kMinServedZone && zone <= kMaxServedZone; }

/// Throws ValidationError naming the first offending field.
inline void validate(const TileId& id) {
  if (!isValidTheme(static_cast<int>(id.theme))) {
    throw ValidationError("theme must be 1 (DOQ) or 2 (DRG)", "theme");
  }
  if (id.scale.code < kMinScaleCode || id.scale.code > kMaxScaleCode) {
    throw ValidationError("scale " + std::to_string(id.scale.code) + " outside [8, 24]", "scale");
  }
  if (id.scene.zone < 1 || id.scene.zone > 60) {
    throw ValidationError("scene " + std::to_string(id.scene.zone) + " outside [1, 60]", "scene");
  }
  if (id.x < 0) throw ValidationError("x must be non-negative", "x");
  if (id.y < 0) throw ValidationError("y must be non-negative", "y");
}

inline UtmRect tileExtent(const TileId& id) {
  validate(id);
  const double span = tileSpan(id.scale);
  return {id.scene.zone, static_cast<double>(id.x) * span, static_cast<double>(id.y) * span,
          static_cast<double>(id.x + 1) * span, static_cast<double>(id.y + 1) * span};
}

inline TileId tileForUtm(Theme theme, Scale scale, const UtmPt& p) {
  if (!(p.easting >= 0.0) || !(p.northing >= 0.0)) {
    throw DomainError("UTM coordinates must be non-negative");
  }
  const double span = tileSpan(scale);
  TileId id{theme, scale, Scene{p.zone},
            static_cast<std::int64_t>(std::floor(p.easting / span)),
            static_cast<std::int64_t>(std::floor(p.northing / span))};
  validate(id);
  return id;
}

inline TileId neighbor(const TileId& id, std::int64_t dx, std::int64_t dy) {
  TileId out = id;
  out.x += dx;
  out.y += dy;
  if (out.x < 0 || out.y < 0) {
    throw DomainError("neighbor index would be negative");
  }
  return out;
}

/// The tile one level coarser that covers `id`; empty at the coarsest code.
inline std::optional<TileId> parentTile(const TileId& id) {
  if (id.scale.code >= kMaxScaleCode) return std::nullopt;
  return TileId{id.theme, Scale{id.scale.code + 1}, id.scene, id.x / 2, id.y / 2};
}

/// The four tiles one level finer that `id` covers, in SW, SE, NW, NE order;
/// empty at the finest code.
inline std::vector<TileId> childTiles(const TileId& id) {
  if (id.scale.code <= kMinScaleCode) return {};
  std::vector<TileId> out;
  for (std::int64_t dy = 0; dy < 2; ++dy) {
    for (std::int64_t dx = 0; dx < 2; ++dx) {
      out.push_back(TileId{id.theme, Scale{id.scale.code - 1}, id.scene, id.x * 2 + dx, id.y * 2 + dy});
    }
  }
  return out;
}

/// Tile metadata computed from geometry alone; captureDate is left unknown.
template <Projector P = projection::Nad83Utm>
TileMeta tileMetaGeometry(const TileId& id, const P& proj = {}) {
  const UtmRect r = tileExtent(id);
  const int z = r.zone;
  TileMeta meta;
  meta.id = id;
  meta.nw = proj.toLonLat({z, r.minEasting, r.maxNorthing});
  meta.ne = proj.toLonLat({z, r.maxEasting, r.maxNorthing});
  meta.sw = proj.toLonLat({z, r.minEasting, r.minNorthing});
  meta.se = proj.toLonLat({z, r.maxEasting, r.minNorthing});
  meta.center = proj.toLonLat(r.midpoint());
  return meta;
}

/// Pixel-space placement of an image on the tile grid.
///
/// Pixel (col, row) of the image has its center at
///   easting  = leftEasting + (col + 0.5) * r
///   northing = topNorthing - (row + 0.5) * r
/// and belongs to whichever tile contains that center.
struct PixelGeoref {
  int zone = 0;
  double leftEasting = 0.0;
  double topNorthing = 0.0;
  double metersPerPixelX = 1.0;
  double metersPerPixelY = 1.0;

  UtmPt pixelCenter(double col, double row) const {
    return {zone, leftEasting + (col + 0.5) * metersPerPixelX,
            topNorthing - (row + 0.5) * metersPerPixelY};
  }
};

struct PixelInTile {
  std::int64_t x = 0;
  std::int64_t y = 0;
  int col = 0;  // from the tile's left edge
  int row = 0;  // from the tile's top edge
};

/// Classifies one image pixel. Works in pixel units at the tile scale so
/// that images aligned to the pixel grid produce exact integer offsets.
inline PixelInTile locatePixel(double centerEastingPx, double centerNorthingPx, int col, int row,
                               int widthPx, int heightPx) {
  const double pe = centerEastingPx - widthPx / 2.0 + col + 0.5;
  const double pn = centerNorthingPx + heightPx / 2.0 - row - 0.5;
  PixelInTile out;
  out.x = static_cast<std::int64_t>(std::floor(pe / kTilePixels));
  out.y = static_cast<std::int64_t>(std::floor(pn / kTilePixels));
  out.col = static_cast<int>(std::floor(pe - static_cast<double>(out.x) * kTilePixels));
  out.row = kTilePixels - 1 -
            static_cast<int>(std::floor(pn - static_cast<double>(out.y) * kTilePixels));
  return out;
}

/// Builds the AreaBoundingBox for an image centered on a UTM point. No
/// bounds are applied to the image size beyond being positive; the
/// wire-facing getAreaFromPt enforces the 50..2000 range.
template <Projector P = projection::Nad83Utm>
AreaBoundingBox areaFromUtm(const UtmPt& center, Theme theme, Scale scale, int widthPx,
                            int heightPx, const P& proj = {}) {
  if (widthPx < 1 || heightPx < 1) throw ValidationError("image size must be positive");
  if (!isServedZone(center.zone)) {
    throw DomainError("zone " + std::to_string(center.zone) + " is not served (3..20)", "zone");
  }
  const double r = metersPerPixel(scale);
  const double cePx = center.easting / r;
  const double cnPx = center.northing / r;
  const double left = center.easting - widthPx * r / 2.0;
  const double top = center.northing + heightPx * r / 2.0;
  if (left < 0.0 || top - heightPx * r < 0.0) {
    throw DomainError("image extends to negative UTM coordinates");
  }

  auto coordinate = [&](int col, int row) {
    const PixelInTile loc = locatePixel(cePx, cnPx, col, row, widthPx, heightPx);
    AreaCoordinate ac;
    ac.tileMeta = tileMetaGeometry(TileId{theme, scale, Scene{center.zone}, loc.x, loc.y}, proj);
    ac.offset.xOffset = loc.col;
    ac.offset.yOffset = loc.row;
    ac.offset.point = proj.toLonLat(
        {center.zone, left + (col + 0.5) * r, top - (row + 0.5) * r});
    return ac;
  };

  AreaBoundingBox abb;
  abb.northWest = coordinate(0, 0);
  abb.northEast = coordinate(widthPx - 1, 0);
  abb.southWest = coordinate(0, heightPx - 1);
  abb.southEast = coordinate(widthPx - 1, heightPx - 1);
  abb.center = coordinate(widthPx / 2, heightPx / 2);
  return abb;
}

inline constexpr int kMinImagePixels = 50;
inline constexpr int kMaxImagePixels = 2000;

inline void validateImageSize(int widthPx, int heightPx) {
  if (widthPx < kMinImagePixels || widthPx > kMaxImagePixels) {
    throw ValidationError("width " + std::to_string(widthPx) + " outside [50, 2000]", "width");
  }
  if (heightPx < kMinImagePixels || heightPx > kMaxImagePixels) {
    throw ValidationError("height " + std::to_string(heightPx) + " outside [50, 2000]", "height");
  }
}

template <Projector P = projection::Nad83Utm>
AreaBoundingBox getAreaFromPt(const LonLatPt& center, Theme theme, Scale scale, int widthPx,
                              int heightPx, const P& proj = {}) {
  validateImageSize(widthPx, heightPx);
  const int zone = projection::utmZoneForLongitude(center.lon);
  if (!isServedZone(zone)) {
    throw DomainError("longitude " + std::to_string(center.lon) + " falls in unserved zone " +
                          std::to_string(zone),
                      "lon");
  }
  return areaFromUtm(proj.toUtm(center, zone), theme, scale, widthPx, heightPx, proj);
}

/// Georeference of the canvas composed from an AreaBoundingBox: canvas
/// pixel (0,0) is pixel (xOffset, yOffset) of the north-west tile.
inline PixelGeoref georefFor(const AreaBoundingBox& abb) {
  const TileId& nw = abb.northWest.tileMeta.id;
  const double r = metersPerPixel(nw.scale);
  const double span = kTilePixels * r;
  PixelGeoref g;
  g.zone = nw.scene.zone;
  g.leftEasting = static_cast<double>(nw.x) * span + abb.northWest.offset.xOffset * r;
  g.topNorthing = static_cast<double>(nw.y + 1) * span - abb.northWest.offset.yOffset * r;
  g.metersPerPixelX = r;
  g.metersPerPixelY = r;
  return g;
}

}  // namespace terra
