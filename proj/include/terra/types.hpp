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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace terra {

/// Imagery theme. The numeric values are the wire codes.
enum class Theme : int { Doq = 1, Drg = 2 };

/// Power-of-two resolution level: code 10 is 1 m/px, each step doubles.
struct Scale {
  int code = 10;
  friend auto operator<=>(const Scale&, const Scale&) = default;
};

/// A UTM zone; the mosaic of one zone is a "scene".
struct Scene {
  int zone = 10;
  friend auto operator<=>(const Scene&, const Scene&) = default;
};

inline constexpr int kTilePixels = 200;
inline constexpr int kMinScaleCode = 8;
inline constexpr int kMaxScaleCode = 24;
inline constexpr int kMinServedZone = 3;
inline constexpr int kMaxServedZone = 20;

/// Primary key of one 200x200 tile. x grows eastward from easting 0,
/// y grows northward from the equator.
struct TileId {
  Theme theme = Theme::Doq;
  Scale scale;
  Scene scene;
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const TileId&, const TileId&) = default;
};

struct UtmPt {
  int zone = 0;
  double easting = 0.0;
  double northing = 0.0;
};

struct LonLatPt {
  double lon = 0.0;
  double lat = 0.0;
  friend bool operator==(const LonLatPt&, const LonLatPt&) = default;
};

/// Half-open rectangle [minEasting, maxEasting) x [minNorthing, maxNorthing).
struct UtmRect {
  int zone = 0;
  double minEasting = 0.0;
  double minNorthing = 0.0;
  double maxEasting = 0.0;
  double maxNorthing = 0.0;

  UtmPt midpoint() const {
    return {zone, (minEasting + maxEasting) / 2.0, (minNorthing + maxNorthing) / 2.0};
  }
  bool contains(const UtmPt& p) const {
    return p.zone == zone && p.easting >= minEasting && p.easting < maxEasting &&
           p.northing >= minNorthing && p.northing < maxNorthing;
  }
};

struct TileMeta {
  TileId id;
  LonLatPt nw, ne, sw, se, center;
  /// ISO date (YYYY-MM-DD); empty when the capture date is unknown.
  std::optional<std::string> captureDate;
};

/// Position of a corner or center pixel inside its tile, counted from the
/// tile's top-left pixel.
struct LonLatPtOffset {
  LonLatPt point;
  int xOffset = 0;
  int yOffset = 0;
};

struct AreaCoordinate {
  TileMeta tileMeta;
  LonLatPtOffset offset;
};

enum class Compass { N, NE, E, SE, S, SW, W, NW };

struct NearestPlace {
  std::string name;
  double distanceMeters = 0.0;
  Compass direction = Compass::N;
};

struct AreaBoundingBox {
  AreaCoordinate northWest, northEast, southWest, southEast, center;
  std::optional<NearestPlace> nearestPlace;
};

/// Gazetteer query; a blank field matches anything.
struct Place {
  std::string city;
  std::string state;
  std::string country;
};

enum class PlaceType { City, Landmark, Park, Water, Other };

struct PlaceFacts {
  Place place;
  LonLatPt center;
  PlaceType placeType = PlaceType::City;
  std::optional<std::int64_t> population;
};

}  // namespace terra
