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

// JSON shapes of the method endpoints. Field names follow the service's
// structure names (TileId, TileMeta, AreaBoundingBox, ...) in camelCase.

#include <optional>
#include <string>

#include <json.hpp>

#include "terra/error.hpp"
#include "terra/gazetteer.hpp"
#include "terra/geo.hpp"
#include "terra/types.hpp"

namespace terra {

/// Response header carrying the error code of a failed image request.
inline constexpr const char* kErrorHeader = "X-Service-Error";

inline constexpr const char* kUnknownDate = "unknown";

enum class ErrorCode { Validation, NotFound, Domain, Internal };

inline std::string_view errorCodeName(ErrorCode c) {
  switch (c) {
    case ErrorCode::Validation: return "validation";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

inline ErrorCode errorCodeFromName(std::string_view s) {
  if (s == "validation") return ErrorCode::Validation;
  if (s == "not_found") return ErrorCode::NotFound;
  if (s == "domain") return ErrorCode::Domain;
  return ErrorCode::Internal;
}

inline int httpStatusFor(ErrorCode c) {
  switch (c) {
    case ErrorCode::Validation: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Domain: return 422;
    case ErrorCode::Internal: return 500;
  }
  return 500;
}

/// Transport-neutral error reported by the service.
class ServiceError : public Error {
 public:
  ServiceError(ErrorCode code, const std::string& message, std::string parameter = {})
      : Error(message), code_(code), parameter_(std::move(parameter)) {}
  ErrorCode code() const noexcept { return code_; }
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  ErrorCode code_;
  std::string parameter_;
};

inline void to_json(nlohmann::json& j, const TileId& id) {
  j = {{"theme", static_cast<int>(id.theme)},
       {"scale", id.scale.code},
       {"scene", id.scene.zone},
       {"x", id.x},
       {"y", id.y}};
}

inline void from_json(const nlohmann::json& j, TileId& id) {
  id.theme = static_cast<Theme>(j.at("theme").get<int>());
  id.scale = Scale{j.at("scale").get<int>()};
  id.scene = Scene{j.at("scene").get<int>()};
  id.x = j.at("x").get<std::int64_t>();
  id.y = j.at("y").get<std::int64_t>();
}

inline void to_json(nlohmann::json& j, const LonLatPt& p) { j = {{"lon", p.lon}, {"lat", p.lat}}; }

inline void from_json(const nlohmann::json& j, LonLatPt& p) {
  p.lon = j.at("lon").get<double>();
  p.lat = j.at("lat").get<double>();
}

/// TileMeta plus derived context: UTM extent, resolution, and the ids of
/// the adjacent tiles (the X +/- 1, Y +/- 1 arithmetic done for the client).
inline void to_json(nlohmann::json& j, const TileMeta& m) {
  const UtmRect r = tileExtent(m.id);
  nlohmann::json neighbors = nlohmann::json::object();
  static constexpr struct {
    const char* name;
    int dx, dy;
  } kAdjacent[] = {{"N", 0, 1},  {"NE", 1, 1},  {"E", 1, 0},  {"SE", 1, -1},
                   {"S", 0, -1}, {"SW", -1, -1}, {"W", -1, 0}, {"NW", -1, 1}};
  for (const auto& a : kAdjacent) {
    if (m.id.x + a.dx >= 0 && m.id.y + a.dy >= 0) neighbors[a.name] = neighbor(m.id, a.dx, a.dy);
  }
  j = {{"id", m.id},
       {"captureDate", m.captureDate ? *m.captureDate : std::string(kUnknownDate)},
       {"metersPerPixel", metersPerPixel(m.id.scale)},
       {"tilePixels", kTilePixels},
       {"utmExtent",
        {{"zone", r.zone},
         {"minEasting", r.minEasting},
         {"minNorthing", r.minNorthing},
         {"maxEasting", r.maxEasting},
         {"maxNorthing", r.maxNorthing}}},
       {"nw", m.nw},
       {"ne", m.ne},
       {"sw", m.sw},
       {"se", m.se},
       {"center", m.center},
       {"neighbors", neighbors}};
  if (const auto parent = parentTile(m.id)) j["parent"] = *parent;
  const auto children = childTiles(m.id);
  if (!children.empty()) j["children"] = children;
}

inline void from_json(const nlohmann::json& j, TileMeta& m) {
  m.id = j.at("id").get<TileId>();
  const auto date = j.at("captureDate").get<std::string>();
  m.captureDate = date == kUnknownDate ? std::nullopt : std::optional<std::string>(date);
  m.nw = j.at("nw").get<LonLatPt>();
  m.ne = j.at("ne").get<LonLatPt>();
  m.sw = j.at("sw").get<LonLatPt>();
  m.se = j.at("se").get<LonLatPt>();
  m.center = j.at("center").get<LonLatPt>();
}

inline void to_json(nlohmann::json& j, const LonLatPtOffset& o) {
  j = {{"point", o.point}, {"xOffset", o.xOffset}, {"yOffset", o.yOffset}};
}

inline void from_json(const nlohmann::json& j, LonLatPtOffset& o) {
  o.point = j.at("point").get<LonLatPt>();
  o.xOffset = j.at("xOffset").get<int>();
  o.yOffset = j.at("yOffset").get<int>();
}

inline void to_json(nlohmann::json& j, const AreaCoordinate& a) {
  j = {{"tileMeta", a.tileMeta}, {"offset", a.offset}};
}

inline void from_json(const nlohmann::json& j, AreaCoordinate& a) {
  a.tileMeta = j.at("tileMeta").get<TileMeta>();
  a.offset = j.at("offset").get<LonLatPtOffset>();
}

inline void to_json(nlohmann::json& j, const NearestPlace& n) {
  j = {{"name", n.name},
       {"distanceMeters", n.distanceMeters},
       {"direction", std::string(compassToken(n.direction))}};
}

inline void from_json(const nlohmann::json& j, NearestPlace& n) {
  n.name = j.at("name").get<std::string>();
  n.distanceMeters = j.at("distanceMeters").get<double>();
  n.direction = compassFromToken(j.at("direction").get<std::string>()).value_or(Compass::N);
}

inline void to_json(nlohmann::json& j, const AreaBoundingBox& abb) {
  j = {{"northWest", abb.northWest},
       {"northEast", abb.northEast},
       {"southWest", abb.southWest},
       {"southEast", abb.southEast},
       {"center", abb.center},
       {"nearestPlace", abb.nearestPlace ? nlohmann::json(*abb.nearestPlace) : nlohmann::json()}};
}

inline void from_json(const nlohmann::json& j, AreaBoundingBox& abb) {
  abb.northWest = j.at("northWest").get<AreaCoordinate>();
  abb.northEast = j.at("northEast").get<AreaCoordinate>();
  abb.southWest = j.at("southWest").get<AreaCoordinate>();
  abb.southEast = j.at("southEast").get<AreaCoordinate>();
  abb.center = j.at("center").get<AreaCoordinate>();
  if (j.contains("nearestPlace") && !j["nearestPlace"].is_null()) {
    abb.nearestPlace = j["nearestPlace"].get<NearestPlace>();
  } else {
    abb.nearestPlace.reset();
  }
}

inline void to_json(nlohmann::json& j, const Place& p) {
  j = {{"city", p.city}, {"state", p.state}, {"country", p.country}};
}

inline void from_json(const nlohmann::json& j, Place& p) {
  p.city = j.value("city", "");
  p.state = j.value("state", "");
  p.country = j.value("country", "");
}

inline void to_json(nlohmann::json& j, const PlaceFacts& pf) {
  j = {{"place", pf.place},
       {"center", pf.center},
       {"placeType", std::string(placeTypeName(pf.placeType))},
       {"population", pf.population ? nlohmann::json(*pf.population) : nlohmann::json()}};
}

inline void from_json(const nlohmann::json& j, PlaceFacts& pf) {
  pf.place = j.at("place").get<Place>();
  pf.center = j.at("center").get<LonLatPt>();
  pf.placeType = placeTypeFromName(j.at("placeType").get<std::string>()).value_or(PlaceType::Other);
  if (j.contains("population") && !j["population"].is_null()) {
    pf.population = j["population"].get<std::int64_t>();
  } else {
    pf.population.reset();
  }
}

inline nlohmann::json errorJson(ErrorCode code, const std::string& message,
                                const std::string& parameter) {
  nlohmann::json e = {{"code", std::string(errorCodeName(code))}, {"message", message}};
  if (!parameter.empty()) e["parameter"] = parameter;
  return {{"error", e}};
}

}  // namespace terra
