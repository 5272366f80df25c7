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

// Place-name index. Source files are tab-separated:
//
//   name <TAB> state <TAB> country <TAB> lon <TAB> lat <TAB> type [<TAB> population]
//
// Blank lines and lines starting with '#' are ignored. type is one of
// city, landmark, park, water, other.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "terra/error.hpp"
#include "terra/types.hpp"

namespace terra {

inline constexpr double kEarthRadiusMeters = 6371008.8;

inline std::string_view compassToken(Compass c) {
  static constexpr std::string_view kTokens[] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  return kTokens[static_cast<int>(c)];
}

inline std::optional<Compass> compassFromToken(std::string_view s) {
  static constexpr std::string_view kTokens[] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  for (int i = 0; i < 8; ++i) {
    if (kTokens[i] == s) return static_cast<Compass>(i);
  }
  return std::nullopt;
}

inline std::string_view placeTypeName(PlaceType t) {
  switch (t) {
    case PlaceType::City: return "city";
    case PlaceType::Landmark: return "landmark";
    case PlaceType::Park: return "park";
    case PlaceType::Water: return "water";
    case PlaceType::Other: return "other";
  }
  return "other";
}

inline std::optional<PlaceType> placeTypeFromName(std::string_view s) {
  for (PlaceType t : {PlaceType::City, PlaceType::Landmark, PlaceType::Park, PlaceType::Water,
                      PlaceType::Other}) {
    if (placeTypeName(t) == s) return t;
  }
  return std::nullopt;
}

/// Great-circle distance on a sphere of radius 6371008.8 m (haversine).
inline double greatCircleMeters(const LonLatPt& a, const LonLatPt& b) {
  constexpr double k = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * k;
  const double dlon = (b.lon - a.lon) * k;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * k) * std::cos(b.lat * k) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Initial bearing from `from` to `to`, degrees clockwise from north in [0, 360).
inline double initialBearing(const LonLatPt& from, const LonLatPt& to) {
  constexpr double k = std::numbers::pi / 180.0;
  const double dlon = (to.lon - from.lon) * k;
  const double y = std::sin(dlon) * std::cos(to.lat * k);
  const double x = std::cos(from.lat * k) * std::sin(to.lat * k) -
                   std::sin(from.lat * k) * std::cos(to.lat * k) * std::cos(dlon);
  const double deg = std::atan2(y, x) / k;
  return deg < 0 ? deg + 360.0 : deg;
}

/// 45-degree sectors centered on N, NE, E, ...
inline Compass compassFor(double bearingDeg) {
  const int sector = static_cast<int>(std::floor((bearingDeg + 22.5) / 45.0)) % 8;
  return static_cast<Compass>(sector < 0 ? sector + 8 : sector);
}

struct LoadReport {
  std::size_t loaded = 0;
  std::vector<std::string> diagnostics;
};

inline bool equalsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

inline bool isNearestEligible(PlaceType t) {
  return t == PlaceType::City || t == PlaceType::Landmark;
}

class Gazetteer {
 public:
  LoadReport loadFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read gazetteer file " + path.filename().string());
    std::stringstream buf;
    buf << in.rdbuf();
    return loadText(buf.str());
  }

  /// Parses the tabular text and atomically replaces the current index.
  LoadReport loadText(std::string_view text) {
    auto places = std::make_shared<std::vector<PlaceFacts>>();
    LoadReport report;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++lineNo;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty() || line.front() == '#') {
        if (end == text.size()) break;
        continue;
      }
      std::string error;
      if (auto pf = parseRow(line, error)) {
        places->push_back(std::move(*pf));
      } else {
        report.diagnostics.push_back("row " + std::to_string(lineNo) + ": " + error);
      }
      if (end == text.size()) break;
    }
    if (places->empty()) {
      throw ValidationError("gazetteer source has no valid rows");
    }
    std::sort(places->begin(), places->end(), byNameThenState);
    report.loaded = places->size();
    std::lock_guard lock(mutex_);
    places_ = std::move(places);
    return report;
  }

  std::size_t size() const { return snapshot()->size(); }

  /// Case-insensitive exact match on each non-blank field. Surrounding
  /// whitespace is ignored, so an all-space field is a wildcard.
  std::vector<PlaceFacts> getPlaceFacts(const Place& raw) const {
    const Place query{trim(raw.city), trim(raw.state), trim(raw.country)};
    if (query.city.empty() && query.state.empty() && query.country.empty()) {
      throw ValidationError("place query needs at least one non-blank field", "city");
    }
    std::vector<PlaceFacts> out;
    for (const PlaceFacts& pf : *snapshot()) {
      if ((query.city.empty() || equalsIgnoreCase(query.city, pf.place.city)) &&
          (query.state.empty() || equalsIgnoreCase(query.state, pf.place.state)) &&
          (query.country.empty() || equalsIgnoreCase(query.country, pf.place.country))) {
        out.push_back(pf);
      }
    }
    return out;
  }

  /// Places whose center lies in the closed rectangle, most populous
  /// first (unknown population last), then by name.
  std::vector<PlaceFacts> getPlaceList(const LonLatPt& upperLeft, const LonLatPt& lowerRight,
                                       int maxItems) const {
    if (!(upperLeft.lat > lowerRight.lat)) {
      throw ValidationError("upper-left latitude must exceed lower-right latitude", "upperLeft");
    }
    if (!(upperLeft.lon < lowerRight.lon)) {
      throw ValidationError("upper-left longitude must be west of lower-right", "upperLeft");
    }
    if (maxItems < 1) throw ValidationError("maxItems must be at least 1", "maxItems");
    std::vector<PlaceFacts> out;
    for (const PlaceFacts& pf : *snapshot()) {
      if (pf.center.lat <= upperLeft.lat && pf.center.lat >= lowerRight.lat &&
          pf.center.lon >= upperLeft.lon && pf.center.lon <= lowerRight.lon) {
        out.push_back(pf);
      }
    }
    std::stable_sort(out.begin(), out.end(), [](const PlaceFacts& a, const PlaceFacts& b) {
      const std::int64_t pa = a.population.value_or(-1), pb = b.population.value_or(-1);
      if (pa != pb) return pa > pb;
      return byNameThenState(a, b);
    });
    if (out.size() > static_cast<std::size_t>(maxItems)) out.resize(static_cast<std::size_t>(maxItems));
    return out;
  }

  /// Nearest city or landmark by great-circle distance; the direction is
  /// read from the place toward `p`.
  NearestPlace nearestPlace(const LonLatPt& p) const {
    const auto places = snapshot();
    const PlaceFacts* best = nullptr;
    double bestDist = 0.0;
    for (const PlaceFacts& pf : *places) {
      if (!isNearestEligible(pf.placeType)) continue;
      const double d = greatCircleMeters(pf.center, p);
      if (!best || d < bestDist || (d == bestDist && byNameThenState(pf, *best))) {
        best = &pf;
        bestDist = d;
      }
    }
    if (!best) throw StateError("gazetteer has no cities or landmarks");
    NearestPlace np;
    np.name = best->place.city;
    np.distanceMeters = bestDist;
    np.direction = bestDist == 0.0 ? Compass::N : compassFor(initialBearing(best->center, p));
    return np;
  }

  std::vector<PlaceFacts> all() const { return *snapshot(); }

 private:
  static std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
  }

  static bool byNameThenState(const PlaceFacts& a, const PlaceFacts& b) {
    if (a.place.city != b.place.city) return a.place.city < b.place.city;
    return a.place.state < b.place.state;
  }

  static std::optional<double> parseDouble(std::string_view s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  }

  static std::optional<PlaceFacts> parseRow(std::string_view line, std::string& error) {
    std::vector<std::string_view> cols;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.find('\t', pos);
      cols.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (cols.size() < 6 || cols.size() > 7) {
      error = "expected 6 or 7 tab-separated fields, got " + std::to_string(cols.size());
      return std::nullopt;
    }
    PlaceFacts pf;
    pf.place = {std::string(cols[0]), std::string(cols[1]), std::string(cols[2])};
    if (pf.place.city.empty()) {
      error = "name is blank";
      return std::nullopt;
    }
    const auto lon = parseDouble(cols[3]);
    const auto lat = parseDouble(cols[4]);
    if (!lon || *lon < -180.0 || *lon >= 180.0) {
      error = "longitude '" + std::string(cols[3]) + "' outside [-180, 180)";
      return std::nullopt;
    }
    if (!lat || *lat <= -90.0 || *lat >= 90.0) {
      error = "latitude '" + std::string(cols[4]) + "' outside (-90, 90)";
      return std::nullopt;
    }
    pf.center = {*lon, *lat};
    const auto type = placeTypeFromName(cols[5]);
    if (!type) {
      error = "unknown place type '" + std::string(cols[5]) + "'";
      return std::nullopt;
    }
    pf.placeType = *type;
    if (cols.size() == 7 && !cols[6].empty()) {
      std::int64_t pop = 0;
      auto [ptr, ec] = std::from_chars(cols[6].data(), cols[6].data() + cols[6].size(), pop);
      if (ec != std::errc{} || ptr != cols[6].data() + cols[6].size() || pop < 0) {
        error = "population '" + std::string(cols[6]) + "' is not a non-negative integer";
        return std::nullopt;
      }
      pf.population = pop;
    }
    return pf;
  }

  std::shared_ptr<const std::vector<PlaceFacts>> snapshot() const {
    std::lock_guard lock(mutex_);
    if (!places_) throw StateError("gazetteer is empty");
    return places_;
  }

  mutable std::mutex mutex_;
  std::shared_ptr<const std::vector<PlaceFacts>> places_;
};

}  // namespace terra
