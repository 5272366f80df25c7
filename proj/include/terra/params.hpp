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

// Query-parameter access with case-insensitive names, and the typed
// requests of the two map endpoints.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "terra/error.hpp"
#include "terra/gazetteer.hpp"
#include "terra/geo.hpp"
#include "terra/image.hpp"
#include "terra/mosaic.hpp"

namespace terra {

struct CaseInsensitiveLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
      return std::tolower(static_cast<unsigned char>(x)) < std::tolower(static_cast<unsigned char>(y));
    });
  }
};

using Params = std::map<std::string, std::string, CaseInsensitiveLess>;

inline std::optional<std::string> param(const Params& p, std::string_view name) {
  auto it = p.find(name);
  if (it == p.end()) return std::nullopt;
  return it->second;
}

inline std::string requireParam(const Params& p, std::string_view name) {
  auto v = param(p, name);
  if (!v || v->empty()) {
    throw ValidationError("missing parameter " + std::string(name), std::string(name));
  }
  return *v;
}

inline std::optional<long long> parseInteger(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parseNumber(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

inline long long intParam(const Params& p, std::string_view name, long long lo, long long hi) {
  const std::string raw = requireParam(p, name);
  const auto v = parseInteger(raw);
  if (!v) throw ValidationError(std::string(name) + " must be an integer", std::string(name));
  if (*v < lo || *v > hi) {
    throw ValidationError(std::string(name) + " " + raw + " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]",
                          std::string(name));
  }
  return *v;
}

inline long long intParamOr(const Params& p, std::string_view name, long long lo, long long hi,
                            long long fallback) {
  auto v = param(p, name);
  if (!v || v->empty()) return fallback;
  return intParam(p, name, lo, hi);
}

inline double numberParam(const Params& p, std::string_view name) {
  const std::string raw = requireParam(p, name);
  const auto v = parseNumber(raw);
  if (!v) throw ValidationError(std::string(name) + " must be a number", std::string(name));
  return *v;
}

inline bool iequals(std::string_view a, std::string_view b) { return equalsIgnoreCase(a, b); }

/// Wire-level scale band for every endpoint.
inline constexpr int kMinWireScale = 10;
inline constexpr int kMaxWireScale = 16;

inline Theme themeParam(const Params& p, std::string_view name) {
  return static_cast<Theme>(intParam(p, name, 1, 2));
}

inline Scale scaleParam(const Params& p, std::string_view name) {
  return Scale{static_cast<int>(intParam(p, name, kMinWireScale, kMaxWireScale))};
}

inline LonLatPt lonLatParams(const Params& p, std::string_view lonName, std::string_view latName) {
  const double lon = numberParam(p, lonName);
  const double lat = numberParam(p, latName);
  if (lon < -180.0 || lon >= 180.0) {
    throw ValidationError(std::string(lonName) + " outside [-180, 180)", std::string(lonName));
  }
  if (lat <= -90.0 || lat >= 90.0) {
    throw ValidationError(std::string(latName) + " outside (-90, 90)", std::string(latName));
  }
  return {lon, lat};
}

/// Parameters of the TerraService map endpoint (GetImageArea).
struct ImageAreaRequest {
  Theme theme = Theme::Doq;
  Scale scale{10};
  LonLatPt center;
  int width = 0;
  int height = 0;
  RenderStyle style;

  static ImageAreaRequest parse(const Params& p) {
    ImageAreaRequest r;
    r.theme = themeParam(p, "T");
    r.scale = scaleParam(p, "S");
    r.center = lonLatParams(p, "Lon", "Lat");
    r.width = static_cast<int>(intParam(p, "W", kMinImagePixels, kMaxImagePixels));
    r.height = static_cast<int>(intParam(p, "H", kMinImagePixels, kMaxImagePixels));
    if (auto f = param(p, "F"); f && !f->empty()) r.style.fontName = *f;
    if (auto v = param(p, "FC"); v && !v->empty()) r.style.fontColor = Argb::parse(*v, "FC");
    r.style.gridWidthPx = static_cast<int>(intParamOr(p, "G", 0, 100, 0));
    r.style.gridStyle = r.style.gridWidthPx > 0 ? GridStyle::UtmGrid : GridStyle::None;
    if (auto v = param(p, "GC"); v && !v->empty()) r.style.gridColor = Argb::parse(*v, "GC");
    r.style.borderWidthPx = static_cast<int>(intParamOr(p, "B", 0, 100, 0));
    if (auto v = param(p, "BC"); v && !v->empty()) r.style.borderColor = Argb::parse(*v, "BC");
    r.style.logo = intParamOr(p, "LOGO", 0, 1, 0) == 1;
    return r;
  }
};

enum class ExceptionStyle { Xml, Blank, InImage };

inline ExceptionStyle exceptionStyleParam(const Params& p) {
  auto v = param(p, "Exceptions");
  if (!v) return ExceptionStyle::Xml;
  std::string_view s = *v;
  if (s.starts_with("application/vnd.ogc.")) s.remove_prefix(20);
  if (iequals(s, "se_blank")) return ExceptionStyle::Blank;
  if (iequals(s, "se_inimage")) return ExceptionStyle::InImage;
  return ExceptionStyle::Xml;
}

enum class WmsRequestKind { GetMap, GetCapabilities };

/// Parameters of the OGC WMS 1.1.1 endpoint.
struct OgcMapRequest {
  std::string version;
  WmsRequestKind request = WmsRequestKind::GetMap;
  Theme layer = Theme::Doq;
  GridStyle styles = GridStyle::None;
  int zone = 0;
  UtmRect bbox;
  int width = 0;
  int height = 0;
  std::string format = "image/jpeg";
  ExceptionStyle exceptions = ExceptionStyle::Xml;

  static WmsRequestKind parseRequestKind(const Params& p) {
    const std::string req = requireParam(p, "Request");
    if (iequals(req, "GetMap") || iequals(req, "map")) return WmsRequestKind::GetMap;
    if (iequals(req, "GetCapabilities") || iequals(req, "capabilities")) {
      return WmsRequestKind::GetCapabilities;
    }
    throw ValidationError("Request must be GetMap or GetCapabilities", "Request");
  }

  static void requireVersion(const Params& p) {
    if (requireParam(p, "Version") != "1.1.1") {
      throw ValidationError("Version must be 1.1.1", "Version");
    }
  }

  static void requireService(const Params& p, bool required) {
    auto s = param(p, "Service");
    if (!s || s->empty()) {
      if (required) throw ValidationError("missing parameter Service", "Service");
      return;
    }
    if (!iequals(*s, "wms")) throw ValidationError("Service must be WMS", "Service");
  }

  static int parseSrs(const std::string& srs) {
    constexpr std::string_view kPrefix = "EPSG:269";
    if (srs.size() == kPrefix.size() + 2 && iequals(std::string_view(srs).substr(0, 8), kPrefix)) {
      if (auto z = parseInteger(std::string_view(srs).substr(8)); z && isServedZone(static_cast<int>(*z))) {
        return static_cast<int>(*z);
      }
    }
    throw ValidationError("SRS must be one of EPSG:26903 .. EPSG:26920", "SRS");
  }

  static UtmRect parseBbox(const std::string& raw, int zone) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
      const std::size_t comma = raw.find(',', pos);
      const auto n = parseNumber(std::string_view(raw).substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (!n) throw ValidationError("BBOX must be four numbers minx,miny,maxx,maxy", "BBOX");
      v.push_back(*n);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (v.size() != 4) throw ValidationError("BBOX must be four numbers minx,miny,maxx,maxy", "BBOX");
    if (!(v[0] < v[2]) || !(v[1] < v[3])) {
      throw ValidationError("BBOX minimum must be below maximum on both axes", "BBOX");
    }
    if (v[0] < 0 || v[1] < 0) throw ValidationError("BBOX must be in positive UTM coordinates", "BBOX");
    return {zone, v[0], v[1], v[2], v[3]};
  }

  /// Full GetMap parse; `allowPng` admits image/png besides image/jpeg.
  static OgcMapRequest parseGetMap(const Params& p, bool allowPng) {
    OgcMapRequest r;
    r.exceptions = exceptionStyleParam(p);
    requireVersion(p);
    r.version = "1.1.1";
    r.request = WmsRequestKind::GetMap;
    requireService(p, false);
    const std::string layers = requireParam(p, "Layers");
    if (iequals(layers, "DOQ")) r.layer = Theme::Doq;
    else if (iequals(layers, "DRG")) r.layer = Theme::Drg;
    else throw ValidationError("Layers must be DOQ or DRG", "Layers");
    const std::string styles = param(p, "Styles").value_or("");
    if (styles.empty() || iequals(styles, "blank")) r.styles = GridStyle::None;
    else if (iequals(styles, "UtmGrid")) r.styles = GridStyle::UtmGrid;
    else if (iequals(styles, "GeoGrid")) r.styles = GridStyle::GeoGrid;
    else throw ValidationError("Styles must be blank, UtmGrid or GeoGrid", "Styles");
    r.zone = parseSrs(requireParam(p, "SRS"));
    r.bbox = parseBbox(requireParam(p, "BBOX"), r.zone);
    r.width = static_cast<int>(intParam(p, "Width", kMinImagePixels, kMaxImagePixels));
    r.height = static_cast<int>(intParam(p, "Height", kMinImagePixels, kMaxImagePixels));
    r.format = param(p, "Format").value_or("image/jpeg");
    if (r.format.empty()) r.format = "image/jpeg";
    if (!(r.format == "image/jpeg" || (allowPng && r.format == "image/png"))) {
      throw ValidationError("Format " + r.format + " is not supported", "Format");
    }
    return r;
  }
};

/// Served scale whose resolution is closest to `metersPerPixel`
/// (absolute difference in meters; ties go to the finer scale).
inline Scale nativeScaleFor(double requestedMetersPerPixel) {
  Scale best{kMinWireScale};
  double bestDiff = std::abs(metersPerPixel(best) - requestedMetersPerPixel);
  for (int code = kMinWireScale + 1; code <= kMaxWireScale; ++code) {
    const double diff = std::abs(metersPerPixel(Scale{code}) - requestedMetersPerPixel);
    if (diff < bestDiff) {
      best = Scale{code};
      bestDiff = diff;
    }
  }
  return best;
}

}  // namespace terra
