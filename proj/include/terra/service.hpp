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

// Request handling for every endpoint, independent of the HTTP transport.
// A Service holds only const references to the read-mostly store and
// gazetteer: each response is a function of the request alone.

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include <json.hpp>

#include "terra/codec.hpp"
#include "terra/gazetteer.hpp"
#include "terra/geo.hpp"
#include "terra/mosaic.hpp"
#include "terra/params.hpp"
#include "terra/projection.hpp"
#include "terra/tile_store.hpp"
#include "terra/wire.hpp"

namespace terra {

struct Response {
  int status = 200;
  std::string contentType;
  std::string body;
  std::map<std::string, std::string> headers;
};

inline constexpr const char* kJsonType = "application/json";
inline constexpr const char* kCapabilitiesType = "application/vnd.ogc.wms_xml";
inline constexpr const char* kServiceExceptionType = "application/vnd.ogc.se_xml";

/// Largest composite (per axis, native pixels) the WMS endpoint will build.
inline constexpr int kMaxNativeComposite = 4096;
/// Size used for image-style error reports when the request's own
/// Width/Height cannot be read.
inline constexpr int kFallbackErrorImagePixels = 256;
inline constexpr int kMaxErrorImagePixels = 4096;

inline std::string xmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string serviceExceptionXml(std::string_view code, std::string_view message,
                                       std::string_view locator) {
  std::string xml =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<ServiceExceptionReport version=\"1.1.1\">\n"
      "  <ServiceException code=\"" +
      xmlEscape(code) + "\"";
  if (!locator.empty()) xml += " locator=\"" + xmlEscape(locator) + "\"";
  xml += ">" + xmlEscape(message) + "</ServiceException>\n</ServiceExceptionReport>\n";
  return xml;
}

inline std::string capabilitiesXml(bool allowPng) {
  std::string xml =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<WMT_MS_Capabilities version=\"1.1.1\">\n"
      "  <Service>\n"
      "    <Name>OGC:WMS</Name>\n"
      "    <Title>TerraTile Web Map Server</Title>\n"
      "    <Abstract>Ortho imagery (DOQ) and topographic map (DRG) tile mosaics in UTM NAD83.</Abstract>\n"
      "  </Service>\n"
      "  <Capability>\n"
      "    <Request>\n"
      "      <GetCapabilities><Format>application/vnd.ogc.wms_xml</Format></GetCapabilities>\n"
      "      <GetMap><Format>image/jpeg</Format>";
  if (allowPng) xml += "<Format>image/png</Format>";
  xml +=
      "</GetMap>\n"
      "    </Request>\n"
      "    <Exception>\n"
      "      <Format>application/vnd.ogc.se_xml</Format>\n"
      "      <Format>application/vnd.ogc.se_inimage</Format>\n"
      "      <Format>application/vnd.ogc.se_blank</Format>\n"
      "    </Exception>\n"
      "    <Layer>\n"
      "      <Title>TerraTile</Title>\n";
  for (int zone = kMinServedZone; zone <= kMaxServedZone; ++zone) {
    xml += "      <SRS>EPSG:269" + std::string(zone < 10 ? "0" : "") + std::to_string(zone) + "</SRS>\n";
  }
  const struct {
    const char* name;
    const char* title;
  } kLayers[] = {{"DOQ", "Digital Ortho-Quadrangle aerial imagery"},
                 {"DRG", "Digital Raster Graphic topographic maps"}};
  for (const auto& layer : kLayers) {
    xml += "      <Layer queryable=\"0\">\n        <Name>" + std::string(layer.name) +
           "</Name>\n        <Title>" + layer.title + "</Title>\n";
    for (const char* style : {"blank", "UtmGrid", "GeoGrid"}) {
      xml += "        <Style><Name>" + std::string(style) + "</Name><Title>" + style +
             "</Title></Style>\n";
    }
    xml += "        <ScaleHint min=\"1\" max=\"64\"/>\n      </Layer>\n";
  }
  xml +=
      "    </Layer>\n"
      "  </Capability>\n"
      "</WMT_MS_Capabilities>\n";
  return xml;
}

/// Admits at most `slots` image renders at a time, in arrival order. Image
/// requests are CPU bound, so running more of them than there are cores only
/// stretches every one of them.
class RenderGate {
 public:
  explicit RenderGate(unsigned slots) : slots_(std::max(1u, slots)) {}

  class Pass {
   public:
    explicit Pass(const RenderGate& gate) : gate_(gate) { gate_.enter(); }
    ~Pass() { gate_.leave(); }
    Pass(const Pass&) = delete;
    Pass& operator=(const Pass&) = delete;

   private:
    const RenderGate& gate_;
  };

  unsigned slots() const noexcept { return slots_; }

 private:
  void enter() const {
    std::unique_lock lock(mutex_);
    const std::uint64_t ticket = nextTicket_++;
    cv_.wait(lock, [&] { return ticket == nowServing_ && busy_ < slots_; });
    ++nowServing_;
    ++busy_;
    cv_.notify_all();
  }

  void leave() const {
    std::lock_guard lock(mutex_);
    --busy_;
    cv_.notify_all();
  }

  unsigned slots_;
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  mutable unsigned busy_ = 0;
  mutable std::uint64_t nextTicket_ = 0;
  mutable std::uint64_t nowServing_ = 0;
};

class Service {
 public:
  Service(const TileStore& store, const Gazetteer* gazetteer, bool testMode,
          unsigned renderSlots = std::thread::hardware_concurrency())
      : store_(store), gazetteer_(gazetteer), testMode_(testMode), gate_(renderSlots) {}

  bool testMode() const noexcept { return testMode_; }

  /// Dispatches on the endpoint name (case-insensitive, leading '/' optional).
  Response handle(std::string_view endpoint, const Params& params) const {
    if (!endpoint.empty() && endpoint.front() == '/') endpoint.remove_prefix(1);
    if (iequals(endpoint, "OgcMap") || iequals(endpoint, "OgcMap.ashx") ||
        iequals(endpoint, "OGCWMS.ashx")) {
      return ogcMap(params);
    }
    if (iequals(endpoint, "GetImageArea") || iequals(endpoint, "GetImageArea.ashx")) {
      return getImageArea(params);
    }
    try {
      if (iequals(endpoint, "GetTile")) return getTile(params);
      if (iequals(endpoint, "GetTileMetaFromTileId")) return json(getTileMetaFromTileId(params));
      if (iequals(endpoint, "GetTileMetaFromLonLatPt")) return json(getTileMetaFromLonLatPt(params));
      if (iequals(endpoint, "GetAreaFromPt") || iequals(endpoint, "GetTileAreaFromPt")) {
        return json(getAreaFromPt(params));
      }
      if (iequals(endpoint, "GetPlaceFacts")) return json(getPlaceFacts(params));
      if (iequals(endpoint, "GetPlaceList")) return json(getPlaceList(params));
      return error(ErrorCode::NotFound, "unknown method " + std::string(endpoint), {});
    } catch (const ValidationError& e) {
      return error(ErrorCode::Validation, e.what(), e.parameter());
    } catch (const DomainError& e) {
      return error(ErrorCode::Domain, e.what(), e.parameter());
    } catch (const NotFoundError& e) {
      return error(ErrorCode::NotFound, e.what(), {});
    } catch (const StateError& e) {
      return error(ErrorCode::Internal, e.what(), {});
    } catch (const std::exception&) {
      return error(ErrorCode::Internal, "internal error", {});
    }
  }

  // Typed entry points; these throw the library's error types.

  TileBlob tile(const Params& p) const { return store_.getTile(tileIdParams(p)); }

  TileMeta getTileMetaFromTileId(const Params& p) const {
    return store_.getTileMeta(tileIdParams(p));
  }

  TileMeta getTileMetaFromLonLatPt(const Params& p) const {
    const Theme theme = themeParam(p, "theme");
    const Scale scale = scaleParam(p, "scale");
    const LonLatPt pt = lonLatParams(p, "lon", "lat");
    const int zone = servedZoneFor(pt);
    return store_.getTileMeta(tileForUtm(theme, scale, projection::lonLatToUtm(pt, zone)));
  }

  AreaBoundingBox getAreaFromPt(const Params& p) const {
    const Theme theme = themeParam(p, "theme");
    const Scale scale = scaleParam(p, "scale");
    const LonLatPt pt = lonLatParams(p, "lon", "lat");
    const int width = static_cast<int>(intParam(p, "width", kMinImagePixels, kMaxImagePixels));
    const int height = static_cast<int>(intParam(p, "height", kMinImagePixels, kMaxImagePixels));
    servedZoneFor(pt);
    return decorate(terra::getAreaFromPt(pt, theme, scale, width, height));
  }

  std::vector<PlaceFacts> getPlaceFacts(const Params& p) const {
    Place q{param(p, "city").value_or(""), param(p, "state").value_or(""),
            param(p, "country").value_or("")};
    return gazetteer().getPlaceFacts(q);
  }

  std::vector<PlaceFacts> getPlaceList(const Params& p) const {
    const LonLatPt ul = lonLatParams(p, "ulLon", "ulLat");
    const LonLatPt lr = lonLatParams(p, "lrLon", "lrLat");
    const int maxItems = static_cast<int>(intParamOr(p, "maxItems", 1, 100000, 100));
    return gazetteer().getPlaceList(ul, lr, maxItems);
  }

  /// Fills capture dates from the store and the nearest landmark.
  AreaBoundingBox decorate(AreaBoundingBox abb) const {
    for (AreaCoordinate* ac :
         {&abb.northWest, &abb.northEast, &abb.southWest, &abb.southEast, &abb.center}) {
      ac->tileMeta.captureDate = store_.captureDate(ac->tileMeta.id);
    }
    if (gazetteer_) {
      try {
        abb.nearestPlace = gazetteer_->nearestPlace(abb.center.offset.point);
      } catch (const StateError&) {
        abb.nearestPlace.reset();
      }
    }
    return abb;
  }

  Encoding imageEncoding() const { return testMode_ ? Encoding::Png : Encoding::Jpeg; }

  Canvas renderImageArea(const ImageAreaRequest& r) const {
    servedZoneFor(r.center);
    const AreaBoundingBox abb = terra::getAreaFromPt(r.center, r.theme, r.scale, r.width, r.height);
    return renderArea(abb, r.style);
  }

  Canvas renderArea(const AreaBoundingBox& abb, const RenderStyle& style) const {
    Canvas canvas = composeArea(abb, [this](const TileId& id) { return store_.fetch(id); });
    if (style.tileBoundaries) drawTileBoundaries(canvas, abb, Argb{0xFF, 0xFF, 0xFF, 0x00});
    applyStyle(canvas, georefFor(abb), style);
    return canvas;
  }

  Canvas renderOgcMap(const OgcMapRequest& r) const {
    const double bw = r.bbox.maxEasting - r.bbox.minEasting;
    const double bh = r.bbox.maxNorthing - r.bbox.minNorthing;
    const Scale native = nativeScaleFor(bw / r.width);
    const double res = metersPerPixel(native);
    const int nw = std::max(1, static_cast<int>(std::lround(bw / res)));
    const int nh = std::max(1, static_cast<int>(std::lround(bh / res)));
    if (nw > kMaxNativeComposite || nh > kMaxNativeComposite) {
      throw DomainError("BBOX is too large for the served resolutions", "BBOX");
    }
    const AreaBoundingBox abb = areaFromUtm(r.bbox.midpoint(), r.layer, native, nw, nh);
    Canvas canvas = composeArea(abb, [this](const TileId& id) { return store_.fetch(id); });
    canvas = rescale(canvas, r.width, r.height);
    RenderStyle style;
    style.gridStyle = r.styles;
    const PixelGeoref georef{r.zone, r.bbox.minEasting, r.bbox.maxNorthing, bw / r.width,
                             bh / r.height};
    applyStyle(canvas, georef, style);
    return canvas;
  }

 private:
  const Gazetteer& gazetteer() const {
    if (!gazetteer_) throw StateError("no gazetteer loaded");
    return *gazetteer_;
  }

  static int servedZoneFor(const LonLatPt& pt) {
    const int zone = projection::utmZoneForLongitude(pt.lon);
    if (!isServedZone(zone)) {
      throw DomainError("longitude falls in UTM zone " + std::to_string(zone) +
                            ", outside the served zones 3..20",
                        "lon");
    }
    return zone;
  }

  static TileId tileIdParams(const Params& p) {
    TileId id;
    id.theme = themeParam(p, "theme");
    id.scale = scaleParam(p, "scale");
    id.scene = Scene{static_cast<int>(intParam(p, "scene", 1, 60))};
    id.x = intParam(p, "x", 0, std::numeric_limits<std::int32_t>::max());
    id.y = intParam(p, "y", 0, std::numeric_limits<std::int32_t>::max());
    return id;
  }

  Response getTile(const Params& p) const {
    TileBlob b = tile(p);
    Response r;
    r.contentType = std::string(mediaType(b.encoding));
    r.body.assign(b.bytes.begin(), b.bytes.end());
    return r;
  }

  template <class T>
  static Response json(const T& value) {
    Response r;
    r.contentType = kJsonType;
    r.body = nlohmann::json(value).dump();
    return r;
  }

  static Response error(ErrorCode code, const std::string& message, const std::string& parameter) {
    Response r;
    r.status = httpStatusFor(code);
    r.contentType = kJsonType;
    r.body = errorJson(code, message, parameter).dump();
    r.headers[kErrorHeader] = std::string(errorCodeName(code));
    return r;
  }

  static int errorImageDimension(const Params& p, std::string_view name) {
    if (auto v = param(p, name)) {
      if (auto n = parseInteger(*v); n && *n >= 1 && *n <= kMaxErrorImagePixels) {
        return static_cast<int>(*n);
      }
    }
    return kFallbackErrorImagePixels;
  }

  Response image(const Canvas& c, Encoding enc) const {
    Response r;
    r.contentType = std::string(mediaType(enc));
    const auto bytes = encode(c, enc);
    r.body.assign(bytes.begin(), bytes.end());
    return r;
  }

  static ErrorCode classify(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return ErrorCode::Validation;
    if (dynamic_cast<const DomainError*>(&e)) return ErrorCode::Domain;
    if (dynamic_cast<const NotFoundError*>(&e)) return ErrorCode::NotFound;
    return ErrorCode::Internal;
  }

  static std::string parameterOf(const std::exception& e) {
    if (auto* v = dynamic_cast<const ValidationError*>(&e)) return v->parameter();
    if (auto* d = dynamic_cast<const DomainError*>(&e)) return d->parameter();
    return {};
  }

  static std::string publicMessage(const std::exception& e) {
    if (dynamic_cast<const Error*>(&e) && !dynamic_cast<const IoError*>(&e)) return e.what();
    return "internal error";
  }

  Response getImageArea(const Params& p) const {
    try {
      const ImageAreaRequest req = ImageAreaRequest::parse(p);
      const RenderGate::Pass pass(gate_);
      return image(renderImageArea(req), imageEncoding());
    } catch (const std::exception& e) {
      const ErrorCode code = classify(e);
      Response r = image(renderMessageImage(publicMessage(e), errorImageDimension(p, "W"),
                                            errorImageDimension(p, "H")),
                         imageEncoding());
      r.headers[kErrorHeader] = std::string(errorCodeName(code));
      return r;
    }
  }

  Response ogcMap(const Params& p) const {
    const ExceptionStyle style = exceptionStyleParam(p);
    try {
      if (OgcMapRequest::parseRequestKind(p) == WmsRequestKind::GetCapabilities) {
        OgcMapRequest::requireVersion(p);
        OgcMapRequest::requireService(p, true);
        Response r;
        r.contentType = kCapabilitiesType;
        r.body = capabilitiesXml(testMode_);
        return r;
      }
      const OgcMapRequest req = OgcMapRequest::parseGetMap(p, testMode_);
      const RenderGate::Pass pass(gate_);
      return image(renderOgcMap(req), *encodingFromMediaType(req.format));
    } catch (const std::exception& e) {
      const ErrorCode code = classify(e);
      const std::string message = publicMessage(e);
      Response r;
      r.headers[kErrorHeader] = std::string(errorCodeName(code));
      if (style == ExceptionStyle::Xml) {
        const std::string wmsCode = code == ErrorCode::Validation ? "InvalidParameterValue"
                                                                  : "OperationNotSupported";
        r.contentType = kServiceExceptionType;
        r.body = serviceExceptionXml(wmsCode, message, parameterOf(e));
        return r;
      }
      Encoding enc = testMode_ ? Encoding::Png : Encoding::Jpeg;
      if (auto f = param(p, "Format"); f && *f == "image/jpeg") enc = Encoding::Jpeg;
      const int w = errorImageDimension(p, "Width");
      const int h = errorImageDimension(p, "Height");
      const Canvas c = style == ExceptionStyle::Blank ? Canvas(w, h, kMessageBackground)
                                                      : renderMessageImage(message, w, h);
      Response img = image(c, enc);
      img.headers = r.headers;
      return img;
    }
  }

  const TileStore& store_;
  const Gazetteer* gazetteer_;
  bool testMode_;
  RenderGate gate_;
};

}  // namespace terra
