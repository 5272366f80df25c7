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

// Tile persistence. Tiles live at <root>/<theme>/<scale>/<scene>/<x>/<y>.<ext>
// and a single manifest.json lists every stored tile with its encoding and
// capture date (see docs/store-format.md).
//
// Writers are serialized by one mutex; every tile file and the manifest are
// replaced by rename so a concurrent reader sees either the old or the new
// file. A failed batch restores the files it had already replaced.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "terra/codec.hpp"
#include "terra/error.hpp"
#include "terra/geo.hpp"
#include "terra/image.hpp"
#include "terra/mosaic.hpp"
#include "terra/raster_io.hpp"

namespace terra {

struct TileBlob {
  TileId id;
  Encoding encoding = Encoding::Png;
  std::vector<std::uint8_t> bytes;
};

/// Wire/storage encoding for a theme and scale. Topographic tiles at
/// 2, 8 and 32 m/px are GIF; everything else is JPEG. Lossless stores use
/// PNG throughout.
inline Encoding encodingFor(Theme theme, Scale scale, bool lossless = false) {
  if (lossless) return Encoding::Png;
  if (theme == Theme::Drg && (scale.code == 11 || scale.code == 13 || scale.code == 15)) {
    return Encoding::Gif;
  }
  return Encoding::Jpeg;
}

/// Where a raster sits on the tile grid: SW corner in UTM meters.
struct RasterPlacement {
  int zone = 10;
  double originEasting = 0.0;
  double originNorthing = 0.0;
  Scale baseScale{10};
  std::string captureDate;
};

inline bool isIsoDate(const std::string& s) {
  static const std::regex kDate(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01]))");
  return std::regex_match(s, kDate);
}

inline RasterPlacement placementFromJson(const nlohmann::json& j) {
  RasterPlacement p;
  try {
    p.zone = j.at("zone").get<int>();
    p.originEasting = j.at("originEasting").get<double>();
    p.originNorthing = j.at("originNorthing").get<double>();
    p.baseScale = Scale{j.value("baseScale", 10)};
    p.captureDate = j.value("captureDate", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("placement: ") + e.what(), "placement");
  }
  return p;
}

struct CoverageRect {
  Theme theme;
  Scale scale;
  Scene scene;
  std::int64_t minX, minY, maxX, maxY;  // inclusive
};

struct StoreOptions {
  bool lossless = false;
  /// Test hook invoked before each tile file is written; may throw to
  /// simulate a storage failure.
  std::function<void(const TileId&)> beforeTileWrite;
};

class TileStore {
 public:
  explicit TileStore(std::filesystem::path root, StoreOptions options = {})
      : root_(std::move(root)), options_(std::move(options)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError("cannot create store directory");
    loadManifest();
  }

  TileStore(const TileStore&) = delete;
  TileStore& operator=(const TileStore&) = delete;

  bool lossless() const noexcept { return options_.lossless; }
  const std::filesystem::path& root() const noexcept { return root_; }

  Encoding encodingFor(Theme theme, Scale scale) const {
    return terra::encodingFor(theme, scale, options_.lossless);
  }

  void putTile(const TileBlob& blob, const std::optional<std::string>& captureDate = {}) {
    validateBlob(blob);
    std::lock_guard writer(writeMutex_);
    commit({{blob, captureDate}});
  }

  bool hasTile(const TileId& id) const {
    validate(id);
    std::shared_lock lock(indexMutex_);
    return index_.contains(id);
  }

  TileBlob getTile(const TileId& id) const {
    validate(id);
    Encoding enc;
    {
      std::shared_lock lock(indexMutex_);
      auto it = index_.find(id);
      if (it == index_.end()) throw NotFoundError("no tile stored for " + describe(id));
      enc = it->second.encoding;
    }
    return {id, enc, raster_io::readFile(tilePath(id, enc))};
  }

  std::optional<FetchedTile> fetch(const TileId& id) const {
    try {
      TileBlob b = getTile(id);
      return FetchedTile{b.encoding, std::move(b.bytes)};
    } catch (const NotFoundError&) {
      return std::nullopt;
    }
  }

  std::optional<std::string> captureDate(const TileId& id) const {
    std::shared_lock lock(indexMutex_);
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second.captureDate;
  }

  /// Geometry always; capture date when the tile is stored.
  TileMeta getTileMeta(const TileId& id) const {
    TileMeta meta = tileMetaGeometry(id);
    meta.captureDate = captureDate(id);
    return meta;
  }

  std::vector<TileId> tiles() const {
    std::shared_lock lock(indexMutex_);
    std::vector<TileId> out;
    out.reserve(index_.size());
    for (const auto& [id, rec] : index_) out.push_back(id);
    return out;
  }

  std::vector<TileId> tiles(Theme theme, Scale scale) const {
    std::vector<TileId> out;
    for (const TileId& id : tiles()) {
      if (id.theme == theme && id.scale == scale) out.push_back(id);
    }
    return out;
  }

  std::vector<CoverageRect> coverage() const {
    std::shared_lock lock(indexMutex_);
    return computeCoverage(index_);
  }

  /// Cuts a raster into 200x200 tiles at the placement's base scale.
  /// All tiles are written or none are.
  std::size_t ingestRaster(const Canvas& raster, const RasterPlacement& placement, Theme theme) {
    if (raster.width() <= 0 || raster.height() <= 0 || raster.width() % kTilePixels != 0 ||
        raster.height() % kTilePixels != 0) {
      throw ValidationError("raster dimensions must be positive multiples of 200", "raster");
    }
    if (placement.zone < 1 || placement.zone > 60) {
      throw ValidationError("placement zone outside [1, 60]", "zone");
    }
    if (placement.baseScale.code < kMinScaleCode || placement.baseScale.code > kMaxScaleCode) {
      throw ValidationError("placement scale outside [8, 24]", "baseScale");
    }
    if (!placement.captureDate.empty() && !isIsoDate(placement.captureDate)) {
      throw ValidationError("captureDate must be YYYY-MM-DD", "captureDate");
    }
    const double span = tileSpan(placement.baseScale);
    if (placement.originEasting < 0 || placement.originNorthing < 0 ||
        std::fmod(placement.originEasting, span) != 0.0 ||
        std::fmod(placement.originNorthing, span) != 0.0) {
      throw ValidationError("placement origin is not aligned to the tile grid", "placement");
    }
    const auto x0 = static_cast<std::int64_t>(placement.originEasting / span);
    const auto y0 = static_cast<std::int64_t>(placement.originNorthing / span);
    const int cols = raster.width() / kTilePixels;
    const int rows = raster.height() / kTilePixels;
    const Encoding enc = encodingFor(theme, placement.baseScale);
    std::optional<std::string> date;
    if (!placement.captureDate.empty()) date = placement.captureDate;

    std::vector<Pending> batch;
    batch.reserve(static_cast<std::size_t>(cols) * rows);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        Canvas tile(kTilePixels, kTilePixels);
        tile.blit(raster, -c * kTilePixels, -r * kTilePixels);
        TileId id{theme, placement.baseScale, Scene{placement.zone}, x0 + c, y0 + (rows - 1 - r)};
        batch.push_back({TileBlob{id, enc, encode(tile, enc)}, date});
      }
    }
    std::lock_guard writer(writeMutex_);
    commit(batch);
    return batch.size();
  }

  /// Builds the level above `fromScale`: each parent tile (X, Y) is the 2x2
  /// box-filtered mosaic of children (2X..2X+1, 2Y..2Y+1); missing children
  /// contribute mid-gray. Returns the number of parent tiles written.
  std::size_t buildPyramidLevel(Theme theme, Scale fromScale) {
    if (fromScale.code < kMinScaleCode || fromScale.code >= kMaxScaleCode) {
      throw DomainError("cannot build a level above scale " + std::to_string(fromScale.code),
                        "scale");
    }
    std::lock_guard writer(writeMutex_);
    const Scale parentScale{fromScale.code + 1};
    std::set<TileId> parents;
    for (const TileId& child : tiles(theme, fromScale)) {
      parents.insert(TileId{theme, parentScale, child.scene, child.x / 2, child.y / 2});
    }
    const Encoding enc = encodingFor(theme, parentScale);
    std::vector<Pending> batch;
    for (const TileId& parent : parents) {
      Canvas out(kTilePixels, kTilePixels, kFillColor);
      std::optional<std::string> latest;
      for (int dx = 0; dx < 2; ++dx) {
        for (int dy = 0; dy < 2; ++dy) {
          TileId child{theme, fromScale, parent.scene, parent.x * 2 + dx, parent.y * 2 + dy};
          auto fetched = fetch(child);
          if (!fetched) continue;
          const Canvas pixels = decode(fetched->bytes, fetched->encoding);
          // North (dy = 1) goes to the top half, east (dx = 1) to the right.
          downsampleInto(out, pixels, dx * (kTilePixels / 2), (1 - dy) * (kTilePixels / 2));
          if (auto d = captureDate(child); d && (!latest || *d > *latest)) latest = d;
        }
      }
      batch.push_back({TileBlob{parent, enc, encode(out, enc)}, latest});
    }
    commit(batch);
    return batch.size();
  }

  /// Builds successive levels from `baseScale` until each scene is covered
  /// by a single tile. Returns the tile count at every level, base first.
  std::vector<std::size_t> buildPyramid(Theme theme, Scale baseScale,
                                        const std::function<void(Scale, std::size_t)>& progress = {}) {
    std::vector<std::size_t> counts{tiles(theme, baseScale).size()};
    Scale s = baseScale;
    while (s.code < kMaxScaleCode && counts.back() > scenes(theme, s).size()) {
      counts.push_back(buildPyramidLevel(theme, s));
      s.code += 1;
      if (progress) progress(s, counts.back());
    }
    return counts;
  }

  /// FNV-1a 64 of the manifest file, hex encoded.
  std::string manifestDigest() const {
    std::shared_lock lock(indexMutex_);
    std::uint64_t h = 1469598103934665603ull;
    std::error_code ec;
    if (std::filesystem::exists(manifestPath(), ec)) {
      for (std::uint8_t b : raster_io::readFile(manifestPath())) {
        h ^= b;
        h *= 1099511628211ull;
      }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  std::filesystem::path manifestPath() const { return root_ / "manifest.json"; }

  std::filesystem::path tilePath(const TileId& id, Encoding enc) const {
    return root_ / std::to_string(static_cast<int>(id.theme)) / std::to_string(id.scale.code) /
           std::to_string(id.scene.zone) / std::to_string(id.x) /
           (std::to_string(id.y) + "." + std::string(extension(enc)));
  }

 private:
  struct Record {
    Encoding encoding;
    std::optional<std::string> captureDate;
  };

  struct Pending {
    TileBlob blob;
    std::optional<std::string> captureDate;
  };

  static void downsampleInto(Canvas& out, const Canvas& child, int ox, int oy) {
    for (int y = 0; y < kTilePixels / 2; ++y) {
      for (int x = 0; x < kTilePixels / 2; ++x) {
        const Rgb a = child.at(2 * x, 2 * y), b = child.at(2 * x + 1, 2 * y);
        const Rgb c = child.at(2 * x, 2 * y + 1), d = child.at(2 * x + 1, 2 * y + 1);
        auto mean = [](int p, int q, int r, int s) {
          return static_cast<std::uint8_t>((p + q + r + s + 2) / 4);
        };
        out.set(ox + x, oy + y,
                {mean(a.r, b.r, c.r, d.r), mean(a.g, b.g, c.g, d.g), mean(a.b, b.b, c.b, d.b)});
      }
    }
  }

  std::set<Scene> scenes(Theme theme, Scale scale) const {
    std::set<Scene> out;
    for (const TileId& id : tiles(theme, scale)) out.insert(id.scene);
    return out;
  }

  void validateBlob(const TileBlob& blob) const {
    validate(blob.id);
    const Encoding expected = encodingFor(blob.id.theme, blob.id.scale);
    if (blob.encoding != expected) {
      throw ValidationError("tile encoding must be " + std::string(extension(expected)) +
                                " for this theme and scale",
                            "encoding");
    }
    Canvas c;
    try {
      c = decode(blob.bytes, blob.encoding);
    } catch (const DecodeError& e) {
      throw ValidationError(std::string("tile does not decode: ") + e.what(), "bytes");
    }
    if (c.width() != kTilePixels || c.height() != kTilePixels) {
      throw ValidationError("tile must decode to 200x200 pixels", "bytes");
    }
  }

  // Writes a batch of tiles and then the manifest. On any failure every
  // replaced file is restored and the in-memory index is left untouched.
  void commit(const std::vector<Pending>& batch) {
    struct Undo {
      std::filesystem::path path;
      std::optional<std::vector<std::uint8_t>> previous;
    };
    std::vector<Undo> undo;
    auto rollback = [&] {
      for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
        std::error_code ec;
        if (it->previous) {
          writeAtomically(it->path, *it->previous, ec);
        } else {
          std::filesystem::remove(it->path, ec);
        }
      }
    };

    std::map<TileId, Record> next;
    {
      std::shared_lock lock(indexMutex_);
      next = index_;
    }
    try {
      for (const Pending& p : batch) {
        if (options_.beforeTileWrite) options_.beforeTileWrite(p.blob.id);
        const auto path = tilePath(p.blob.id, p.blob.encoding);
        Undo u{path, std::nullopt};
        std::error_code ec;
        if (std::filesystem::exists(path, ec)) u.previous = raster_io::readFile(path);
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create tile directory");
        undo.push_back(std::move(u));
        writeAtomically(path, p.blob.bytes, ec);
        if (ec) throw IoError("cannot write tile " + describe(p.blob.id));
        next[p.blob.id] = Record{p.blob.encoding, p.captureDate};
      }
      const std::string text = manifestText(next, options_.lossless);
      std::error_code ec;
      writeAtomically(manifestPath(),
                      std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                      ec);
      if (ec) throw IoError("cannot write manifest");
    } catch (...) {
      rollback();
      throw;
    }
    std::unique_lock lock(indexMutex_);
    index_ = std::move(next);
  }

  static void writeAtomically(const std::filesystem::path& path,
                              std::span<const std::uint8_t> bytes, std::error_code& ec) {
    static std::atomic<std::uint64_t> counter{0};
    auto tmp = path;
    tmp += ".tmp" + std::to_string(counter.fetch_add(1));
    try {
      raster_io::writeFile(tmp, bytes);
    } catch (const IoError&) {
      ec = std::make_error_code(std::errc::io_error);
      return;
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
    }
  }

  static std::vector<CoverageRect> computeCoverage(const std::map<TileId, Record>& index) {
    std::map<std::tuple<int, int, int>, CoverageRect> rects;
    for (const auto& [id, rec] : index) {
      auto key = std::make_tuple(static_cast<int>(id.theme), id.scale.code, id.scene.zone);
      auto [it, inserted] =
          rects.try_emplace(key, CoverageRect{id.theme, id.scale, id.scene, id.x, id.y, id.x, id.y});
      if (!inserted) {
        auto& r = it->second;
        r.minX = std::min(r.minX, id.x);
        r.minY = std::min(r.minY, id.y);
        r.maxX = std::max(r.maxX, id.x);
        r.maxY = std::max(r.maxY, id.y);
      }
    }
    std::vector<CoverageRect> out;
    for (auto& [k, r] : rects) out.push_back(r);
    return out;
  }

  static std::string manifestText(const std::map<TileId, Record>& index, bool lossless) {
    using nlohmann::json;
    json themes = json::object();
    json coverage = json::array();
    json tiles = json::array();
    for (const auto& [id, rec] : index) {
      tiles.push_back({{"theme", static_cast<int>(id.theme)},
                       {"scale", id.scale.code},
                       {"scene", id.scene.zone},
                       {"x", id.x},
                       {"y", id.y},
                       {"encoding", std::string(extension(rec.encoding))},
                       {"captureDate", rec.captureDate ? json(*rec.captureDate) : json(nullptr)}});
    }
    for (const CoverageRect& r : computeCoverage(index)) {
      const std::string theme = themeName(r.theme);
      auto& entry = themes[theme];
      if (entry.is_null()) entry = {{"minScale", r.scale.code}, {"maxScale", r.scale.code}};
      entry["minScale"] = std::min(entry["minScale"].get<int>(), r.scale.code);
      entry["maxScale"] = std::max(entry["maxScale"].get<int>(), r.scale.code);
      coverage.push_back({{"theme", static_cast<int>(r.theme)},
                          {"scale", r.scale.code},
                          {"scene", r.scene.zone},
                          {"minX", r.minX},
                          {"minY", r.minY},
                          {"maxX", r.maxX},
                          {"maxY", r.maxY}});
    }
    json doc = {{"format", "terratile-store"},
                {"version", 1},
                {"lossless", lossless},
                {"themes", themes},
                {"coverage", coverage},
                {"tiles", tiles}};
    return doc.dump(1) + "\n";
  }

  void loadManifest() {
    std::error_code ec;
    if (!std::filesystem::exists(manifestPath(), ec)) return;
    nlohmann::json doc;
    try {
      const auto bytes = raster_io::readFile(manifestPath());
      doc = nlohmann::json::parse(bytes.begin(), bytes.end());
      if (doc.value("format", "") != "terratile-store") throw IoError("not a tile store manifest");
      options_.lossless = doc.value("lossless", options_.lossless);
      for (const auto& t : doc.at("tiles")) {
        TileId id{static_cast<Theme>(t.at("theme").get<int>()), Scale{t.at("scale").get<int>()},
                  Scene{t.at("scene").get<int>()}, t.at("x").get<std::int64_t>(),
                  t.at("y").get<std::int64_t>()};
        validate(id);
        const auto enc = encodingFromExtension(t.at("encoding").get<std::string>());
        if (!enc) throw IoError("manifest: unknown encoding");
        std::optional<std::string> date;
        if (t.contains("captureDate") && t["captureDate"].is_string()) {
          date = t["captureDate"].get<std::string>();
        }
        index_[id] = Record{*enc, date};
      }
    } catch (const nlohmann::json::exception&) {
      throw IoError("manifest is malformed");
    } catch (const ValidationError&) {
      throw IoError("manifest lists an invalid tile id");
    }
  }

  std::filesystem::path root_;
  StoreOptions options_;
  mutable std::shared_mutex indexMutex_;
  std::mutex writeMutex_;
  std::map<TileId, Record> index_;
};

}  // namespace terra
