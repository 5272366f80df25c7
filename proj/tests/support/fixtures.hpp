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

// Shared fixtures: scratch directories, synthetic rasters and a small
// lossless tile store around San Francisco.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "terra/gazetteer.hpp"
#include "terra/geo.hpp"
#include "terra/image.hpp"
#include "terra/tile_store.hpp"

#ifndef TERRA_SOURCE_DIR
#define TERRA_SOURCE_DIR "."
#endif

namespace terra::testing {

/// Identity-like projector for grid tests: longitude/latitude carry
/// easting/northing directly, so no projection error enters an oracle.
struct PlanarProjector {
  UtmPt toUtm(const LonLatPt& p, std::optional<int> zone) const { return {zone.value_or(10), p.lon, p.lat}; }
  LonLatPt toLonLat(const UtmPt& p) const { return {p.easting, p.northing}; }
};
static_assert(Projector<PlanarProjector>);

inline std::filesystem::path sourcePath(const std::string& rel) {
  return std::filesystem::path(TERRA_SOURCE_DIR) / rel;
}

/// Removes itself on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("terra-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Textured raster: channel gradients, a checker pattern and seeded noise,
/// so every pixel of every tile is distinguishable from its neighbors.
inline Canvas texturedRaster(int width, int height, unsigned seed = 7) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> noise(0, 15);
  Canvas c(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int r = (x * 7 + noise(rng)) % 256;
      const int g = (y * 5 + noise(rng)) % 256;
      const int b = ((x / 10 + y / 10) % 2 ? 200 : 40) + noise(rng);
      c.set(x, y, {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)});
    }
  }
  return c;
}

inline Canvas horizontalGradient(int width, int height) {
  Canvas c(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto v = static_cast<std::uint8_t>(x * 255 / std::max(1, width - 1));
      c.set(x, y, {v, v, v});
    }
  }
  return c;
}

/// Fixture coverage at scale 10, zone 10: tiles x 2752..2758, y 20902..20908,
/// which contains the 600x400 San Francisco scenario with a margin.
inline constexpr std::int64_t kFixtureX0 = 2752;
inline constexpr std::int64_t kFixtureY0 = 20902;
inline constexpr int kFixtureTiles = 7;
inline constexpr const char* kFixtureDate = "2001-06-15";

inline RasterPlacement fixturePlacement() {
  return {10, kFixtureX0 * 200.0, kFixtureY0 * 200.0, Scale{10}, kFixtureDate};
}

inline Canvas fixtureRaster() {
  return texturedRaster(kFixtureTiles * kTilePixels, kFixtureTiles * kTilePixels);
}

/// Lossless store holding the fixture raster as DOQ and DRG at scale 10
/// plus the pyramid above it.
inline void buildFixtureStore(const std::filesystem::path& root, bool lossless = true) {
  TileStore store(root, StoreOptions{.lossless = lossless, .beforeTileWrite = {}});
  const Canvas raster = fixtureRaster();
  for (Theme theme : {Theme::Doq, Theme::Drg}) {
    store.ingestRaster(raster, fixturePlacement(), theme);
    store.buildPyramid(theme, Scale{10});
  }
}

inline std::filesystem::path placesFixture() { return sourcePath("data/places.tsv"); }

}  // namespace terra::testing
