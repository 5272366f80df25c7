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

#include <random>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "terra/geo.hpp"

namespace terra {
namespace {

using testing::PlanarProjector;

TileId tile(int scale, std::int64_t x, std::int64_t y, int zone = 10) {
  return {Theme::Doq, Scale{scale}, Scene{zone}, x, y};
}

TEST(MetersPerPixel, Examples) {
  EXPECT_DOUBLE_EQ(metersPerPixel(Scale{10}), 1.0);
  EXPECT_DOUBLE_EQ(metersPerPixel(Scale{16}), 64.0);
  EXPECT_DOUBLE_EQ(metersPerPixel(Scale{8}), 0.25);
  EXPECT_DOUBLE_EQ(metersPerPixel(Scale{24}), 16384.0);
}

TEST(MetersPerPixel, OutOfRangeIsDomainError) {
  EXPECT_THROW(metersPerPixel(Scale{7}), DomainError);
  EXPECT_THROW(metersPerPixel(Scale{25}), DomainError);
}

TEST(TileExtent, Examples) {
  const UtmRect a = tileExtent(tile(10, 2755, 20900));
  EXPECT_EQ(a.zone, 10);
  EXPECT_DOUBLE_EQ(a.minEasting, 551000);
  EXPECT_DOUBLE_EQ(a.maxEasting, 551200);
  EXPECT_DOUBLE_EQ(a.minNorthing, 4180000);
  EXPECT_DOUBLE_EQ(a.maxNorthing, 4180200);

  const UtmRect b = tileExtent(tile(11, 0, 0));
  EXPECT_DOUBLE_EQ(b.minEasting, 0);
  EXPECT_DOUBLE_EQ(b.maxEasting, 400);
  EXPECT_DOUBLE_EQ(b.minNorthing, 0);
  EXPECT_DOUBLE_EQ(b.maxNorthing, 400);

  const UtmRect c = tileExtent(tile(16, 3, 2));
  EXPECT_DOUBLE_EQ(c.minEasting, 38400);
  EXPECT_DOUBLE_EQ(c.maxEasting, 51200);
  EXPECT_DOUBLE_EQ(c.minNorthing, 25600);
  EXPECT_DOUBLE_EQ(c.maxNorthing, 38400);
}

TEST(TileExtent, RejectsInvalidIds) {
  EXPECT_THROW(tileExtent(tile(99, 0, 0)), ValidationError);
  EXPECT_THROW(tileExtent({static_cast<Theme>(3), Scale{10}, Scene{10}, 0, 0}), ValidationError);
  EXPECT_THROW(tileExtent(tile(10, -1, 0)), ValidationError);
}

TEST(TileForUtm, Examples) {
  EXPECT_EQ(tileForUtm(Theme::Doq, Scale{10}, {10, 551000, 4180000}), tile(10, 2755, 20900));
  EXPECT_EQ(tileForUtm(Theme::Doq, Scale{10}, {10, 551199.99, 4180199.99}), tile(10, 2755, 20900));
  EXPECT_THROW(tileForUtm(Theme::Doq, Scale{10}, {10, -1, 5}), DomainError);
  EXPECT_THROW(tileForUtm(Theme::Doq, Scale{10}, {10, 5, -0.5}), DomainError);
}

TEST(TileForUtm, ExhaustiveGridMidpoints) {
  for (int scale = 10; scale <= 13; ++scale) {
    for (std::int64_t x = 0; x < 10; ++x) {
      for (std::int64_t y = 0; y < 10; ++y) {
        const TileId t = tile(scale, 2700 + x, 20900 + y);
        EXPECT_EQ(tileForUtm(t.theme, t.scale, tileExtent(t).midpoint()), t);
      }
    }
  }
}

TEST(TileForUtm, RandomInteriorPointsProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> scale(8, 24);
  std::uniform_int_distribution<std::int64_t> idx(0, 5000);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const TileId t = tile(scale(rng), idx(rng), idx(rng));
    const UtmRect r = tileExtent(t);
    const UtmPt p{10, r.minEasting + frac(rng) * (r.maxEasting - r.minEasting),
                  r.minNorthing + frac(rng) * (r.maxNorthing - r.minNorthing)};
    ASSERT_TRUE(r.contains(p));
    ASSERT_EQ(tileForUtm(t.theme, t.scale, p), t);
  }
}

TEST(Neighbor, Examples) {
  EXPECT_EQ(neighbor(tile(10, 5, 7), -1, 1), tile(10, 4, 8));
  EXPECT_EQ(neighbor(tile(10, 5, 7), 0, 0), tile(10, 5, 7));
  EXPECT_THROW(neighbor(tile(10, 0, 0), -1, 0), DomainError);
}

TEST(Neighbor, InverseProperty) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::int64_t> idx(0, 100), d(-50, 50);
  for (int i = 0; i < 2000; ++i) {
    const TileId t = tile(10, idx(rng), idx(rng));
    const auto a = d(rng), b = d(rng);
    if (t.x + a < 0 || t.y + b < 0) continue;
    EXPECT_EQ(neighbor(neighbor(t, a, b), -a, -b), t);
  }
}

TEST(Pyramid, ParentAndChildren) {
  EXPECT_EQ(parentTile(tile(10, 5, 7)), tile(11, 2, 3));
  EXPECT_FALSE(parentTile(tile(kMaxScaleCode, 5, 7)).has_value());
  const std::vector<TileId> kids = childTiles(tile(11, 2, 3));
  ASSERT_EQ(kids.size(), 4u);
  EXPECT_EQ(kids[0], tile(10, 4, 6));
  EXPECT_EQ(kids[3], tile(10, 5, 7));
  EXPECT_TRUE(childTiles(tile(kMinScaleCode, 1, 1)).empty());
}

TEST(Pyramid, ChildrenCoverParentExtent) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::int64_t> idx(0, 5000);
  for (int i = 0; i < 500; ++i) {
    const TileId p = tile(12, idx(rng), idx(rng));
    const UtmRect outer = tileExtent(p);
    for (const TileId& c : childTiles(p)) {
      EXPECT_EQ(parentTile(c), p);
      const UtmRect r = tileExtent(c);
      EXPECT_GE(r.minEasting, outer.minEasting);
      EXPECT_LE(r.maxEasting, outer.maxEasting);
      EXPECT_GE(r.minNorthing, outer.minNorthing);
      EXPECT_LE(r.maxNorthing, outer.maxNorthing);
    }
  }
}

TEST(AreaFromUtm, SixHundredByFourHundredScenario) {
  const auto abb = areaFromUtm({10, 551000, 4181050}, Theme::Doq, Scale{10}, 600, 400, PlanarProjector{});
  EXPECT_EQ(abb.northWest.tileMeta.id, tile(10, 2753, 20906));
  EXPECT_EQ(abb.northWest.offset.xOffset, 100);
  EXPECT_EQ(abb.northWest.offset.yOffset, 150);
  EXPECT_EQ(abb.northEast.tileMeta.id.x, 2756);
  EXPECT_EQ(abb.southWest.tileMeta.id.y, 20904);
  EXPECT_EQ(abb.southEast.tileMeta.id, tile(10, 2756, 20904));
  EXPECT_EQ(abb.northEast.tileMeta.id.x - abb.northWest.tileMeta.id.x + 1, 4);
  EXPECT_EQ(abb.northWest.tileMeta.id.y - abb.southWest.tileMeta.id.y + 1, 3);
}

TEST(AreaFromUtm, ImageCongruentWithOneTile) {
  const TileId t = tile(10, 2755, 20900);
  const auto abb = areaFromUtm(tileExtent(t).midpoint(), Theme::Doq, Scale{10}, 200, 200, PlanarProjector{});
  for (const AreaCoordinate* ac : {&abb.northWest, &abb.northEast, &abb.southWest, &abb.southEast, &abb.center}) {
    EXPECT_EQ(ac->tileMeta.id, t);
  }
  EXPECT_EQ(abb.northWest.offset.xOffset, 0);
  EXPECT_EQ(abb.northWest.offset.yOffset, 0);
  EXPECT_EQ(abb.center.offset.xOffset, 100);
  EXPECT_EQ(abb.center.offset.yOffset, 100);
  EXPECT_EQ(abb.southEast.offset.xOffset, 199);
  EXPECT_EQ(abb.southEast.offset.yOffset, 199);
}

TEST(AreaFromUtm, RejectsUnservedZoneAndNegativeExtent) {
  EXPECT_THROW(areaFromUtm({2, 500000, 4e6}, Theme::Doq, Scale{10}, 100, 100), DomainError);
  EXPECT_THROW(areaFromUtm({10, 10, 4e6}, Theme::Doq, Scale{10}, 100, 100, PlanarProjector{}), DomainError);
}

TEST(GetAreaFromPt, SizeBounds) {
  const LonLatPt sf{-122.4194, 37.7749};
  EXPECT_THROW(getAreaFromPt(sf, Theme::Doq, Scale{10}, 49, 400), ValidationError);
  EXPECT_THROW(getAreaFromPt(sf, Theme::Doq, Scale{10}, 600, 2001), ValidationError);
  EXPECT_NO_THROW(getAreaFromPt(sf, Theme::Doq, Scale{10}, 50, 2000));
  EXPECT_THROW(getAreaFromPt({10.0, 45.0}, Theme::Doq, Scale{10}, 100, 100), DomainError);
}

/// Brute force: classify every pixel of the image by its center and
/// compare the corner and center pixels with the AreaBoundingBox.
void expectMatchesPixelOracle(const UtmPt& c, int scale, int w, int h) {
  const auto abb = areaFromUtm(c, Theme::Doq, Scale{scale}, w, h, PlanarProjector{});
  const double r = metersPerPixel(Scale{scale});
  const double L = 200 * r;
  const double left = c.easting - w * r / 2, top = c.northing + h * r / 2;
  auto check = [&](const AreaCoordinate& ac, int col, int row) {
    const double e = left + (col + 0.5) * r, n = top - (row + 0.5) * r;
    const auto x = static_cast<std::int64_t>(std::floor(e / L));
    const auto y = static_cast<std::int64_t>(std::floor(n / L));
    EXPECT_EQ(ac.tileMeta.id.x, x);
    EXPECT_EQ(ac.tileMeta.id.y, y);
    EXPECT_EQ(ac.offset.xOffset, static_cast<int>(std::floor((e - x * L) / r)));
    EXPECT_EQ(ac.offset.yOffset, static_cast<int>(std::floor(((y + 1) * L - n) / r)));
  };
  check(abb.northWest, 0, 0);
  check(abb.northEast, w - 1, 0);
  check(abb.southWest, 0, h - 1);
  check(abb.southEast, w - 1, h - 1);
  check(abb.center, w / 2, h / 2);
  EXPECT_GE((abb.northEast.tileMeta.id.x - abb.northWest.tileMeta.id.x + 1) * 200, w + abb.northWest.offset.xOffset);
  EXPECT_GE((abb.northWest.tileMeta.id.y - abb.southWest.tileMeta.id.y + 1) * 200, h + abb.northWest.offset.yOffset);
}

TEST(AreaFromUtm, RandomPixelAlignedCentersMatchOracle) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> scale(10, 16), size(50, 2000), px(0, 200 * 40);
  for (int i = 0; i < 500; ++i) {
    const int s = scale(rng);
    const int w = size(rng), h = size(rng);
    const double r = metersPerPixel(Scale{s});
    // Center on a half-pixel lattice so odd and even sizes stay pixel aligned.
    const UtmPt c{10, (100000 + px(rng)) * r + (w % 2) * r / 2, (2000000 + px(rng)) * r + (h % 2) * r / 2};
    expectMatchesPixelOracle(c, s, w, h);
  }
}

TEST(AreaFromUtm, OffsetsInRangeForArbitraryCenters) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> e(300000, 700000), n(2e6, 6e6);
  std::uniform_int_distribution<int> size(50, 2000);
  for (int i = 0; i < 500; ++i) {
    const auto abb = areaFromUtm({10, e(rng), n(rng)}, Theme::Drg, Scale{12}, size(rng), size(rng), PlanarProjector{});
    for (const AreaCoordinate* ac : {&abb.northWest, &abb.northEast, &abb.southWest, &abb.southEast, &abb.center}) {
      EXPECT_GE(ac->offset.xOffset, 0);
      EXPECT_LT(ac->offset.xOffset, 200);
      EXPECT_GE(ac->offset.yOffset, 0);
      EXPECT_LT(ac->offset.yOffset, 200);
      EXPECT_EQ(ac->tileMeta.id.theme, Theme::Drg);
      EXPECT_EQ(ac->tileMeta.id.scale.code, 12);
    }
    EXPECT_LE(abb.northWest.tileMeta.id.x, abb.northEast.tileMeta.id.x);
    EXPECT_LE(abb.southWest.tileMeta.id.y, abb.northWest.tileMeta.id.y);
  }
}

TEST(GeorefFor, RecoversImageOrigin) {
  const auto abb = areaFromUtm({10, 551000, 4181050}, Theme::Doq, Scale{10}, 600, 400, PlanarProjector{});
  const PixelGeoref g = georefFor(abb);
  EXPECT_DOUBLE_EQ(g.leftEasting, 550700);
  EXPECT_DOUBLE_EQ(g.topNorthing, 4181250);
}

TEST(TileMetaGeometry, CornersAreProjectedExtentCorners) {
  const TileMeta m = tileMetaGeometry(tile(10, 2755, 20900), PlanarProjector{});
  EXPECT_DOUBLE_EQ(m.nw.lon, 551000);
  EXPECT_DOUBLE_EQ(m.nw.lat, 4180200);
  EXPECT_DOUBLE_EQ(m.se.lon, 551200);
  EXPECT_DOUBLE_EQ(m.se.lat, 4180000);
  EXPECT_DOUBLE_EQ(m.center.lon, 551100);
  EXPECT_FALSE(m.captureDate.has_value());
}

}  // namespace
}  // namespace terra
