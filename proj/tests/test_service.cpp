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

#include <atomic>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "terra/service.hpp"

namespace terra {
namespace {

Canvas decodeBody(const Response& r) {
  const std::span bytes(reinterpret_cast<const std::uint8_t*>(r.body.data()), r.body.size());
  const auto enc = detectEncoding(bytes);
  if (!enc) throw DecodeError("body is not an image");
  return decode(bytes, *enc);
}

nlohmann::json bodyJson(const Response& r) { return nlohmann::json::parse(r.body); }

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    testing::buildFixtureStore(dir_->path());
    store_ = new TileStore(dir_->path());
    gazetteer_ = new Gazetteer();
    gazetteer_->loadFile(testing::placesFixture());
    service_ = new Service(*store_, gazetteer_, true);
  }
  static void TearDownTestSuite() {
    delete service_;
    delete gazetteer_;
    delete store_;
    delete dir_;
  }

  static Response call(std::string_view endpoint, const Params& p) { return service_->handle(endpoint, p); }

  static Params sfArea(int w, int h) {
    const LonLatPt c = scenarioCenter();
    return {{"theme", "1"}, {"scale", "10"}, {"lon", std::to_string(c.lon)}, {"lat", std::to_string(c.lat)},
            {"width", std::to_string(w)}, {"height", std::to_string(h)}};
  }

  /// Lon/lat of UTM (10, 551000, 4181050), the 600x400 scenario center.
  static LonLatPt scenarioCenter() { return projection::utmToLonLat({10, 551000, 4181050}); }

  static Params wms(Params extra) {
    Params p{{"Version", "1.1.1"}, {"Request", "GetMap"}, {"Service", "WMS"}, {"Layers", "DOQ"},
             {"Styles", ""}, {"SRS", "EPSG:26910"}, {"BBOX", "550700,4180850,551300,4181250"},
             {"Width", "300"}, {"Height", "200"}, {"Format", "image/png"}};
    for (auto& [k, v] : extra) p[k] = v;
    return p;
  }

  static inline testing::TempDir* dir_ = nullptr;
  static inline TileStore* store_ = nullptr;
  static inline Gazetteer* gazetteer_ = nullptr;
  static inline Service* service_ = nullptr;
};

TEST_F(ServiceTest, GetTileReturnsStoredBytes) {
  const TileId id{Theme::Doq, Scale{10}, Scene{10}, 2754, 20905};
  const Response r = call("GetTile", {{"theme", "1"}, {"scale", "10"}, {"scene", "10"}, {"x", "2754"}, {"y", "20905"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.contentType, "image/png");
  const auto stored = store_->getTile(id).bytes;
  EXPECT_EQ(r.body, std::string(stored.begin(), stored.end()));
}

TEST_F(ServiceTest, GetTileErrors) {
  const Response ocean = call("GetTile", {{"theme", "1"}, {"scale", "10"}, {"scene", "10"}, {"x", "1"}, {"y", "1"}});
  EXPECT_EQ(ocean.status, 404);
  EXPECT_EQ(bodyJson(ocean)["error"]["code"], "not_found");
  const Response bad = call("GetTile", {{"theme", "1"}, {"scale", "99"}, {"scene", "10"}, {"x", "1"}, {"y", "1"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bodyJson(bad)["error"]["code"], "validation");
  EXPECT_EQ(bodyJson(bad)["error"]["parameter"], "scale");
  EXPECT_EQ(call("NoSuchMethod", {}).status, 404);
}

TEST_F(ServiceTest, ParameterNamesAreCaseInsensitive) {
  const Response r = call("gettile", {{"THEME", "1"}, {"Scale", "10"}, {"sCeNe", "10"}, {"X", "2754"}, {"Y", "20905"}});
  EXPECT_EQ(r.status, 200);
}

TEST_F(ServiceTest, GetTileMetaFromLonLatPt) {
  const Response sf = call("GetTileMetaFromLonLatPt", {{"theme", "1"}, {"scale", "10"}, {"lon", "-122.4194"}, {"lat", "37.7749"}});
  ASSERT_EQ(sf.status, 200);
  const TileMeta m = bodyJson(sf).get<TileMeta>();
  const UtmPt u = projection::lonLatToUtm({-122.4194, 37.7749});
  EXPECT_EQ(m.id.x, static_cast<std::int64_t>(u.easting / 200));
  EXPECT_EQ(m.id.y, static_cast<std::int64_t>(u.northing / 200));
  EXPECT_EQ(m.captureDate, testing::kFixtureDate);

  const Response eq = call("GetTileMetaFromLonLatPt", {{"theme", "1"}, {"scale", "10"}, {"lon", "-123"}, {"lat", "0"}});
  ASSERT_EQ(eq.status, 200);
  const TileMeta e = bodyJson(eq).get<TileMeta>();
  EXPECT_EQ(e.id.x, 2500);
  EXPECT_EQ(e.id.y, 0);
  EXPECT_FALSE(e.captureDate.has_value());
  EXPECT_EQ(bodyJson(eq)["captureDate"], "unknown");

  const Response polar = call("GetTileMetaFromLonLatPt", {{"theme", "1"}, {"scale", "10"}, {"lon", "-123"}, {"lat", "89"}});
  EXPECT_EQ(polar.status, 422);
  EXPECT_EQ(bodyJson(polar)["error"]["code"], "domain");
}

TEST_F(ServiceTest, GetAreaFromPtScenario) {
  const Response r = call("GetAreaFromPt", sfArea(600, 400));
  ASSERT_EQ(r.status, 200);
  const AreaBoundingBox abb = bodyJson(r).get<AreaBoundingBox>();
  EXPECT_EQ(abb.northWest.tileMeta.id.x, 2753);
  EXPECT_EQ(abb.northWest.tileMeta.id.y, 20906);
  EXPECT_EQ(abb.northWest.offset.xOffset, 100);
  EXPECT_EQ(abb.northWest.offset.yOffset, 150);
  EXPECT_EQ(abb.northEast.tileMeta.id.x, 2756);
  EXPECT_EQ(abb.southWest.tileMeta.id.y, 20904);
  EXPECT_EQ(abb.center.tileMeta.captureDate, testing::kFixtureDate);
  ASSERT_TRUE(abb.nearestPlace.has_value());
  EXPECT_EQ(abb.nearestPlace->name, "San Francisco");
  EXPECT_GE(r.body.size(), 1024u);
  EXPECT_LE(r.body.size(), 10240u);
}

TEST_F(ServiceTest, GetAreaFromPtSingleTileAndBounds) {
  const LonLatPt mid = projection::utmToLonLat({10, 551100, 4181100});
  Params p{{"theme", "2"}, {"scale", "10"}, {"lon", std::to_string(mid.lon)}, {"lat", std::to_string(mid.lat)},
           {"width", "200"}, {"height", "200"}};
  const AreaBoundingBox abb = bodyJson(call("GetAreaFromPt", p)).get<AreaBoundingBox>();
  EXPECT_EQ(abb.northWest.tileMeta.id, abb.southEast.tileMeta.id);
  EXPECT_EQ(abb.northWest.offset.xOffset, 0);
  EXPECT_EQ(abb.center.offset.yOffset, 100);

  EXPECT_EQ(call("GetAreaFromPt", sfArea(2001, 400)).status, 400);
  EXPECT_EQ(bodyJson(call("GetAreaFromPt", sfArea(2001, 400)))["error"]["parameter"], "width");
  Params scale9 = sfArea(600, 400);
  scale9["scale"] = "9";
  EXPECT_EQ(call("GetAreaFromPt", scale9).status, 400);
  Params europe = sfArea(600, 400);
  europe["lon"] = "10";
  EXPECT_EQ(call("GetAreaFromPt", europe).status, 422);
}

TEST_F(ServiceTest, PlaceEndpoints) {
  const Response sf = call("GetPlaceFacts", {{"city", "San Francisco"}, {"state", "California"},
                                             {"country", "United States of America"}});
  ASSERT_EQ(sf.status, 200);
  EXPECT_EQ(bodyJson(sf).size(), 1u);
  EXPECT_GT(bodyJson(call("GetPlaceFacts", {{"state", "California"}})).size(), 1u);
  EXPECT_TRUE(bodyJson(call("GetPlaceFacts", {{"city", "Nowhereville"}})).empty());
  EXPECT_EQ(call("GetPlaceFacts", {}).status, 400);

  const Response list = call("GetPlaceList", {{"ulLon", "-122.43"}, {"ulLat", "37.78"}, {"lrLon", "-122.41"},
                                              {"lrLat", "37.77"}, {"maxItems", "5"}});
  ASSERT_EQ(list.status, 200);
  EXPECT_EQ(bodyJson(list).size(), 1u);
  EXPECT_EQ(call("GetPlaceList", {{"ulLon", "-122"}, {"ulLat", "37"}, {"lrLon", "-121"}, {"lrLat", "38"}}).status, 400);
}

TEST_F(ServiceTest, GetImageAreaMatchesComposition) {
  const LonLatPt c = scenarioCenter();
  Params p{{"T", "1"}, {"S", "10"}, {"Lon", std::to_string(c.lon)}, {"Lat", std::to_string(c.lat)},
           {"W", "600"}, {"H", "400"}};
  const Response r = call("GetImageArea", p);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.contentType, "image/png");
  EXPECT_FALSE(r.headers.contains(kErrorHeader));
  const Canvas img = decodeBody(r);
  ASSERT_EQ(img.width(), 600);
  ASSERT_EQ(img.height(), 400);
  // Pixel (0,0) is pixel (100,150) of raster tile (2753, 20906).
  const Canvas raster = testing::fixtureRaster();
  const int ox = static_cast<int>(2753 - testing::kFixtureX0) * 200;
  const int oy = static_cast<int>(testing::kFixtureY0 + testing::kFixtureTiles - 1 - 20906) * 200;
  EXPECT_EQ(img.at(0, 0), raster.at(ox + 100, oy + 150));
  EXPECT_EQ(img.at(599, 399), raster.at(ox + 699, oy + 549));

  Params g0 = p;
  g0["G"] = "0";
  g0["GC"] = "FFFF0000";
  EXPECT_EQ(decodeBody(call("GetImageArea", g0)), img);

  Params grid = p;
  grid["G"] = "1";
  grid["GC"] = "FFFF0000";
  const Canvas gridded = decodeBody(call("GetImageArea", grid));
  EXPECT_EQ(gridded.at(100, 10), (Rgb{255, 0, 0}));  // easting 550800

  Params logo = p;
  logo["LOGO"] = "1";
  logo["FC"] = "80FF0000";
  const Canvas withLogo = decodeBody(call("GetImageArea", logo));
  EXPECT_NE(withLogo, img);
  const Rgb under = img.at(600 - 4 - 48, 400 - 4 - 24), over = withLogo.at(600 - 4 - 48, 400 - 4 - 24);
  EXPECT_EQ(over, blend(under, Argb::parse("80FF0000")));
  EXPECT_EQ(withLogo.at(10, 10), img.at(10, 10));
}

TEST_F(ServiceTest, GetImageAreaErrorsBecomeMessageImages) {
  const Response r = call("GetImageArea", {{"T", "1"}, {"S", "10"}, {"Lon", "-122.4"}, {"Lat", "37.7"},
                                           {"W", "49"}, {"H", "300"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.headers.at(kErrorHeader), "validation");
  const Canvas img = decodeBody(r);
  EXPECT_EQ(img.width(), 49);
  EXPECT_EQ(img.height(), 300);
  const Response badColor = call("GetImageArea", {{"T", "1"}, {"S", "10"}, {"Lon", "-122.4"}, {"Lat", "37.7"},
                                                  {"W", "100"}, {"H", "100"}, {"GC", "red"}});
  EXPECT_EQ(badColor.headers.at(kErrorHeader), "validation");
}

TEST_F(ServiceTest, WmsCapabilitiesNeedOnlyThreeParameters) {
  const Response r = call("OgcMap", {{"Version", "1.1.1"}, {"Request", "GetCapabilities"}, {"Service", "wms"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.contentType, kCapabilitiesType);
  for (const char* s : {"DOQ", "DRG", "EPSG:26903", "EPSG:26920", "image/jpeg", "UtmGrid", "GeoGrid"}) {
    EXPECT_NE(r.body.find(s), std::string::npos) << s;
  }
  const Response missing = call("OgcMap", {{"Request", "GetCapabilities"}, {"Service", "wms"}});
  EXPECT_EQ(missing.contentType, kServiceExceptionType);
}

TEST_F(ServiceTest, NativeScaleSelection) {
  EXPECT_EQ(nativeScaleFor(683.25 / 60).code, 13);
  EXPECT_EQ(nativeScaleFor(1.0).code, 10);
  EXPECT_EQ(nativeScaleFor(0.3).code, 10);
  EXPECT_EQ(nativeScaleFor(1.5).code, 10);  // tie goes to the finer scale
  EXPECT_EQ(nativeScaleFor(1000).code, 16);

  const Response r = call("OgcMap", wms({{"BBOX", "551000,4180900,551683.25,4181350"}, {"Width", "60"},
                                         {"Height", "50"}}));
  ASSERT_EQ(r.contentType, "image/png") << r.body;
  const Canvas img = decodeBody(r);
  EXPECT_EQ(img.width(), 60);
  EXPECT_EQ(img.height(), 50);
}

TEST_F(ServiceTest, WmsGetMapComposesAtNativeScale) {
  const Canvas img = decodeBody(call("OgcMap", wms({{"Width", "600"}, {"Height", "400"}})));
  const Canvas direct = service_->renderArea(
      areaFromUtm({10, 551000, 4181050}, Theme::Doq, Scale{10}, 600, 400), RenderStyle{});
  EXPECT_EQ(img, direct);
  const Response jpeg = call("OgcMap", wms({{"Format", "image/jpeg"}}));
  EXPECT_EQ(jpeg.contentType, "image/jpeg");
  const Canvas gridded = decodeBody(call("OgcMap", wms({{"Styles", "UtmGrid"}, {"Width", "600"}, {"Height", "400"}})));
  EXPECT_NE(gridded, img);
}

TEST_F(ServiceTest, WmsExceptionStyles) {
  const Response xml = call("OgcMap", wms({{"Width", "49"}}));
  EXPECT_EQ(xml.contentType, kServiceExceptionType);
  EXPECT_NE(xml.body.find("<ServiceExceptionReport"), std::string::npos);
  EXPECT_NE(xml.body.find("InvalidParameterValue"), std::string::npos);

  const Response blank = call("OgcMap", wms({{"Width", "49"}, {"Exceptions", "se_blank"}}));
  const Canvas b = decodeBody(blank);
  EXPECT_EQ(b.width(), 49);
  EXPECT_EQ(b.height(), 200);
  EXPECT_EQ(b, Canvas(49, 200, kMessageBackground));

  const Response inImage = call("OgcMap", wms({{"Width", "49"}, {"Exceptions", "application/vnd.ogc.se_inimage"}}));
  const Canvas m = decodeBody(inImage);
  EXPECT_EQ(m.width(), 49);
  EXPECT_EQ(m, renderMessageImage("Width 49 outside [50, 2000]", 49, 200));

  for (auto [k, v] : {std::pair{"SRS", "EPSG:26921"}, std::pair{"SRS", "EPSG:4326"}, std::pair{"Layers", "XYZ"},
                      std::pair{"Version", "1.3.0"}, std::pair{"Format", "image/tiff"}, std::pair{"BBOX", "1,2,3"},
                      std::pair{"Styles", "Fancy"}, std::pair{"Height", "2001"}}) {
    const Response e = call("OgcMap", wms({{k, v}}));
    EXPECT_EQ(e.contentType, kServiceExceptionType) << k << "=" << v;
    EXPECT_TRUE(e.headers.contains(kErrorHeader));
  }
}

TEST_F(ServiceTest, ProductionModeRejectsPngAndServesJpeg) {
  const Service production(*store_, gazetteer_, false);
  const Response png = production.handle("OgcMap", wms({}));
  EXPECT_EQ(png.contentType, kServiceExceptionType);
  const Response jpeg = production.handle("OgcMap", wms({{"Format", "image/jpeg"}}));
  EXPECT_EQ(jpeg.contentType, "image/jpeg");
  const LonLatPt c = scenarioCenter();
  const Response area = production.handle("GetImageArea", {{"T", "1"}, {"S", "10"}, {"Lon", std::to_string(c.lon)},
                                                          {"Lat", std::to_string(c.lat)}, {"W", "600"}, {"H", "400"}});
  EXPECT_EQ(area.contentType, "image/jpeg");
}

TEST_F(ServiceTest, ResponsesAreRepeatable) {
  const std::string digest = store_->manifestDigest();
  const Params p = sfArea(600, 400);
  const Response a = call("GetAreaFromPt", p);
  call("GetPlaceFacts", {{"city", "Oakland"}});
  call("OgcMap", wms({}));
  const Response b = call("GetAreaFromPt", p);
  EXPECT_EQ(a.body, b.body);
  EXPECT_EQ(store_->manifestDigest(), digest);
}

TEST(RenderGate, NeverAdmitsMoreThanItsSlots) {
  for (unsigned slots : {1u, 2u, 3u}) {
    RenderGate gate(slots);
    std::atomic<int> inside{0}, peak{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        for (int i = 0; i < 20; ++i) {
          const RenderGate::Pass pass(gate);
          const int now = ++inside;
          int prev = peak.load();
          while (now > prev && !peak.compare_exchange_weak(prev, now)) {
          }
          std::this_thread::sleep_for(std::chrono::microseconds(200));
          --inside;
        }
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_LE(peak.load(), static_cast<int>(slots));
    EXPECT_GE(peak.load(), 1);
  }
  EXPECT_EQ(RenderGate(0).slots(), 1u);
}

}  // namespace
}  // namespace terra
