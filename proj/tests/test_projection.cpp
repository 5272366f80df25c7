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

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "terra/projection.hpp"

namespace terra {
namespace {

using namespace terra::projection;

struct GoldenRow {
  double lon, lat;
  int zone;
  double easting, northing;
};

std::vector<GoldenRow> loadGolden() {
  std::ifstream in(testing::sourcePath("tests/data/utm_golden.csv"));
  std::vector<GoldenRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    GoldenRow r{};
    ss >> r.lon >> r.lat >> r.zone >> r.easting >> r.northing;
    rows.push_back(r);
  }
  return rows;
}

TEST(UtmZone, Examples) {
  EXPECT_EQ(utmZoneForLongitude(-180), 1);
  EXPECT_EQ(utmZoneForLongitude(-122.4), 10);
  EXPECT_EQ(utmZoneForLongitude(-66.1), 19);
  EXPECT_EQ(utmZoneForLongitude(179.999), 60);
  EXPECT_THROW(utmZoneForLongitude(180), DomainError);
  EXPECT_THROW(utmZoneForLongitude(-180.5), DomainError);
}

TEST(LonLatToUtm, CentralMeridianAtEquator) {
  const UtmPt u = lonLatToUtm({-123, 0});
  EXPECT_EQ(u.zone, 10);
  EXPECT_NEAR(u.easting, 500000.0, 1e-6);
  EXPECT_NEAR(u.northing, 0.0, 1e-6);
}

TEST(LonLatToUtm, SanFrancisco) {
  const UtmPt u = lonLatToUtm({-122.4194, 37.7749});
  EXPECT_EQ(u.zone, 10);
  EXPECT_NEAR(u.easting, 551130.768482, 0.005);
  EXPECT_NEAR(u.northing, 4180998.881389, 0.005);
}

TEST(LonLatToUtm, ForcedZoneAndErrors) {
  const UtmPt u = lonLatToUtm({-120.5, 40}, 10);
  EXPECT_EQ(u.zone, 10);
  EXPECT_NEAR(u.easting, 713400, 100);  // 2.5 degrees east of the zone-10 meridian
  EXPECT_THROW(lonLatToUtm({-122, 85}), DomainError);
  EXPECT_THROW(lonLatToUtm({-122, -1}), DomainError);
  EXPECT_THROW(lonLatToUtm({-122, 40}, 61), DomainError);
}

TEST(UtmToLonLat, CentralMeridianAtEquator) {
  const LonLatPt p = utmToLonLat({10, 500000, 0});
  EXPECT_NEAR(p.lon, -123.0, 1e-12);
  EXPECT_NEAR(p.lat, 0.0, 1e-12);
}

TEST(UtmToLonLat, SanityBand) {
  EXPECT_THROW(utmToLonLat({10, 160000, 4e6}), DomainError);
  EXPECT_THROW(utmToLonLat({10, 840000, 4e6}), DomainError);
  EXPECT_THROW(utmToLonLat({10, 500000, -1}), DomainError);
  EXPECT_THROW(utmToLonLat({0, 500000, 4e6}), DomainError);
}

TEST(Projection, GoldenTableWithinFiveMillimeters) {
  const auto rows = loadGolden();
  ASSERT_GE(rows.size(), 80u);
  std::map<int, int> perZone;
  for (const auto& r : rows) {
    const UtmPt u = lonLatToUtm({r.lon, r.lat}, r.zone);
    EXPECT_NEAR(u.easting, r.easting, 0.005) << r.lon << "," << r.lat;
    EXPECT_NEAR(u.northing, r.northing, 0.005) << r.lon << "," << r.lat;
    if (r.easting > kMinInverseEasting && r.easting < kMaxInverseEasting) {
      const LonLatPt back = utmToLonLat({r.zone, r.easting, r.northing});
      EXPECT_NEAR(back.lon, r.lon, 1e-7);
      EXPECT_NEAR(back.lat, r.lat, 1e-7);
    }
    ++perZone[r.zone];
  }
  for (int zone : {10, 13, 17}) EXPECT_GE(perZone[zone], 5) << zone;
}

TEST(Projection, RoundTripProperty) {
  std::mt19937_64 rng(20020);
  std::uniform_int_distribution<int> zone(3, 20);
  std::uniform_real_distribution<double> dlon(-3.0, 3.0), lat(20.0, 60.0);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const int z = zone(rng);
    const LonLatPt p{centralMeridian(z) + dlon(rng), lat(rng)};
    const LonLatPt q = utmToLonLat(lonLatToUtm(p, z));
    worst = std::max({worst, std::abs(q.lon - p.lon), std::abs(q.lat - p.lat)});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(worst, 1e-9);
  EXPECT_LT(secs, 1.0);
}

TEST(Projection, CentralMeridianSymmetry) {
  for (int z = 3; z <= 20; ++z) {
    for (double lat = 1; lat < 84; lat += 7.3) {
      EXPECT_NEAR(lonLatToUtm({centralMeridian(z), lat}).easting, 500000.0, 1e-6);
      const UtmPt w = lonLatToUtm({centralMeridian(z) - 1.5, lat});
      const UtmPt e = lonLatToUtm({centralMeridian(z) + 1.5, lat});
      EXPECT_NEAR(w.easting + e.easting, 1e6, 1e-6);
      EXPECT_NEAR(w.northing, e.northing, 1e-6);
    }
  }
}

TEST(Projection, Monotonicity) {
  for (double lat = 20; lat <= 60; lat += 5) {
    double prev = -1;
    for (double lon = -125.99; lon < -120.0; lon += 0.05) {
      const double e = lonLatToUtm({lon, lat}, 10).easting;
      EXPECT_GT(e, prev);
      prev = e;
    }
  }
  for (double lon = -125.5; lon < -120.0; lon += 1.0) {
    double prev = -1;
    for (double lat = 0.5; lat < 84; lat += 0.5) {
      const double n = lonLatToUtm({lon, lat}, 10).northing;
      EXPECT_GT(n, prev);
      prev = n;
    }
  }
}

}  // namespace
}  // namespace terra
