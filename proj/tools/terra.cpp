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

// terra: command-line front end for the tile store, the HTTP service and
// the client SDK.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "terra/client.hpp"
#include "terra/gazetteer.hpp"
#include "terra/http_server.hpp"
#include "terra/projection.hpp"
#include "terra/raster_io.hpp"
#include "terra/service.hpp"
#include "terra/tile_store.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTransport = 2;
constexpr int kExitService = 3;

terra::Theme parseTheme(const std::string& s) {
  if (s == "1" || terra::iequals(s, "DOQ")) return terra::Theme::Doq;
  if (s == "2" || terra::iequals(s, "DRG")) return terra::Theme::Drg;
  throw terra::ValidationError("theme must be DOQ, DRG, 1 or 2", "theme");
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

terra::HttpServer* gServer = nullptr;

extern "C" void onSignal(int) {
  if (gServer) gServer->stop();
}

struct ServeArgs {
  std::string config, store, gazetteer, bind;
  bool testMode = false;
};

int runServe(const ServeArgs& a) {
  auto cfg = terra::ServerConfig::load(a.config.empty() ? std::nullopt
                                                        : std::optional<std::filesystem::path>(a.config));
  if (!a.store.empty()) cfg.storePath = a.store;
  if (!a.gazetteer.empty()) cfg.gazetteerPath = a.gazetteer;
  if (!a.bind.empty()) cfg.setBind(a.bind);
  if (a.testMode) cfg.testMode = true;

  const terra::TileStore store(cfg.storePath);
  terra::Gazetteer gazetteer;
  const terra::Gazetteer* gz = nullptr;
  if (!cfg.gazetteerPath.empty()) {
    const auto report = gazetteer.loadFile(cfg.gazetteerPath);
    for (const auto& d : report.diagnostics) std::cerr << "gazetteer: " << d << "\n";
    std::cerr << "gazetteer: " << report.loaded << " places\n";
    gz = &gazetteer;
  }
  const terra::Service service(store, gz, cfg.testMode);
  terra::HttpServer server(service);
  gServer = &server;
  std::signal(SIGINT, onSignal);
  std::signal(SIGTERM, onSignal);
  std::cerr << "serving " << store.tiles().size() << " tiles on " << cfg.host << ":" << cfg.port << "\n";
  server.run(cfg.host, cfg.port);
  gServer = nullptr;
  return kExitOk;
}

struct IngestArgs {
  std::string raster, placement, theme, store;
  bool lossless = false;
};

int runIngest(const IngestArgs& a) {
  const auto bytes = terra::raster_io::readFile(a.placement);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception&) {
    throw terra::ValidationError("placement sidecar is not valid JSON", "placement");
  }
  const auto placement = terra::placementFromJson(j);
  const terra::Canvas raster = terra::raster_io::readImage(a.raster);
  terra::TileStore store(a.store, terra::StoreOptions{.lossless = a.lossless, .beforeTileWrite = {}});
  std::cerr << "ingesting " << raster.width() << "x" << raster.height() << " raster\n";
  const std::size_t n = store.ingestRaster(raster, placement, parseTheme(a.theme));
  std::cout << "ingested " << n << " tiles\n";
  return kExitOk;
}

struct PyramidArgs {
  std::string theme, store;
  int baseScale = 0;
};

int runBuildPyramid(const PyramidArgs& a) {
  terra::TileStore store(a.store);
  const terra::Theme theme = parseTheme(a.theme);
  int base = a.baseScale;
  if (base == 0) {
    for (const auto& id : store.tiles()) {
      if (id.theme == theme && (base == 0 || id.scale.code < base)) base = id.scale.code;
    }
    if (base == 0) throw terra::NotFoundError("store has no " + terra::themeName(theme) + " tiles");
  }
  const auto counts = store.buildPyramid(theme, terra::Scale{base}, [](terra::Scale s, std::size_t n) {
    std::cerr << "scale " << s.code << ": " << n << " tiles\n";
  });
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::cout << "scale " << base + static_cast<int>(i) << " " << counts[i] << "\n";
  }
  return kExitOk;
}

struct DownloadArgs {
  std::string url = "http://127.0.0.1:8080";
  double lon = 0, lat = 0;
  std::string theme = "DOQ";
  int scale = 10, width = 0, height = 0;
  std::string output;
  int grid = 0;
  std::string gridColor, borderColor, fontColor;
  int border = 0;
  bool logo = false;
  bool viaServer = false;
  std::string requestFile;
  int timeoutMs = 10000;
  int attempts = 3;
};

terra::Params imageAreaParams(const DownloadArgs& a) {
  terra::Params p{{"T", std::to_string(static_cast<int>(parseTheme(a.theme)))},
                  {"S", std::to_string(a.scale)},
                  {"Lon", fmt(a.lon, 9)},
                  {"Lat", fmt(a.lat, 9)},
                  {"W", std::to_string(a.width)},
                  {"H", std::to_string(a.height)}};
  if (a.grid > 0) p["G"] = std::to_string(a.grid);
  if (!a.gridColor.empty()) p["GC"] = a.gridColor;
  if (a.border > 0) p["B"] = std::to_string(a.border);
  if (!a.borderColor.empty()) p["BC"] = a.borderColor;
  if (!a.fontColor.empty()) p["FC"] = a.fontColor;
  if (a.logo) p["LOGO"] = "1";
  return p;
}

void writeReplayFile(const std::string& path, const terra::ServiceEndpoint& ep, const std::string& method,
                     const terra::Params& params) {
  nlohmann::json j = {{"baseUrl", ep.baseUrl}, {"method", method}, {"params", nlohmann::json::object()}};
  for (const auto& [k, v] : params) j["params"][k] = v;
  const std::string text = j.dump(2) + "\n";
  terra::raster_io::writeFile(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  std::cerr << "request saved to " << path << "\n";
}

int runDownload(const DownloadArgs& a) {
  const terra::Params params = imageAreaParams(a);
  const auto request = terra::ImageAreaRequest::parse(params);  // arg errors surface as usage errors

  terra::ServiceEndpoint ep;
  ep.baseUrl = a.url;
  ep.timeout = std::chrono::milliseconds(a.timeoutMs);
  ep.retry.maxAttempts = a.attempts;
  const terra::Client client(ep);
  const std::string replay = a.requestFile.empty() ? a.output + ".request.json" : a.requestFile;

  try {
    if (a.viaServer) {
      const auto r = client.getImageArea(params);
      if (r.serviceError) {
        std::cerr << "error: service reported " << *r.serviceError << "\n";
        return kExitService;
      }
      const std::span body(reinterpret_cast<const std::uint8_t*>(r.body.data()), r.body.size());
      const auto enc = terra::detectEncoding(body);
      if (!enc) throw terra::DecodeError("service returned an unrecognized image");
      terra::raster_io::writeImage(a.output, terra::decode(body, *enc));
      std::cout << "wrote " << a.output << "\n";
      return kExitOk;
    }
    const auto result = terra::downloadImage(client, request);
    for (const auto& id : result.missing) {
      std::cerr << "warning: tile " << terra::describe(id) << " not found, filled with gray\n";
    }
    terra::raster_io::writeImage(a.output, result.canvas);
    std::cout << "wrote " << a.output << " (" << result.tilesRequested << " tiles, " << result.missing.size()
              << " missing)\n";
    return kExitOk;
  } catch (const terra::TransportError&) {
    writeReplayFile(replay, ep, a.viaServer ? "GetImageArea" : "download-image", params);
    throw;
  }
}

int runConvert(const std::vector<std::string>& args) {
  auto num = [](const std::string& s, const char* name) {
    const auto v = terra::parseNumber(s);
    if (!v) throw terra::ValidationError(std::string(name) + " must be a number", name);
    return *v;
  };
  if (args.size() == 2) {
    const terra::UtmPt u = terra::projection::lonLatToUtm({num(args[0], "lon"), num(args[1], "lat")});
    std::cout << "zone " << u.zone << " easting " << fmt(u.easting, 3) << " northing " << fmt(u.northing, 3)
              << "\n";
    return kExitOk;
  }
  if (args.size() == 3) {
    const auto zone = terra::parseInteger(args[0]);
    if (!zone) throw terra::ValidationError("zone must be an integer", "zone");
    const terra::LonLatPt p = terra::projection::utmToLonLat(
        {static_cast<int>(*zone), num(args[1], "easting"), num(args[2], "northing")});
    std::cout << "lon " << fmt(p.lon, 9) << " lat " << fmt(p.lat, 9) << "\n";
    return kExitOk;
  }
  throw terra::ValidationError("convert takes <lon> <lat> or <zone> <easting> <northing>", "args");
}

struct SynthArgs {
  int width = 600, height = 400;
  unsigned seed = 1;
  std::string output;
  std::string placement;
  int zone = 10;
  double easting = 550600, northing = 4180800;
  int baseScale = 10;
  std::string date = "2001-06-15";
};

/// Writes a deterministic textured raster, optionally with a placement sidecar.
int runSynth(const SynthArgs& a) {
  if (a.width <= 0 || a.height <= 0) throw terra::ValidationError("size must be positive", "width");
  std::mt19937 rng(a.seed);
  std::uniform_int_distribution<int> noise(-12, 12);
  terra::Canvas c(a.width, a.height);
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      auto ch = [&](int base) { return static_cast<std::uint8_t>(std::clamp(base + noise(rng), 0, 255)); };
      c.set(x, y, {ch(40 + 160 * x / a.width), ch(40 + 160 * y / a.height), ch(((x / 25 + y / 25) % 2) ? 180 : 70)});
    }
  }
  terra::raster_io::writeImage(a.output, c);
  if (!a.placement.empty()) {
    const nlohmann::json j = {{"zone", a.zone},           {"originEasting", a.easting},
                              {"originNorthing", a.northing}, {"baseScale", a.baseScale},
                              {"captureDate", a.date}};
    const std::string text = j.dump(2) + "\n";
    terra::raster_io::writeFile(a.placement, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  }
  std::cout << "wrote " << a.output << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TerraTile imagery service tools"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serveCmd = app.add_subcommand("serve", "Run the HTTP service");
  serveCmd->add_option("--config", serve.config, "JSON config file");
  serveCmd->add_option("--store", serve.store, "Tile store directory");
  serveCmd->add_option("--gazetteer", serve.gazetteer, "Gazetteer TSV file");
  serveCmd->add_option("--bind", serve.bind, "host:port");
  serveCmd->add_flag("--test-mode", serve.testMode, "Serve lossless PNG images");

  IngestArgs ingest;
  auto* ingestCmd = app.add_subcommand("ingest", "Cut a georeferenced raster into tiles");
  ingestCmd->add_option("raster", ingest.raster, "Raster file (ppm, png, jpg, gif)")->required();
  ingestCmd->add_option("--placement", ingest.placement, "Placement sidecar JSON")->required();
  ingestCmd->add_option("--theme", ingest.theme, "DOQ or DRG")->required();
  ingestCmd->add_option("--store", ingest.store, "Tile store directory")->required();
  ingestCmd->add_flag("--lossless", ingest.lossless, "Store tiles as PNG");

  PyramidArgs pyramid;
  auto* pyramidCmd = app.add_subcommand("build-pyramid", "Build coarser levels from the finest one");
  pyramidCmd->add_option("--theme", pyramid.theme, "DOQ or DRG")->required();
  pyramidCmd->add_option("--store", pyramid.store, "Tile store directory")->required();
  pyramidCmd->add_option("--base-scale", pyramid.baseScale, "Base scale code (default: finest present)")
      ->check(CLI::Range(8, 23));

  DownloadArgs dl;
  auto* dlCmd = app.add_subcommand("download-image", "Compose a map image from served tiles");
  dlCmd->add_option("--url", dl.url, "Service base URL");
  dlCmd->add_option("--lon", dl.lon, "Center longitude")->required();
  dlCmd->add_option("--lat", dl.lat, "Center latitude")->required();
  dlCmd->add_option("--theme", dl.theme, "DOQ or DRG");
  dlCmd->add_option("--scale", dl.scale, "Scale code 10..16");
  dlCmd->add_option("--width", dl.width, "Width in pixels 50..2000")->required();
  dlCmd->add_option("--height", dl.height, "Height in pixels 50..2000")->required();
  dlCmd->add_option("-o,--output", dl.output, "Output image (.png, .jpg, .gif, .ppm)")->required();
  dlCmd->add_option("--grid", dl.grid, "UTM grid line width, 0 for none");
  dlCmd->add_option("--grid-color", dl.gridColor, "Grid color AARRGGBB");
  dlCmd->add_option("--border", dl.border, "Border width");
  dlCmd->add_option("--border-color", dl.borderColor, "Border color AARRGGBB");
  dlCmd->add_option("--font-color", dl.fontColor, "Logo color AARRGGBB");
  dlCmd->add_flag("--logo", dl.logo, "Draw the logo");
  dlCmd->add_flag("--via-server", dl.viaServer, "Compose on the server with one GetImageArea call");
  dlCmd->add_option("--request-file", dl.requestFile, "Where to save the request on transport failure");
  dlCmd->add_option("--timeout-ms", dl.timeoutMs, "Per-attempt timeout");
  dlCmd->add_option("--attempts", dl.attempts, "Attempts per request");

  std::vector<std::string> convertArgs;
  auto* convertCmd = app.add_subcommand("convert", "Convert lon lat to UTM, or zone easting northing to lon lat");
  convertCmd->add_option("values", convertArgs, "<lon> <lat> | <zone> <easting> <northing>")->required();
  convertCmd->allow_extras(false);

  SynthArgs synth;
  auto* synthCmd = app.add_subcommand("synth-raster", "Write a synthetic textured raster");
  synthCmd->add_option("-o,--output", synth.output, "Output image")->required();
  synthCmd->add_option("--width", synth.width, "Width");
  synthCmd->add_option("--height", synth.height, "Height");
  synthCmd->add_option("--seed", synth.seed, "Noise seed");
  synthCmd->add_option("--placement", synth.placement, "Also write a placement sidecar here");
  synthCmd->add_option("--zone", synth.zone, "Placement zone");
  synthCmd->add_option("--easting", synth.easting, "Placement origin easting (lower-left)");
  synthCmd->add_option("--northing", synth.northing, "Placement origin northing (lower-left)");
  synthCmd->add_option("--base-scale", synth.baseScale, "Placement scale code");
  synthCmd->add_option("--date", synth.date, "Capture date YYYY-MM-DD");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*serveCmd) return runServe(serve);
    if (*ingestCmd) return runIngest(ingest);
    if (*pyramidCmd) return runBuildPyramid(pyramid);
    if (*dlCmd) return runDownload(dl);
    if (*convertCmd) return runConvert(convertArgs);
    if (*synthCmd) return runSynth(synth);
  } catch (const terra::TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const terra::ServiceError& e) {
    std::cerr << "error: service: " << e.what() << "\n";
    return kExitService;
  } catch (const terra::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.get_subcommands().front()->help();
    return kExitUsage;
  } catch (const terra::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const terra::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitService;
  }
  return kExitUsage;
}
