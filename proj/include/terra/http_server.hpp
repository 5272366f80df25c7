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

// cpp-httplib binding for Service. GET reads the query string; POST also
// accepts application/x-www-form-urlencoded bodies.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "terra/service.hpp"

namespace terra {

struct ServerConfig {
  std::filesystem::path storePath = "store";
  std::filesystem::path gazetteerPath;
  std::string host = "127.0.0.1";
  int port = 8080;
  bool testMode = false;

  /// Reads an optional JSON config file, then applies TERRA_STORE,
  /// TERRA_GAZETTEER, TERRA_BIND (host:port) and TERRA_TEST_MODE.
  static ServerConfig load(const std::optional<std::filesystem::path>& file) {
    ServerConfig c;
    if (file) {
      std::ifstream in(*file);
      if (!in) throw IoError("cannot read config file " + file->filename().string());
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception&) {
        throw ValidationError("config file is not valid JSON", "config");
      }
      if (j.contains("store")) c.storePath = j["store"].get<std::string>();
      if (j.contains("gazetteer")) c.gazetteerPath = j["gazetteer"].get<std::string>();
      if (j.contains("bind")) c.setBind(j["bind"].get<std::string>());
      if (j.contains("testMode")) c.testMode = j["testMode"].get<bool>();
    }
    if (const char* v = std::getenv("TERRA_STORE")) c.storePath = v;
    if (const char* v = std::getenv("TERRA_GAZETTEER")) c.gazetteerPath = v;
    if (const char* v = std::getenv("TERRA_BIND")) c.setBind(v);
    if (const char* v = std::getenv("TERRA_TEST_MODE")) {
      const std::string s = v;
      c.testMode = s == "1" || iequals(s, "true") || iequals(s, "yes");
    }
    return c;
  }

  void setBind(const std::string& bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw ValidationError("bind must be host:port", "bind");
    const auto p = parseInteger(bind.substr(colon + 1));
    if (!p || *p < 0 || *p > 65535) throw ValidationError("bind port out of range", "bind");
    host = bind.substr(0, colon);
    port = static_cast<int>(*p);
  }
};

inline Params toParams(const httplib::Request& req) {
  Params p;
  for (const auto& [k, v] : req.params) p.insert_or_assign(k, v);
  return p;
}

class HttpServer {
 public:
  explicit HttpServer(const Service& service) : service_(service) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      const Response r = service_.handle(req.path, toParams(req));
      res.status = r.status;
      for (const auto& [k, v] : r.headers) res.set_header(k, v);
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Expose-Headers", kErrorHeader);
      res.set_content(r.body, r.contentType);
    };
    server_.Get(R"(/[A-Za-z.]+)", handler);
    server_.Post(R"(/[A-Za-z.]+)", handler);
  }

  ~HttpServer() { stop(); }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  int start(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return bound;
  }

  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port) {
    if (!server_.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  const Service& service_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace terra
