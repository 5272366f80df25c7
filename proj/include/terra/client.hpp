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

// Client SDK for the method endpoints. Every method has a blocking form
// and a begin* form that returns a PendingCall immediately; the caller
// either polls the call or registers a completion callback.

#include <chrono>
#include <condition_variable>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "terra/codec.hpp"
#include "terra/error.hpp"
#include "terra/mosaic.hpp"
#include "terra/params.hpp"
#include "terra/tile_store.hpp"
#include "terra/wire.hpp"

namespace terra {

struct RetryPolicy {
  int maxAttempts = 3;
  /// Delay before attempt k+1 is backoff[min(k-1, size-1)].
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(100),
                                                 std::chrono::milliseconds(200),
                                                 std::chrono::milliseconds(400)};
};

struct ServiceEndpoint {
  std::string baseUrl = "http://127.0.0.1:8080";
  std::chrono::milliseconds timeout{10000};
  RetryPolicy retry;
};

/// The service could not be reached after every configured attempt.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error(message + " after " + std::to_string(attempts) + " attempt(s)"), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

enum class CallState { InFlight, Done, Failed };

template <class T>
class PendingCall {
 public:
  using Callback = std::function<void(const PendingCall&)>;

  CallState poll() const {
    std::lock_guard lock(state_->mutex);
    return state_->state;
  }

  /// Blocks until completion; returns the value or rethrows the failure.
  T end() const {
    std::unique_lock lock(state_->mutex);
    state_->cv.wait(lock, [&] { return state_->state != CallState::InFlight; });
    if (state_->state == CallState::Failed) std::rethrow_exception(state_->error);
    return *state_->value;
  }

  template <class Rep, class Period>
  bool waitFor(std::chrono::duration<Rep, Period> d) const {
    std::unique_lock lock(state_->mutex);
    return state_->cv.wait_for(lock, d, [&] { return state_->state != CallState::InFlight; });
  }

  /// Registers the completion callback. It runs exactly once: on the worker
  /// thread when the call finishes, or right here if it already has.
  void onComplete(Callback cb) const {
    std::unique_lock lock(state_->mutex);
    if (state_->callbackRegistered) throw StateError("completion callback already registered");
    state_->callbackRegistered = true;
    if (state_->state == CallState::InFlight) {
      state_->callback = std::move(cb);
      return;
    }
    lock.unlock();
    cb(*this);
  }

  static PendingCall start(std::function<T()> work) {
    PendingCall call;
    std::thread([call, work = std::move(work)]() mutable {
      std::optional<T> value;
      std::exception_ptr error;
      try {
        value.emplace(work());
      } catch (...) {
        error = std::current_exception();
      }
      Callback cb;
      {
        std::lock_guard lock(call.state_->mutex);
        if (error) {
          call.state_->error = error;
          call.state_->state = CallState::Failed;
        } else {
          call.state_->value = std::move(value);
          call.state_->state = CallState::Done;
        }
        cb = std::move(call.state_->callback);
      }
      call.state_->cv.notify_all();
      if (cb) cb(call);
    }).detach();
    return call;
  }

 private:
  struct State {
    mutable std::mutex mutex;
    std::condition_variable cv;
    CallState state = CallState::InFlight;
    std::optional<T> value;
    std::exception_ptr error;
    Callback callback;
    bool callbackRegistered = false;
  };

  PendingCall() : state_(std::make_shared<State>()) {}

  std::shared_ptr<State> state_;
};

struct RawResponse {
  int status = 0;
  std::string contentType;
  std::string body;
  std::optional<std::string> serviceError;  // value of X-Service-Error
};

class Client {
 public:
  explicit Client(ServiceEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    if (endpoint_.timeout.count() <= 0) throw ValidationError("timeout must be positive", "timeout");
    if (endpoint_.retry.maxAttempts < 1) throw ValidationError("attempts must be >= 1", "attempts");
  }

  const ServiceEndpoint& endpoint() const noexcept { return endpoint_; }

  /// One HTTP GET with the retry policy applied to transport failures.
  RawResponse call(const std::string& path, const Params& params) const {
    httplib::Params query;
    for (const auto& [k, v] : params) query.emplace(k, v);
    const auto& retry = endpoint_.retry;
    std::string lastError = "no response";
    for (int attempt = 1; attempt <= retry.maxAttempts; ++attempt) {
      httplib::Client http(endpoint_.baseUrl);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint_.timeout - secs);
      http.set_connection_timeout(secs.count(), usecs.count());
      http.set_read_timeout(secs.count(), usecs.count());
      http.set_write_timeout(secs.count(), usecs.count());
      if (auto res = http.Get(path, query, httplib::Headers{})) {
        RawResponse out;
        out.status = res->status;
        out.contentType = res->get_header_value("Content-Type");
        out.body = std::move(res->body);
        if (res->has_header(kErrorHeader)) out.serviceError = res->get_header_value(kErrorHeader);
        return out;
      } else {
        lastError = httplib::to_string(res.error());
      }
      if (attempt < retry.maxAttempts && !retry.backoff.empty()) {
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(attempt - 1), retry.backoff.size() - 1);
        std::this_thread::sleep_for(retry.backoff[idx]);
      }
    }
    throw TransportError(endpoint_.baseUrl + path + ": " + lastError, retry.maxAttempts);
  }

  TileBlob getTile(const TileId& id) const {
    RawResponse r = call("/GetTile", tileParams(id));
    if (r.status != 200) throwServiceError(r);
    const auto enc = encodingFromMediaType(r.contentType);
    if (!enc) throw ServiceError(ErrorCode::Internal, "unexpected tile media type " + r.contentType);
    return {id, *enc, std::vector<std::uint8_t>(r.body.begin(), r.body.end())};
  }

  TileMeta getTileMetaFromTileId(const TileId& id) const {
    return jsonCall<TileMeta>("/GetTileMetaFromTileId", tileParams(id));
  }

  TileMeta getTileMetaFromLonLatPt(Theme theme, Scale scale, const LonLatPt& p) const {
    return jsonCall<TileMeta>("/GetTileMetaFromLonLatPt", {{"theme", std::to_string(static_cast<int>(theme))},
                                                            {"scale", std::to_string(scale.code)},
                                                            {"lon", number(p.lon)},
                                                            {"lat", number(p.lat)}});
  }

  AreaBoundingBox getAreaFromPt(const LonLatPt& center, Theme theme, Scale scale, int width,
                                int height) const {
    return jsonCall<AreaBoundingBox>("/GetAreaFromPt", {{"theme", std::to_string(static_cast<int>(theme))},
                                                        {"scale", std::to_string(scale.code)},
                                                        {"lon", number(center.lon)},
                                                        {"lat", number(center.lat)},
                                                        {"width", std::to_string(width)},
                                                        {"height", std::to_string(height)}});
  }

  std::vector<PlaceFacts> getPlaceFacts(const Place& place) const {
    Params p;
    if (!place.city.empty()) p["city"] = place.city;
    if (!place.state.empty()) p["state"] = place.state;
    if (!place.country.empty()) p["country"] = place.country;
    return jsonCall<std::vector<PlaceFacts>>("/GetPlaceFacts", p);
  }

  std::vector<PlaceFacts> getPlaceList(const LonLatPt& upperLeft, const LonLatPt& lowerRight,
                                       int maxItems) const {
    return jsonCall<std::vector<PlaceFacts>>("/GetPlaceList", {{"ulLon", number(upperLeft.lon)},
                                                               {"ulLat", number(upperLeft.lat)},
                                                               {"lrLon", number(lowerRight.lon)},
                                                               {"lrLat", number(lowerRight.lat)},
                                                               {"maxItems", std::to_string(maxItems)}});
  }

  RawResponse getImageArea(const Params& p) const { return call("/GetImageArea", p); }
  RawResponse ogcMap(const Params& p) const { return call("/OgcMap", p); }

  PendingCall<TileBlob> beginGetTile(const TileId& id) const {
    return PendingCall<TileBlob>::start([c = *this, id] { return c.getTile(id); });
  }
  PendingCall<TileMeta> beginGetTileMetaFromTileId(const TileId& id) const {
    return PendingCall<TileMeta>::start([c = *this, id] { return c.getTileMetaFromTileId(id); });
  }
  PendingCall<TileMeta> beginGetTileMetaFromLonLatPt(Theme theme, Scale scale, const LonLatPt& p) const {
    return PendingCall<TileMeta>::start(
        [c = *this, theme, scale, p] { return c.getTileMetaFromLonLatPt(theme, scale, p); });
  }
  PendingCall<AreaBoundingBox> beginGetAreaFromPt(const LonLatPt& center, Theme theme, Scale scale,
                                                  int width, int height) const {
    return PendingCall<AreaBoundingBox>::start([c = *this, center, theme, scale, width, height] {
      return c.getAreaFromPt(center, theme, scale, width, height);
    });
  }
  PendingCall<std::vector<PlaceFacts>> beginGetPlaceFacts(const Place& place) const {
    return PendingCall<std::vector<PlaceFacts>>::start([c = *this, place] { return c.getPlaceFacts(place); });
  }
  PendingCall<std::vector<PlaceFacts>> beginGetPlaceList(const LonLatPt& ul, const LonLatPt& lr,
                                                         int maxItems) const {
    return PendingCall<std::vector<PlaceFacts>>::start(
        [c = *this, ul, lr, maxItems] { return c.getPlaceList(ul, lr, maxItems); });
  }

  static Params tileParams(const TileId& id) {
    return {{"theme", std::to_string(static_cast<int>(id.theme))},
            {"scale", std::to_string(id.scale.code)},
            {"scene", std::to_string(id.scene.zone)},
            {"x", std::to_string(id.x)},
            {"y", std::to_string(id.y)}};
  }

 private:
  static std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
  }

  [[noreturn]] static void throwServiceError(const RawResponse& r) {
    try {
      const auto j = nlohmann::json::parse(r.body).at("error");
      throw ServiceError(errorCodeFromName(j.at("code").get<std::string>()),
                         j.at("message").get<std::string>(), j.value("parameter", ""));
    } catch (const nlohmann::json::exception&) {
      throw ServiceError(ErrorCode::Internal, "HTTP " + std::to_string(r.status));
    }
  }

  template <class T>
  T jsonCall(const std::string& path, const Params& params) const {
    RawResponse r = call(path, params);
    if (r.status != 200) throwServiceError(r);
    try {
      return nlohmann::json::parse(r.body).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(ErrorCode::Internal, std::string("malformed response: ") + e.what());
    }
  }

  ServiceEndpoint endpoint_;
};

struct DownloadResult {
  Canvas canvas;
  AreaBoundingBox area;
  std::size_t tilesRequested = 0;
  std::vector<TileId> missing;
};

/// Client-side map composition: one GetAreaFromPt call, then one GetTile
/// per tile of the area, composed and styled locally. Absent tiles are
/// filled mid-gray and reported in `missing`.
inline DownloadResult downloadImage(const Client& client, const ImageAreaRequest& req) {
  DownloadResult out;
  out.area = client.getAreaFromPt(req.center, req.theme, req.scale, req.width, req.height);
  out.canvas = composeArea(out.area, [&](const TileId& id) -> std::optional<FetchedTile> {
    ++out.tilesRequested;
    try {
      TileBlob b = client.getTile(id);
      return FetchedTile{b.encoding, std::move(b.bytes)};
    } catch (const ServiceError& e) {
      if (e.code() != ErrorCode::NotFound) throw;
      out.missing.push_back(id);
      return std::nullopt;
    }
  });
  applyStyle(out.canvas, georefFor(out.area), req.style);
  return out;
}

}  // namespace terra
