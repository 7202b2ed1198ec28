#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sentiscope/aggregate.hpp"

namespace sentiscope {

struct ApiError {
  int status = 500;  // 400, 404 or 500
  std::string code;
  std::string message;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

using QueryParams = std::map<std::string, std::string>;

// Request handling with no I/O: every response is a pure function of the
// snapshot and the request, so the HTTP layer is a thin adapter.
class Api {
 public:
  explicit Api(Snapshot snapshot);

  ApiResponse handle(std::string_view path, const QueryParams& params) const;

  // Scores over the inclusive UTC dates [from, to], recomputed from the
  // summed daily state counts. Either bound defaults to the window edge.
  PGPSSResult map_scores(std::optional<std::int64_t> from_day, std::optional<std::int64_t> to_day) const;

  const Snapshot& snapshot() const { return snapshot_; }

 private:
  nlohmann::json meta() const;
  nlohmann::json series(const QueryParams& params) const;
  nlohmann::json map(const QueryParams& params) const;
  nlohmann::json tags(const QueryParams& params) const;
  nlohmann::json bubble(const QueryParams& params) const;

  Snapshot snapshot_;
};

// HTTP front end. `port` 0 binds an ephemeral port.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<const Api> api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  int bind(const std::string& host, int port);  // returns the bound port; throws IoError
  void run();                                   // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Load, bind, and serve until SIGINT or SIGTERM. `on_ready` receives the
// bound port.
void serve(const std::filesystem::path& snapshot_path, const std::string& host, int port,
           const std::function<void(int)>& on_ready = {});

}  // namespace sentiscope
