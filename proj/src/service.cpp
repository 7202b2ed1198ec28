#include "sentiscope/service.hpp"

#include <csignal>
#include <pthread.h>
#include <thread>

#include "httplib.h"
#include "sentiscope/error.hpp"
#include "sentiscope/timeutil.hpp"

namespace sentiscope {

namespace {

struct ApiFailure {
  ApiError error;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw ApiFailure{{status, std::move(code), std::move(message)}};
}

std::optional<std::string> param(const QueryParams& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int64_t> date_param(const QueryParams& params, const std::string& key) {
  const auto v = param(params, key);
  if (!v) return std::nullopt;
  const auto d = parse_date(*v);
  if (!d) fail(400, "invalid_date", key + " must be YYYY-MM-DD, got '" + *v + "'");
  return d;
}

std::string error_body(const ApiError& e) {
  return nlohmann::json{{"status", e.status}, {"code", e.code}, {"message", e.message}}.dump();
}

}  // namespace

Api::Api(Snapshot snapshot) : snapshot_(std::move(snapshot)) {}

ApiResponse Api::handle(std::string_view path, const QueryParams& params) const {
  try {
    nlohmann::json body;
    if (path == "/api/meta") {
      body = meta();
    } else if (path == "/api/series") {
      body = series(params);
    } else if (path == "/api/map") {
      body = map(params);
    } else if (path == "/api/tags") {
      body = tags(params);
    } else if (path == "/api/bubble") {
      body = bubble(params);
    } else {
      fail(404, "not_found", "no endpoint " + std::string(path));
    }
    return {200, body.dump()};
  } catch (const ApiFailure& f) {
    return {f.error.status, error_body(f.error)};
  } catch (const std::exception& e) {
    return {500, error_body({500, "internal", e.what()})};
  }
}

nlohmann::json Api::meta() const {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& [code, info] : snapshot_.population.states)
    states.push_back({{"code", code}, {"population", info.population}, {"gun_ownership_pct", info.gun_ownership_pct}});
  return {{"window", {{"start", format_iso8601(snapshot_.window.start)}, {"end", format_iso8601(snapshot_.window.end)}}},
          {"classifier_id", snapshot_.classifier_id},
          {"states", states}};
}

nlohmann::json Api::series(const QueryParams& params) const {
  const std::string gname = param(params, "granularity").value_or("day");
  const auto g = parse_granularity(gname);
  if (!g) fail(400, "invalid_granularity", "granularity must be hour or day, got '" + gname + "'");
  const std::string state = param(params, "state").value_or(kNationalRegion);
  if (state != kNationalRegion && !snapshot_.population.contains(state))
    fail(404, "unknown_state", "unknown state '" + state + "'");
  const auto from = date_param(params, "from");
  const auto to = date_param(params, "to");
  if (from && to && *from > *to) fail(400, "invalid_range", "from is after to");
  const std::int64_t lo = from.value_or(INT64_MIN);
  const std::int64_t hi = to ? *to + kSecondsPerDay - 1 : INT64_MAX;

  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : *g == Granularity::Hour ? snapshot_.hourly : snapshot_.daily)
    if (p.state_code == state && p.bucket_start >= lo && p.bucket_start <= hi)
      out.push_back({{"bucket_start", format_iso8601(p.bucket_start)},
                     {"pro", p.counts.pro},
                     {"anti", p.counts.anti},
                     {"neutral", p.counts.neutral}});
  return out;
}

PGPSSResult Api::map_scores(std::optional<std::int64_t> from_day, std::optional<std::int64_t> to_day) const {
  const std::int64_t lo = std::max(from_day.value_or(snapshot_.window.start), snapshot_.window.start);
  const std::int64_t hi = std::min(to_day ? *to_day + kSecondsPerDay - 1 : snapshot_.window.end, snapshot_.window.end);
  if (lo > hi) throw InvalidArgument("range does not overlap the snapshot window");
  std::map<std::string, SentimentCounts> counts;
  for (const auto& p : snapshot_.daily)
    if (p.state_code != kNationalRegion && p.bucket_start + kSecondsPerDay - 1 >= lo && p.bucket_start <= hi)
      counts[p.state_code] += p.counts;
  return score_all_states(counts, {lo, hi}, snapshot_.population);
}

nlohmann::json Api::map(const QueryParams& params) const {
  const std::string name = param(params, "score").value_or("pgpss3");
  const int variant = parse_score_variant(name);
  if (variant == 0) fail(400, "invalid_score", "score must be pgpss1, pgpss2 or pgpss3, got '" + name + "'");
  const auto from = date_param(params, "from");
  const auto to = date_param(params, "to");
  if (from && to && *from > *to) fail(400, "invalid_range", "from is after to");
  PGPSSResult scores;
  if (!from && !to) {
    scores = snapshot_.window_pgpss;
  } else {
    try {
      scores = map_scores(from, to);
    } catch (const InvalidArgument& e) {
      fail(400, "invalid_range", e.what());
    }
  }
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : scores.states) out.push_back({{"state", s.code}, {"raw", s.raw(variant)}, {"norm", s.norm(variant)}});
  return out;
}

nlohmann::json Api::tags(const QueryParams& params) const {
  const std::string kname = param(params, "kind").value_or("hashtag");
  const auto kind = parse_tag_kind(kname);
  if (!kind) fail(400, "invalid_kind", "kind must be hashtag or mention, got '" + kname + "'");
  std::size_t n = 20;
  if (const auto v = param(params, "n")) {
    std::size_t used = 0;
    long long parsed = 0;
    try {
      parsed = std::stoll(*v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v->size() || parsed < 1 || parsed > static_cast<long long>(kSnapshotTopTags))
      fail(400, "invalid_n", "n must be an integer in [1, " + std::to_string(kSnapshotTopTags) + "]");
    n = static_cast<std::size_t>(parsed);
  }
  const auto& all = *kind == TagKind::Hashtag ? snapshot_.top_hashtags : snapshot_.top_mentions;
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < std::min(n, all.size()); ++i) out.push_back({{"tag", all[i].tag}, {"count", all[i].count}});
  return out;
}

nlohmann::json Api::bubble(const QueryParams& params) const {
  const auto date = date_param(params, "date");
  if (!date) fail(400, "missing_date", "date is required");
  const auto it = std::find_if(snapshot_.daily_pgpss.begin(), snapshot_.daily_pgpss.end(),
                               [&](const DailyScores& d) { return d.day == *date; });
  if (it == snapshot_.daily_pgpss.end())
    fail(400, "date_out_of_range", "date " + format_date(*date) + " is outside the snapshot window");
  std::map<std::string, SentimentCounts> counts;
  for (const auto& p : snapshot_.daily)
    if (p.bucket_start == *date && p.state_code != kNationalRegion) counts[p.state_code] = p.counts;
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [code, info] : snapshot_.population.states) {
    const SentimentCounts c = counts.contains(code) ? counts.at(code) : SentimentCounts{};
    const StateScores* s = it->scores.find(code);
    out.push_back({{"state", code},
                   {"neutral_count", c.neutral},
                   {"pgpss3_norm", s ? s->norm3 : 0.0},
                   {"population", info.population},
                   {"gun_ownership_pct", info.gun_ownership_pct},
                   {"pro_count", c.pro},
                   {"total", c.total()}});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  std::shared_ptr<const Api> api;
  httplib::Server server;
};

HttpServer::HttpServer(std::shared_ptr<const Api> api) : impl_(std::make_unique<Impl>()) {
  impl_->api = std::move(api);
  auto& srv = impl_->server;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  const Api* handler = impl_->api.get();
  srv.Get(".*", [handler](const httplib::Request& req, httplib::Response& res) {
    QueryParams params;
    for (const auto& [k, v] : req.params) params.emplace(k, v);  // first value wins
    const auto r = handler->handle(req.path, params);
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  });
  srv.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    const int bound = srv.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!srv.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void serve(const std::filesystem::path& snapshot_path, const std::string& host, int port,
           const std::function<void(int)>& on_ready) {
  auto api = std::make_shared<const Api>(load_snapshot(snapshot_path));
  // Block the signals before any thread starts so only the waiter sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(api);
  const int bound = server.bind(host, port);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  if (on_ready) on_ready(bound);
  server.run();
  // run() also returns on listener failure; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
}

}  // namespace sentiscope
