#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "sentiscope/aggregate.hpp"
#include "sentiscope/service.hpp"
#include "sentiscope/timeutil.hpp"
#include "support.hpp"

using namespace sentiscope;
using nlohmann::json;

namespace {

// Three states over 10-19 Dec 2012, a third of the tweets unresolved.
const Snapshot& fixture() {
  static const Snapshot snap = [] {
    const auto pop = make_population_table({{"AA", {1000, 0.4}}, {"BB", {3000, 0.2}}, {"CC", {6000, 0.3}}});
    auto spec = test::plain_spec(200, 0.8, 31);
    auto records = generate_corpus(spec, {});
    CounterRng rng(31, 1);
    for (auto& r : records) {
      const auto s = rng.below(3);
      if (s == 1) r.state = "AA";
      if (s == 2) r.state = rng.uniform() < 0.5 ? "BB" : "CC";
    }
    return build_snapshot(records, pop, spec.time_window, "oracle");
  }();
  return snap;
}

json get(const Api& api, const std::string& path, const QueryParams& q = {}, int status = 200) {
  const auto r = api.handle(path, q);
  CHECK(r.status == status);
  return json::parse(r.body);
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("meta") {
    const Api api(fixture());
    const auto m = get(api, "/api/meta");
    CHECK(m["window"]["start"] == "2012-12-10T00:00:00Z");
    CHECK(m["window"]["end"] == "2012-12-19T23:59:59Z");
    CHECK(m["classifier_id"] == "oracle");
    CHECK(m["states"].size() == 3);
  }

  TEST_CASE("series") {
    const Api api(fixture());
    const auto days = get(api, "/api/series");
    CHECK(days.size() == 10);
    std::uint64_t total = 0;
    for (const auto& p : days) total += p["pro"].get<std::uint64_t>() + p["anti"].get<std::uint64_t>() +
                                        p["neutral"].get<std::uint64_t>();
    CHECK(total == 600);
    CHECK(get(api, "/api/series", {{"granularity", "hour"}, {"from", "2012-12-14"}, {"to", "2012-12-14"}}).size() <= 24);
    const auto aa = get(api, "/api/series", {{"state", "AA"}, {"from", "2012-12-12"}, {"to", "2012-12-13"}});
    CHECK(aa.size() <= 2);
    for (const auto& p : aa) CHECK(p["bucket_start"].get<std::string>().substr(0, 8) == "2012-12-");
    CHECK(get(api, "/api/series", {{"granularity", "week"}}, 400)["code"] == "invalid_granularity");
    CHECK(get(api, "/api/series", {{"state", "ZZ"}}, 404)["code"] == "unknown_state");
  }

  TEST_CASE("map over the window and a sub-window") {
    const Api api(fixture());
    const auto whole = get(api, "/api/map");
    REQUIRE(whole.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& s = fixture().window_pgpss.states[i];
      CHECK(whole[i]["state"] == s.code);
      CHECK(whole[i]["norm"].get<double>() == s.norm3);
    }
    CHECK(get(api, "/api/map", {{"score", "pgpss9"}}, 400)["code"] == "invalid_score");

    // Recompute the sub-window directly from the daily state counts.
    const std::int64_t from = *parse_date("2012-12-13"), to = *parse_date("2012-12-15");
    std::map<std::string, SentimentCounts> counts;
    for (const auto& p : fixture().daily)
      if (p.state_code != kNationalRegion && p.bucket_start >= from && p.bucket_start <= to) counts[p.state_code] += p.counts;
    const auto oracle = score_all_states(counts, {from, to + 86399}, fixture().population);
    const auto sub = get(api, "/api/map", {{"score", "pgpss2"}, {"from", "2012-12-13"}, {"to", "2012-12-15"}});
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(sub[i]["raw"].get<double>() == oracle.states[i].raw2);
      CHECK(sub[i]["norm"].get<double>() == oracle.states[i].norm2);
    }
    CHECK(api.map_scores(std::nullopt, std::nullopt) == fixture().window_pgpss);
  }

  TEST_CASE("tags") {
    const Api api(fixture());
    const auto top = get(api, "/api/tags", {{"kind", "hashtag"}, {"n", "3"}});
    CHECK(top.size() == 3);
    CHECK(top[0]["count"].get<int>() >= top[1]["count"].get<int>());
    CHECK(get(api, "/api/tags", {{"kind", "mention"}}).size() <= 20);
    CHECK(get(api, "/api/tags", {{"n", "0"}}, 400)["code"] == "invalid_n");
    CHECK(get(api, "/api/tags", {{"n", "x"}}, 400)["code"] == "invalid_n");
    CHECK(get(api, "/api/tags", {{"kind", "emoji"}}, 400)["code"] == "invalid_kind");
  }

  TEST_CASE("bubble") {
    const Api api(fixture());
    const auto b = get(api, "/api/bubble", {{"date", "2012-12-14"}});
    REQUIRE(b.size() == 3);
    for (const auto& row : b) {
      CHECK(row["total"].get<std::uint64_t>() >= row["pro_count"].get<std::uint64_t>() + row["neutral_count"].get<std::uint64_t>());
      CHECK((row["pgpss3_norm"].get<double>() >= 0.0 && row["pgpss3_norm"].get<double>() <= 1.0));
    }
    CHECK(get(api, "/api/bubble", {{"date", "2013-01-01"}}, 400)["code"] == "date_out_of_range");
    CHECK(get(api, "/api/bubble", {}, 400)["code"] == "missing_date");
    CHECK(get(api, "/api/nothing", {}, 404)["code"] == "not_found");
  }

  TEST_CASE("responses depend only on the request") {
    const Api api(fixture());
    const QueryParams q{{"score", "pgpss1"}, {"from", "2012-12-11"}};
    const auto first = api.handle("/api/map", q).body;
    api.handle("/api/bubble", {{"date", "2012-12-12"}});
    api.handle("/api/series", {{"granularity", "hour"}});
    CHECK(api.handle("/api/map", q).body == first);
    CHECK(Api(fixture()).handle("/api/map", q).body == first);
  }

  TEST_CASE("http adapter") {
    HttpServer server(std::make_shared<const Api>(fixture()));
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.run(); });
    httplib::Client client("127.0.0.1", port);
    const auto r = client.Get("/api/map?score=pgpss1");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK(json::parse(r->body).size() == 3);
    const auto bad = client.Get("/api/bubble?date=1999-01-01");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    server.stop();
    t.join();
  }
}
