#include <cmath>

#include "doctest.h"
#include "sentiscope/error.hpp"
#include "sentiscope/scoring.hpp"

using namespace sentiscope;

namespace {

// Two regions: g1 with 1M tweets (200k pro, 800k anti), g2 with 10k tweets
// (8k pro, 2k anti); populations 10M and 1M.
const SentimentCounts g1{200000, 800000, 0};
const SentimentCounts g2{8000, 2000, 0};
constexpr std::uint64_t kFrame = 1010000;

PopulationTable example_population() {
  return make_population_table({{"G1", {10000000, 0.3}}, {"G2", {1000000, 0.5}}});
}

}  // namespace

TEST_SUITE("scoring") {
  TEST_CASE("pgpss1 worked example") {
    CHECK(pgpss1(g1) == 0.25);
    CHECK(pgpss1(g2) == 4.0);
    CHECK(pgpss1({7, 7, 3}) == 1.0);
    CHECK(pgpss1({5, 0, 0}) == 5.0);
    CHECK(pgpss1({0, 0, 9}) == 0.0);
    const auto n = normalize_scores({{"G1", 0.25}, {"G2", 4.0}});
    CHECK(n.at("G1") == 0.0625);
    CHECK(n.at("G2") == 1.0);
  }

  TEST_CASE("pgpss2 worked example") {
    CHECK(std::abs(pgpss2(g1, kFrame) - 0.247525) < 1e-6);
    CHECK(std::abs(pgpss2(g2, kFrame) - 0.039604) < 1e-6);
    CHECK(pgpss2(g2, g2.total()) == pgpss1(g2));
    const auto n = normalize_scores({{"G1", pgpss2(g1, kFrame)}, {"G2", pgpss2(g2, kFrame)}});
    CHECK(n.at("G1") == 1.0);
    CHECK(std::abs(n.at("G2") - 0.16) < 1e-3);
    CHECK_THROWS_AS(pgpss2(g1, 0), ZeroFrameTotal);
    CHECK_THROWS_AS(pgpss2(g1, 10), InvalidArgument);
  }

  TEST_CASE("pgpss3 worked example") {
    const auto pop = example_population();
    CHECK(pop.national_population == 11000000);
    CHECK(std::abs(pgpss3(g1, kFrame, pop, "G1") - 0.225023) < 1e-6);
    // Direct evaluation of the formula: 0.039604 * 1/11.
    CHECK(std::abs(pgpss3(g2, kFrame, pop, "G2") - 0.003600) < 1e-6);
    CHECK_THROWS_AS(pgpss3(g1, kFrame, pop, "ZZ"), UnknownState);
    const auto solo = make_population_table({{"G1", {10000000, 0.3}}});
    CHECK(pgpss3(g1, kFrame, solo, "G1") == pgpss2(g1, kFrame));
  }

  TEST_CASE("score_all_states reproduces the worked example") {
    const auto pop = example_population();
    const CorpusWindow w{0, 86399};
    const auto r = score_all_states({{"G1", g1}, {"G2", g2}}, w, pop);
    REQUIRE(r.states.size() == 2);
    const auto* a = r.find("G1");
    const auto* b = r.find("G2");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->raw1 == 0.25);
    CHECK(b->raw1 == 4.0);
    CHECK(a->norm1 == 0.0625);
    CHECK(b->norm1 == 1.0);
    CHECK(std::abs(a->raw2 - 0.247525) < 1e-6);
    CHECK(std::abs(b->raw2 - 0.039604) < 1e-6);
    CHECK(a->norm2 == 1.0);
    CHECK(std::abs(b->norm2 - 0.16) < 1e-3);
    CHECK(std::abs(a->raw3 - 0.225023) < 1e-6);
    CHECK(std::abs(b->raw3 - 0.003600) < 1e-6);
    CHECK(a->norm3 == 1.0);
    CHECK(PGPSSResult::from_json(r.to_json()) == r);
    CHECK(r.to_csv().rfind("code,raw1,raw2,raw3,norm1,norm2,norm3\n", 0) == 0);
  }

  TEST_CASE("degenerate regions") {
    const auto pop = make_population_table({{"AA", {5, 0.1}}, {"BB", {7, 0.2}}});
    const auto one = score_all_states({{"AA", {3, 1, 2}}}, {0, 1}, pop);
    CHECK(one.find("AA")->norm1 == 1.0);
    CHECK(one.find("AA")->norm2 == 1.0);
    CHECK(one.find("AA")->norm3 == 1.0);
    CHECK(one.find("BB")->raw1 == 0.0);
    CHECK(one.find("BB")->norm3 == 0.0);
    const auto none = score_all_states({}, {0, 1}, pop);
    for (const auto& s : none.states) CHECK(s == StateScores{s.code});
    CHECK_THROWS_AS(score_all_states({{"QQ", {1, 1, 1}}}, {0, 1}, pop), UnknownState);
    CHECK(normalize_scores({{"a", 0.0}, {"b", 0.0}}) == std::map<std::string, double>{{"a", 0.0}, {"b", 0.0}});
    CHECK_THROWS_AS(normalize_scores({{"a", -1.0}}), InvalidArgument);
  }

  TEST_CASE("score properties") {
    for (std::uint64_t k : {2u, 3u, 17u}) {
      CHECK(pgpss1({g1.pro * k, g1.anti * k, 0}) == pgpss1(g1));
      CHECK(pgpss1({g2.pro * k, g2.anti * k, 5}) == pgpss1(g2));
    }
    const auto pop = example_population();
    const std::vector<SentimentCounts> samples{{1, 2, 3}, {9, 1, 0}, {0, 4, 4}, {50, 50, 1}};
    std::uint64_t frame = 0;
    for (const auto& c : samples) frame += c.total();
    double share = 0.0;
    for (const auto& c : samples) {
      CHECK(pgpss2(c, frame) <= pgpss1(c));
      CHECK(pgpss3(c, frame, pop, "G1") <= pgpss2(c, frame));
      share += static_cast<double>(c.total()) / static_cast<double>(frame);
    }
    CHECK(std::abs(share - 1.0) < 1e-12);

    const std::map<std::string, double> v{{"a", 0.3}, {"b", 1.7}, {"c", 0.0}};
    const auto n = normalize_scores(v);
    CHECK(normalize_scores(n) == n);
    std::map<std::string, double> scaled;
    for (const auto& [k, x] : v) scaled[k] = x * 4.0;
    CHECK(normalize_scores(scaled) == n);
  }

  TEST_CASE("ranking under pgpss2 survives uniform scaling") {
    const auto pop = make_population_table({{"AA", {5, 0.1}}, {"BB", {7, 0.2}}, {"CC", {9, 0.2}}});
    std::map<std::string, SentimentCounts> base{{"AA", {10, 5, 1}}, {"BB", {3, 9, 2}}, {"CC", {40, 12, 6}}};
    std::map<std::string, SentimentCounts> big;
    for (const auto& [k, c] : base) big[k] = {c.pro * 13, c.anti * 13, c.neutral * 13};
    const auto r1 = score_all_states(base, {0, 1}, pop);
    const auto r2 = score_all_states(big, {0, 1}, pop);
    for (std::size_t i = 0; i < r1.states.size(); ++i)
      CHECK(std::abs(r1.states[i].norm2 - r2.states[i].norm2) < 1e-12);
  }

  TEST_CASE("variant names") {
    CHECK(parse_score_variant("pgpss1") == 1);
    CHECK(parse_score_variant("pgpss3") == 3);
    CHECK(parse_score_variant("pgpss4") == 0);
  }
}
