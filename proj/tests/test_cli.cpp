#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "sentiscope/aggregate.hpp"
#include "sentiscope/classifiers.hpp"
#include "sentiscope/cli.hpp"
#include "support.hpp"

using namespace sentiscope;
using nlohmann::json;

namespace {

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sentiscope");
  return run_cli(args);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(cli({"frobnicate"}) == 2);
    CHECK(cli({}) == 2);
    CHECK(cli({"evaluate", "--table1", "--table2", "--in", "x"}) == 2);
    CHECK(cli({"train", "--algorithm", "NB"}) == 2);
    CHECK(cli({"--help"}) == 0);
  }

  TEST_CASE("data errors exit with 1") {
    test::TempDir dir("cli_err");
    CHECK(cli({"ingest", "--in", (dir / "missing.ndjson").string(), "--out", (dir / "o.csv").string()}) == 1);
    {
      std::ofstream bad(dir / "bad.json");
      bad << "{not json";
    }
    CHECK(cli({"gen", "--spec", (dir / "bad.json").string(), "--out", (dir / "c.ndjson").string()}) == 1);
    {
      std::ofstream spec(dir / "spec.json");
      spec << R"({"signal_rate": 2})";
    }
    CHECK(cli({"gen", "--spec", (dir / "spec.json").string(), "--out", (dir / "c.ndjson").string()}) == 1);
  }

  TEST_CASE("generate, train, classify, snapshot") {
    test::TempDir dir("cli_flow");
    const auto p = [&](const char* n) { return (dir / n).string(); };
    const std::string geo = test::data_path("us_states_simplified.geojson");
    REQUIRE(cli({"--seed", "5", "gen", "--total", "600", "--geo", geo, "--out", p("c.ndjson")}) == 0);
    CHECK(std::filesystem::exists(p("c.ndjson.meta.json")));
    REQUIRE(cli({"ingest", "--in", p("c.ndjson"), "--geo", geo, "--out", p("t.csv")}) == 0);
    REQUIRE(cli({"--seed", "5", "train", "--in", p("t.csv"), "--algorithm", "NB", "--out", p("m.json")}) == 0);
    const auto bundle = json::parse(test::slurp(p("m.json")));
    CHECK(bundle["version"] == 1);
    CHECK(bundle.contains("vocabulary"));
    CHECK(bundle["provenance"]["seed"] == 5);
    CHECK(cli({"train", "--in", p("t.csv"), "--algorithm", "RF", "--param", "n_trees=0", "--out", p("x.json")}) == 1);
    REQUIRE(cli({"classify", "--in", p("t.csv"), "--model", p("m.json"), "--out", p("l.csv")}) == 0);
    REQUIRE(cli({"score", "--in", p("l.csv"), "--geo", geo, "--out", p("s.json")}) == 0);
    CHECK(json::parse(test::slurp(p("s.json")))["states"].size() == 50);
    REQUIRE(cli({"snapshot", "--in", p("l.csv"), "--geo", geo, "--out", p("snap.json")}) == 0);
    const auto snap = load_snapshot(p("snap.json"));
    CHECK(snap.totals.total() == 600);
    CHECK(snap.unresolved == 0);
  }

  TEST_CASE("comparison table shapes") {
    test::TempDir dir("cli_tables");
    const auto p = [&](const char* n) { return (dir / n).string(); };
    REQUIRE(cli({"gen", "--kind", "unique-trigram", "--per-class", "30", "--out", p("u.ndjson")}) == 0);
    REQUIRE(cli({"evaluate", "--table2", "--in", p("u.ndjson"), "--quota", "30,30,30", "--folds", "3",
                 "--algorithms", "NB,Tree", "--format", "json", "--out", p("t2.json")}) == 0);
    const auto t2 = json::parse(test::slurp(p("t2.json")));
    CHECK(t2["rows"] == json({"uni-gram", "bi-gram", "tri-gram"}));
    CHECK(t2["columns"] == json({"NB", "Tree"}));
    CHECK(t2["cells"][2][0] == "N/A");

    REQUIRE(cli({"gen", "--total", "300", "--signal-rate", "1", "--out", p("s.ndjson")}) == 0);
    REQUIRE(cli({"evaluate", "--table1", "--in", p("s.ndjson"), "--quota", "100,100,50", "--sizes", "125,250",
                 "--folds", "3", "--algorithms", "NB", "--out", p("t1.csv")}) == 0);
    const std::string csv = test::slurp(p("t1.csv"));
    CHECK(csv == "training_size,NB\n125,1.000000\n250,1.000000\n");
  }
}
