#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "sentiscope/error.hpp"
#include "sentiscope/features.hpp"
#include "support.hpp"

using namespace sentiscope;
using Tokens = std::vector<std::string>;

TEST_SUITE("features") {
  TEST_CASE("tokenizer examples") {
    CHECK(tokenize("Gun control isn't gonna help. God bless the 2nd amendment! #sorrynotsorry") ==
          Tokens{"gun", "control", "isn't", "gonna", "help", "god", "bless", "the", "2nd", "amendment",
                 "#sorrynotsorry"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("noooooooo") == Tokens{"nooo"});
    CHECK(tokenize("see http://t.co/abc and www.x.com, @NRA!") == Tokens{"see", "<url>", "and", "<url>", "@nra"});
    CHECK(tokenize("'quoted' rock'n'roll") == Tokens{"quoted", "rock'n'roll"});
    CHECK(tokenize("a#b c") == Tokens{"a", "b", "c"});
  }

  TEST_CASE("tokenize is a fixed point under re-joining") {
    const char* samples[] = {"BAN GUNS!!! Let our children be safe", "Obama is possibly visiting Newtown",
                             "#NRA says... wha??? sooooo http://x.y/z don't", "  tabs\tand\nnewlines ",
                             "caf\xC3\xA9 na\xC3\xAFve \xF0\x9F\x98\xA2 @Someone's", "'''' -- ''"};
    for (const char* s : samples) {
      const auto once = tokenize(s);
      std::string joined;
      for (const auto& t : once) joined += t + " ";
      CHECK(tokenize(joined) == once);
    }
  }

  TEST_CASE("ngrams") {
    const Tokens abc{"a", "b", "c"};
    CHECK(extract_ngrams(abc, 2) == Tokens{"a b", "b c"});
    CHECK(extract_ngrams(abc, 1) == abc);
    CHECK(extract_ngrams(Tokens{"a", "b"}, 3).empty());
    CHECK_THROWS_AS(extract_ngrams(abc, 4), InvalidArgument);
    const auto toks = tokenize("one two three four five");
    CHECK(extract_ngrams(toks, 1).size() == toks.size());
  }

  TEST_CASE("tag features") {
    Tweet t = test::tweet("1", "x");
    t.hashtags = {"#2ndamendment"};
    CHECK(extract_tag_features(t) == Tokens{"tag:#2ndamendment"});
    t.hashtags = {};
    t.mentions = {"@NRA"};
    CHECK(extract_tag_features(t) == Tokens{"tag:@nra"});
    t.mentions = {};
    CHECK(extract_tag_features(t).empty());
  }

  TEST_CASE("tags break n-gram runs and enter once through the tag namespace") {
    Tweet t = test::tweet("1", "stop #guns now now");
    t.hashtags = {"#guns"};
    FeatureConfig c;
    c.ngram_order = 2;
    auto terms = document_terms(t, c);
    std::sort(terms.begin(), terms.end());
    CHECK(terms == Tokens{"now now", "tag:#guns"});
    c.use_hashtags = false;
    CHECK(document_terms(t, c) == Tokens{"now now"});
  }

  TEST_CASE("vocabulary examples") {
    const auto docs = test::tweets_from({"a b", "a c"});
    FeatureConfig c;
    c.min_doc_freq = 2;
    CHECK(build_vocabulary(docs, c).terms() == Tokens{"a"});
    c.min_doc_freq = 1;
    const auto v = build_vocabulary(docs, c);
    CHECK(v.terms() == Tokens{"a", "b", "c"});
    CHECK(v.index_of("c") == 2u);
    CHECK_FALSE(v.index_of("z"));
    CHECK_THROWS_AS(build_vocabulary(test::tweets_from({"", "  "}), c), EmptyVocabulary);
    CHECK_THROWS_AS(build_vocabulary(std::span<const Tweet>{}, c), InvalidArgument);
  }

  TEST_CASE("vocabulary is permutation invariant") {
    auto docs = test::tweets_from({"guns rights now", "ban guns", "nice day", "ban now", "day of rights"});
    FeatureConfig c;
    c.min_doc_freq = 1;
    const auto v1 = build_vocabulary(docs, c);
    std::reverse(docs.begin(), docs.end());
    std::rotate(docs.begin(), docs.begin() + 2, docs.end());
    CHECK(build_vocabulary(docs, c) == v1);
  }

  TEST_CASE("vectorize") {
    FeatureConfig c;
    c.min_doc_freq = 1;
    const Vocabulary v({"a", "b"}, c);
    const auto m = vectorize_corpus(test::tweets_from({"a a b", "z z"}), v);
    CHECK(m.n_docs() == 2);
    CHECK(std::vector<TermCount>(m.row(0).begin(), m.row(0).end()) == std::vector<TermCount>{{0, 2}, {1, 1}});
    CHECK(m.row(1).empty());
    CHECK(vectorize_corpus(std::span<const Tweet>{}, v).n_docs() == 0);
  }

  TEST_CASE("row sums equal brute-force in-vocabulary counts") {
    const auto docs = test::tweets_from({"the gun the ban", "ban ban ban", "nothing here", "gun the end the"});
    FeatureConfig c;
    c.min_doc_freq = 2;
    const auto v = build_vocabulary(docs, c);
    const auto m = vectorize_corpus(docs, v);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      std::size_t expected = 0;
      for (const auto& tok : tokenize(docs[i].text)) expected += v.index_of(tok) ? 1 : 0;
      std::size_t got = 0;
      for (const auto& e : m.row(i)) got += e.count;
      CHECK(got == expected);
    }
  }

  TEST_CASE("dtm rows are sorted, merged and range checked") {
    DocumentTermMatrix m(4);
    m.add_row({{3, 1}, {1, 2}, {3, 2}, {0, 0}});
    CHECK(std::vector<TermCount>(m.row(0).begin(), m.row(0).end()) == std::vector<TermCount>{{1, 2}, {3, 3}});
    CHECK(m.at(0, 3) == 3);
    CHECK(m.at(0, 2) == 0);
    CHECK_THROWS_AS(m.add_row({{4, 1}}), InvalidArgument);
  }

  TEST_CASE("vocabulary json round trip and version check") {
    FeatureConfig c;
    c.ngram_order = 2;
    const Vocabulary v({"a b", "b c", "tag:#x"}, c);
    CHECK(Vocabulary::from_json(v.to_json()) == v);
    std::string bumped = v.to_json();
    bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":2");
    CHECK_THROWS_AS(Vocabulary::from_json(bumped), VersionMismatch);
    CHECK_THROWS_AS(Vocabulary::from_json("{\"version\":1"), CorruptPayload);
    CHECK_THROWS(Vocabulary({"b", "a"}, c));
  }
}
