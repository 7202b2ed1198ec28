#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sentiscope/geo.hpp"
#include "sentiscope/tweet.hpp"

namespace sentiscope {

struct EventSpike {
  std::int64_t timestamp = 0;
  double multiplier = 1.0;  // density factor over the spike's UTC day
};

struct GeneratorSpec {
  std::array<std::size_t, kNumClasses> n_per_class{};
  std::array<std::vector<std::string>, kNumClasses> class_lexicons;
  std::vector<std::string> shared_lexicon;
  double signal_rate = 1.0;
  std::size_t min_tokens = 6;
  std::size_t max_tokens = 12;
  // Class tags follow the same signal_rate as tokens; otherwise a shared
  // tag is drawn. Either way a tag is attached with probability tag_rate.
  std::array<std::vector<std::string>, kNumClasses> class_hashtags;
  std::vector<std::string> shared_hashtags;
  std::array<std::vector<std::string>, kNumClasses> class_mentions;
  std::vector<std::string> shared_mentions;
  double tag_rate = 0.3;
  double geotag_rate = 1.0;  // fraction of tweets given coordinates
  std::map<std::string, double> geo_distribution;
  CorpusWindow time_window;
  std::optional<EventSpike> event_spike;
  std::uint64_t seed = 0;

  void validate() const;  // InvalidSpec
  nlohmann::json to_json() const;
  static GeneratorSpec from_json(const nlohmann::json& j);  // missing keys keep defaults
};

// A small three-class lexicon over 50 states, 10-19 Dec 2012 with a spike on
// the 14th.
GeneratorSpec default_generator_spec();

// Records carry the gold label and the state whose polygon the coordinates
// were drawn from (empty when the tweet is not geotagged). Sorted by
// timestamp; ids are sequential in that order.
std::vector<TweetRecord> generate_corpus(const GeneratorSpec& spec, std::span<const StatePolygon> polygons);

// Every document's tri-grams are unique to it, so no tri-gram reaches a
// document frequency of 2 while uni-grams still separate the classes.
std::vector<TweetRecord> generate_unique_trigram_corpus(std::size_t n_per_class, std::uint64_t seed);

// Newline-delimited JSON in the ingest format, with the gold label.
void write_corpus_ndjson(std::span<const TweetRecord> records, std::ostream& out);
void write_corpus_ndjson(std::span<const TweetRecord> records, const std::filesystem::path& path);

}  // namespace sentiscope
