#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sentiscope/label.hpp"

namespace sentiscope {

struct Coordinates {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
  bool operator==(const Coordinates&) const = default;
};

struct Tweet {
  std::string id;
  std::string text;  // original casing
  std::int64_t timestamp = 0;  // seconds since the Unix epoch, UTC
  std::optional<Coordinates> coordinates;
  std::vector<std::string> hashtags;  // "#..." lowercased
  std::vector<std::string> mentions;  // "@..." lowercased
  std::string lang;
  std::optional<std::string> country_code;
  bool is_retweet = false;

  bool operator==(const Tweet&) const = default;
};

// One row of the trimmed CSV: a tweet plus the state and label columns,
// which stay empty until geo assignment and classification fill them in.
struct TweetRecord {
  Tweet tweet;
  std::optional<std::string> state;
  std::optional<SentimentLabel> label;

  bool operator==(const TweetRecord&) const = default;
};

// Closed interval [start, end] of epoch seconds.
struct CorpusWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool contains(std::int64_t t) const { return t >= start && t <= end; }
  bool operator==(const CorpusWindow&) const = default;
};

CorpusWindow make_window(std::int64_t start, std::int64_t end);  // throws InvalidArgument if start > end

bool valid_coordinates(const Coordinates& c);
// A tag is a sigil followed by at least one character that is not
// whitespace, ',', ';' or '"'.
bool valid_tag(const std::string& tag, char sigil);

}  // namespace sentiscope
