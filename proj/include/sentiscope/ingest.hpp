#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentiscope/tweet.hpp"

namespace sentiscope {

struct ParseIssue {
  std::size_t line = 0;  // 1-based line number in the stream
  std::string reason;
};

struct ParseResult {
  // Tweets in input order. An optional "label" field (0/1/2 or class name)
  // in the input lands in TweetRecord::label, which is how hand-labeled
  // gold-standard files are carried through the pipeline.
  std::vector<TweetRecord> records;
  std::vector<ParseIssue> errors;    // lines that yielded no tweet
  std::vector<ParseIssue> warnings;  // tweet kept, something dropped

  std::vector<Tweet> tweets() const;
};

// Newline-delimited JSON, one tweet object per line. Blank lines are
// skipped. Never throws on bad content; every malformed line becomes an
// error entry.
ParseResult parse_tweet_json(std::istream& in);
ParseResult parse_tweet_json_file(const std::filesystem::path& path);

struct FilterRules {
  std::vector<std::string> keywords;
  std::vector<std::string> phrases;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::optional<std::string> country_code;
  std::optional<std::string> lang;
  bool exclude_retweets = false;

  void validate() const;  // throws InvalidArgument when no match terms are given
};

bool matches_filters(const Tweet& tweet, const FilterRules& rules);
std::vector<Tweet> apply_filters(std::span<const Tweet> tweets, const FilterRules& rules);
std::vector<TweetRecord> apply_filters(std::span<const TweetRecord> records, const FilterRules& rules);

// Trimmed CSV: id,timestamp_utc,text,lat,lon,state,label,hashtags,mentions
inline constexpr const char* kTrimmedCsvHeader =
    "id,timestamp_utc,text,lat,lon,state,label,hashtags,mentions";

std::size_t write_trimmed_csv(std::span<const TweetRecord> records, std::ostream& out);
std::size_t write_trimmed_csv(std::span<const TweetRecord> records, const std::filesystem::path& path);
std::size_t write_trimmed_csv(std::span<const Tweet> tweets, const std::filesystem::path& path);

std::vector<TweetRecord> read_trimmed_csv(std::istream& in);
std::vector<TweetRecord> read_trimmed_csv(const std::filesystem::path& path);

// RFC-4180 primitives, shared with the table/score exporters.
std::string csv_escape(const std::string& field);
// Reads one record; returns false at end of input. Throws CsvFormatError
// on an unterminated quoted field.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t row);

}  // namespace sentiscope
