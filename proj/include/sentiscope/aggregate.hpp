#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sentiscope/scoring.hpp"
#include "sentiscope/tweet.hpp"

namespace sentiscope {

enum class Granularity { Hour, Day };

std::int64_t granularity_seconds(Granularity g);
std::string_view granularity_name(Granularity g);  // "hour" / "day"
std::optional<Granularity> parse_granularity(std::string_view name);

struct SeriesPoint {
  std::int64_t bucket_start = 0;
  Granularity granularity = Granularity::Day;
  std::string state_code;  // or kNationalRegion
  SentimentCounts counts;
  bool operator==(const SeriesPoint&) const = default;
};

// One point per (bucket, state) with at least one tweet, plus a national
// rollup per bucket that also counts tweets without a state. Sorted by
// (bucket_start, state_code). Every record must carry a label.
std::vector<SeriesPoint> bucket_counts(std::span<const TweetRecord> records, Granularity g);

enum class TagKind { Hashtag, Mention };
std::string_view tag_kind_name(TagKind k);  // "hashtag" / "mention"
std::optional<TagKind> parse_tag_kind(std::string_view name);

struct TagFrequency {
  std::string tag;  // with sigil
  TagKind kind = TagKind::Hashtag;
  std::size_t count = 0;
  bool operator==(const TagFrequency&) const = default;
};

// Top n by count, ties broken lexicographically.
std::vector<TagFrequency> top_tags(std::span<const Tweet> tweets, TagKind kind, std::size_t n);
std::vector<TagFrequency> top_tags(std::span<const TweetRecord> records, TagKind kind, std::size_t n);

inline constexpr int kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotTopTags = 100;

struct DailyScores {
  std::int64_t day = 0;  // UTC midnight
  PGPSSResult scores;
  bool operator==(const DailyScores&) const = default;
};

struct Snapshot {
  CorpusWindow window;
  std::vector<SeriesPoint> hourly;
  std::vector<SeriesPoint> daily;
  std::vector<DailyScores> daily_pgpss;  // every day of the window
  PGPSSResult window_pgpss;
  std::vector<TagFrequency> top_hashtags;
  std::vector<TagFrequency> top_mentions;
  SentimentCounts totals;     // every tweet in the window
  std::uint64_t unresolved = 0;  // tweets without a state
  std::string classifier_id;
  PopulationTable population;
  nlohmann::json provenance = nlohmann::json::object();

  nlohmann::json to_json() const;
  static Snapshot from_json(const nlohmann::json& j);
  bool operator==(const Snapshot&) const = default;
};

// Records outside the window are ignored; states must be in `pop`.
Snapshot build_snapshot(std::span<const TweetRecord> records, const PopulationTable& pop, const CorpusWindow& window,
                        std::string classifier_id);

// Gzip-compressed when the path ends in ".gz".
void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);
// Accepts plain or gzip-compressed JSON.
Snapshot load_snapshot(const std::filesystem::path& path);

// Day-aligned window covering every timestamp; InvalidArgument when empty.
CorpusWindow covering_window(std::span<const TweetRecord> records);

}  // namespace sentiscope
