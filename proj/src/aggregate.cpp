#include "sentiscope/aggregate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <zlib.h>

#include "sentiscope/error.hpp"
#include "sentiscope/timeutil.hpp"

namespace sentiscope {

std::int64_t granularity_seconds(Granularity g) { return g == Granularity::Hour ? kSecondsPerHour : kSecondsPerDay; }

std::string_view granularity_name(Granularity g) { return g == Granularity::Hour ? "hour" : "day"; }

std::optional<Granularity> parse_granularity(std::string_view name) {
  if (name == "hour") return Granularity::Hour;
  if (name == "day") return Granularity::Day;
  return std::nullopt;
}

std::string_view tag_kind_name(TagKind k) { return k == TagKind::Hashtag ? "hashtag" : "mention"; }

std::optional<TagKind> parse_tag_kind(std::string_view name) {
  if (name == "hashtag") return TagKind::Hashtag;
  if (name == "mention") return TagKind::Mention;
  return std::nullopt;
}

std::vector<SeriesPoint> bucket_counts(std::span<const TweetRecord> records, Granularity g) {
  const std::int64_t step = granularity_seconds(g);
  std::map<std::pair<std::int64_t, std::string>, SentimentCounts> buckets;
  for (const auto& r : records) {
    if (!r.label) throw InvalidArgument("tweet " + r.tweet.id + " has no label");
    const std::int64_t b = floor_to(r.tweet.timestamp, step);
    buckets[{b, kNationalRegion}].add(*r.label);
    if (r.state) buckets[{b, *r.state}].add(*r.label);
  }
  std::vector<SeriesPoint> out;
  out.reserve(buckets.size());
  for (const auto& [key, counts] : buckets) out.push_back({key.first, g, key.second, counts});
  return out;
}

namespace {

std::vector<TagFrequency> rank_tags(const std::map<std::string, std::size_t>& counts, TagKind kind, std::size_t n) {
  std::vector<TagFrequency> all;
  all.reserve(counts.size());
  for (const auto& [tag, c] : counts) all.push_back({tag, kind, c});
  // map order is already lexicographic, so a stable sort keeps the tie-break
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  if (all.size() > n) all.resize(n);
  return all;
}

template <typename Get>
std::vector<TagFrequency> top_tags_impl(std::size_t size, Get get, TagKind kind, std::size_t n) {
  if (n == 0) throw InvalidArgument("n must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < size; ++i) {
    const Tweet& t = get(i);
    for (const auto& tag : kind == TagKind::Hashtag ? t.hashtags : t.mentions) ++counts[tag];
  }
  return rank_tags(counts, kind, n);
}

nlohmann::json counts_json(const SentimentCounts& c) {
  return {{"pro", c.pro}, {"anti", c.anti}, {"neutral", c.neutral}};
}

SentimentCounts counts_from(const nlohmann::json& j) {
  return {j.at("pro").get<std::uint64_t>(), j.at("anti").get<std::uint64_t>(), j.at("neutral").get<std::uint64_t>()};
}

nlohmann::json series_json(const std::vector<SeriesPoint>& points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points) {
    auto j = counts_json(p.counts);
    j["bucket_start"] = format_iso8601(p.bucket_start);
    j["state"] = p.state_code;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<SeriesPoint> series_from(const nlohmann::json& arr, Granularity g) {
  std::vector<SeriesPoint> out;
  for (const auto& j : arr) {
    const auto ts = parse_iso8601(j.at("bucket_start").get<std::string>());
    if (!ts) throw CorruptPayload("bad bucket_start");
    if (floor_to(*ts, granularity_seconds(g)) != *ts) throw CorruptPayload("bucket_start not aligned");
    out.push_back({*ts, g, j.at("state").get<std::string>(), counts_from(j)});
  }
  return out;
}

nlohmann::json tags_json(const std::vector<TagFrequency>& tags) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tags) arr.push_back({{"tag", t.tag}, {"count", t.count}});
  return arr;
}

std::vector<TagFrequency> tags_from(const nlohmann::json& arr, TagKind kind) {
  std::vector<TagFrequency> out;
  for (const auto& j : arr) out.push_back({j.at("tag").get<std::string>(), kind, j.at("count").get<std::size_t>()});
  return out;
}

}  // namespace

std::vector<TagFrequency> top_tags(std::span<const Tweet> tweets, TagKind kind, std::size_t n) {
  return top_tags_impl(tweets.size(), [&](std::size_t i) -> const Tweet& { return tweets[i]; }, kind, n);
}

std::vector<TagFrequency> top_tags(std::span<const TweetRecord> records, TagKind kind, std::size_t n) {
  return top_tags_impl(records.size(), [&](std::size_t i) -> const Tweet& { return records[i].tweet; }, kind, n);
}

Snapshot build_snapshot(std::span<const TweetRecord> records, const PopulationTable& pop, const CorpusWindow& window,
                        std::string classifier_id) {
  std::vector<TweetRecord> inside;
  for (const auto& r : records)
    if (window.contains(r.tweet.timestamp)) {
      if (r.state) pop.at(*r.state);
      inside.push_back(r);
    }
  // Permutation invariance: nothing below depends on input order, but sort
  // anyway so any future order-sensitive step stays deterministic.
  std::sort(inside.begin(), inside.end(), [](const TweetRecord& a, const TweetRecord& b) {
    return std::tie(a.tweet.timestamp, a.tweet.id) < std::tie(b.tweet.timestamp, b.tweet.id);
  });

  Snapshot s;
  s.window = window;
  s.classifier_id = std::move(classifier_id);
  s.population = pop;
  s.hourly = bucket_counts(inside, Granularity::Hour);
  s.daily = bucket_counts(inside, Granularity::Day);
  for (const auto& r : inside) {
    s.totals.add(*r.label);
    if (!r.state) ++s.unresolved;
  }

  std::map<std::int64_t, std::map<std::string, SentimentCounts>> per_day;
  std::map<std::string, SentimentCounts> whole;
  for (const auto& p : s.daily) {
    if (p.state_code == kNationalRegion) continue;
    per_day[p.bucket_start][p.state_code] += p.counts;
    whole[p.state_code] += p.counts;
  }
  for (std::int64_t day = floor_to(window.start, kSecondsPerDay); day <= window.end; day += kSecondsPerDay) {
    const CorpusWindow frame{std::max(day, window.start), std::min(day + kSecondsPerDay - 1, window.end)};
    const auto it = per_day.find(day);
    s.daily_pgpss.push_back(
        {day, score_all_states(it == per_day.end() ? std::map<std::string, SentimentCounts>{} : it->second, frame, pop)});
  }
  s.window_pgpss = score_all_states(whole, window, pop);
  s.top_hashtags = top_tags(std::span<const TweetRecord>(inside), TagKind::Hashtag, kSnapshotTopTags);
  s.top_mentions = top_tags(std::span<const TweetRecord>(inside), TagKind::Mention, kSnapshotTopTags);
  return s;
}

nlohmann::json Snapshot::to_json() const {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& [code, info] : population.states)
    states.push_back({{"code", code}, {"population", info.population}, {"gun_ownership_pct", info.gun_ownership_pct}});
  nlohmann::json daily_scores = nlohmann::json::array();
  for (const auto& d : daily_pgpss) {
    auto j = d.scores.to_json();
    j["date"] = format_date(d.day);
    daily_scores.push_back(std::move(j));
  }
  auto totals_j = counts_json(totals);
  totals_j["total"] = totals.total();
  totals_j["unresolved"] = unresolved;
  return {{"version", kSnapshotVersion},
          {"window", {{"start", format_iso8601(window.start)}, {"end", format_iso8601(window.end)}}},
          {"classifier_id", classifier_id},
          {"states", states},
          {"national_population", population.national_population},
          {"totals", totals_j},
          {"series", {{"hour", series_json(hourly)}, {"day", series_json(daily)}}},
          {"pgpss", {{"window", window_pgpss.to_json()}, {"daily", daily_scores}}},
          {"top_tags", {{"hashtag", tags_json(top_hashtags)}, {"mention", tags_json(top_mentions)}}},
          {"provenance", provenance}};
}

Snapshot Snapshot::from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw CorruptPayload("snapshot is not a JSON object");
    const int version = j.at("version").get<int>();
    if (version != kSnapshotVersion)
      throw VersionMismatch("snapshot version " + std::to_string(version) + ", expected " +
                            std::to_string(kSnapshotVersion));
    Snapshot s;
    const auto start = parse_iso8601(j.at("window").at("start").get<std::string>());
    const auto end = parse_iso8601(j.at("window").at("end").get<std::string>());
    if (!start || !end || *start > *end) throw CorruptPayload("bad snapshot window");
    s.window = {*start, *end};
    s.classifier_id = j.at("classifier_id").get<std::string>();
    for (const auto& st : j.at("states"))
      s.population.states[st.at("code").get<std::string>()] = {st.at("population").get<std::int64_t>(),
                                                                st.at("gun_ownership_pct").get<double>()};
    s.population.national_population = j.at("national_population").get<std::int64_t>();
    s.population.validate();
    s.totals = counts_from(j.at("totals"));
    s.unresolved = j.at("totals").at("unresolved").get<std::uint64_t>();
    s.hourly = series_from(j.at("series").at("hour"), Granularity::Hour);
    s.daily = series_from(j.at("series").at("day"), Granularity::Day);
    s.window_pgpss = PGPSSResult::from_json(j.at("pgpss").at("window"));
    for (const auto& d : j.at("pgpss").at("daily")) {
      const auto day = parse_date(d.at("date").get<std::string>());
      if (!day) throw CorruptPayload("bad pgpss date");
      s.daily_pgpss.push_back({*day, PGPSSResult::from_json(d)});
    }
    s.top_hashtags = tags_from(j.at("top_tags").at("hashtag"), TagKind::Hashtag);
    s.top_mentions = tags_from(j.at("top_tags").at("mention"), TagKind::Mention);
    if (j.contains("provenance")) s.provenance = j.at("provenance");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptPayload(std::string("snapshot: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptPayload(std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path) {
  if (path.extension() == ".gz") {
    const std::string text = snapshot.to_json().dump(1) + '\n';
    gzFile f = gzopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot write " + path.string());
    const int n = gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    if (gzclose(f) != Z_OK || n != static_cast<int>(text.size())) throw IoError("write failed: " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << snapshot.to_json().dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  // gzread passes uncompressed input through unchanged
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw IoError("cannot open " + path.string());
  std::string text;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw IoError("cannot decompress " + path.string());
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw CorruptPayload(path.string() + " is not valid JSON");
  return Snapshot::from_json(j);
}

CorpusWindow covering_window(std::span<const TweetRecord> records) {
  if (records.empty()) throw InvalidArgument("no tweets to cover");
  auto [lo, hi] = std::minmax_element(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return a.tweet.timestamp < b.tweet.timestamp;
  });
  return {floor_to(lo->tweet.timestamp, kSecondsPerDay), floor_to(hi->tweet.timestamp, kSecondsPerDay) + kSecondsPerDay - 1};
}

}  // namespace sentiscope
