#include "sentiscope/corpusgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "sentiscope/error.hpp"
#include "sentiscope/rng.hpp"
#include "sentiscope/timeutil.hpp"

namespace sentiscope {

namespace {

template <typename T>
const T& pick(CounterRng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(rng.below(items.size()))];
}

// Index drawn proportionally to cumulative weights.
std::size_t pick_weighted(CounterRng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulate(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = sum += w[i];
  return c;
}

struct TimeSampler {
  std::vector<std::int64_t> starts, ends;  // half-open segments
  std::vector<double> cumulative;

  explicit TimeSampler(const GeneratorSpec& spec) {
    const std::int64_t s = spec.time_window.start, e = spec.time_window.end + 1;
    std::vector<double> weights;
    const auto add = [&](std::int64_t a, std::int64_t b, double density) {
      if (b <= a) return;
      starts.push_back(a);
      ends.push_back(b);
      weights.push_back(static_cast<double>(b - a) * density);
    };
    if (spec.event_spike) {
      const std::int64_t d0 = floor_to(spec.event_spike->timestamp, kSecondsPerDay);
      const std::int64_t a = std::max(s, d0), b = std::min(e, d0 + kSecondsPerDay);
      add(s, a, 1.0);
      add(a, b, spec.event_spike->multiplier);
      add(b, e, 1.0);
    } else {
      add(s, e, 1.0);
    }
    cumulative = cumulate(weights);
  }

  std::int64_t sample(CounterRng& rng) const {
    const std::size_t k = pick_weighted(rng, cumulative);
    return starts[k] + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(ends[k] - starts[k])));
  }
};

Coordinates sample_inside(CounterRng& rng, const StatePolygon& state) {
  std::vector<double> areas;
  for (const auto& b : state.part_boxes) areas.push_back(std::max(b.area(), 1e-12));
  const auto cumulative = cumulate(areas);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const std::size_t p = pick_weighted(rng, cumulative);
    const BoundingBox& b = state.part_boxes[p];
    const double lon = rng.uniform(b.min_lon, b.max_lon);
    const double lat = rng.uniform(b.min_lat, b.max_lat);
    if (point_in_polygon(lon, lat, state.polygons[p])) return {lat, lon};
  }
  throw GeometryError(state.state_code + ": could not sample a point inside the polygon");
}

std::string format_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "t%07zu", i);
  return buf;
}

std::vector<std::string> strings_at(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<std::string>>();
}

std::string label_key(std::size_t c) { return std::string(label_name(static_cast<SentimentLabel>(c))); }

// Class-keyed object {"pro": x, "anti": y, "neutral": z}; any spelling
// parse_label accepts is fine.
template <typename T>
void read_per_class(const nlohmann::json& j, const char* key, std::array<T, kNumClasses>& out) {
  if (!j.contains(key)) return;
  for (const auto& [k, v] : j.at(key).items()) {
    const auto label = parse_label(k);
    if (!label) throw InvalidSpec(std::string(key) + ": unknown class '" + k + "'");
    out[to_index(*label)] = v.template get<T>();
  }
}

}  // namespace

void GeneratorSpec::validate() const {
  std::set<std::string> seen;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (n_per_class[c] > 0 && class_lexicons[c].empty() && signal_rate > 0.0)
      throw InvalidSpec("class " + label_key(c) + " has no lexicon");
    for (const auto& tok : class_lexicons[c])
      if (!seen.insert(tok).second) throw InvalidSpec("token '" + tok + "' appears in more than one class lexicon");
  }
  for (const auto& tok : shared_lexicon)
    if (seen.contains(tok)) throw InvalidSpec("shared token '" + tok + "' also appears in a class lexicon");
  if (shared_lexicon.empty() && signal_rate < 1.0) throw InvalidSpec("shared lexicon is empty");
  if (!(signal_rate >= 0.0 && signal_rate <= 1.0)) throw InvalidSpec("signal_rate must lie in [0,1]");
  if (!(tag_rate >= 0.0 && tag_rate <= 1.0)) throw InvalidSpec("tag_rate must lie in [0,1]");
  if (!(geotag_rate >= 0.0 && geotag_rate <= 1.0)) throw InvalidSpec("geotag_rate must lie in [0,1]");
  if (min_tokens < 1 || min_tokens > max_tokens) throw InvalidSpec("tokens_per_tweet must be 1 <= min <= max");
  const auto check_tags = [&](const std::vector<std::string>& tags, char sigil) {
    for (const auto& t : tags)
      if (!valid_tag(t, sigil)) throw InvalidSpec("bad tag '" + t + "'");
  };
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    check_tags(class_hashtags[c], '#');
    check_tags(class_mentions[c], '@');
  }
  check_tags(shared_hashtags, '#');
  check_tags(shared_mentions, '@');
  if (tag_rate > 0.0) {
    for (std::size_t c = 0; c < kNumClasses; ++c)
      if (n_per_class[c] > 0 && signal_rate > 0.0 && class_hashtags[c].empty() && class_mentions[c].empty())
        throw InvalidSpec("class " + label_key(c) + " has no tags but tag_rate > 0");
    if (signal_rate < 1.0 && shared_hashtags.empty() && shared_mentions.empty())
      throw InvalidSpec("no shared tags but tag_rate > 0");
  }
  double total = 0.0;
  for (const auto& [code, w] : geo_distribution) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidSpec("geo weight for " + code + " must be nonnegative");
    total += w;
  }
  if (geotag_rate > 0.0 && !(total > 0.0)) throw InvalidSpec("geo_distribution weights are all zero");
  if (time_window.start > time_window.end) throw InvalidSpec("time window is reversed");
  if (event_spike) {
    if (!time_window.contains(event_spike->timestamp)) throw InvalidSpec("event spike lies outside the window");
    if (!(event_spike->multiplier > 0.0)) throw InvalidSpec("event spike multiplier must be positive");
  }
}

nlohmann::json GeneratorSpec::to_json() const {
  nlohmann::json j;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto k = label_key(c);
    j["n_per_class"][k] = n_per_class[c];
    j["class_lexicons"][k] = class_lexicons[c];
    j["class_hashtags"][k] = class_hashtags[c];
    j["class_mentions"][k] = class_mentions[c];
  }
  j["shared_lexicon"] = shared_lexicon;
  j["shared_hashtags"] = shared_hashtags;
  j["shared_mentions"] = shared_mentions;
  j["signal_rate"] = signal_rate;
  j["tokens_per_tweet"] = {min_tokens, max_tokens};
  j["tag_rate"] = tag_rate;
  j["geotag_rate"] = geotag_rate;
  j["geo_distribution"] = geo_distribution;
  j["time_window"] = {{"start", format_iso8601(time_window.start)}, {"end", format_iso8601(time_window.end)}};
  if (event_spike)
    j["event_spike"] = {{"timestamp", format_iso8601(event_spike->timestamp)}, {"multiplier", event_spike->multiplier}};
  j["seed"] = seed;
  return j;
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  GeneratorSpec s = default_generator_spec();
  try {
    if (!j.is_object()) throw InvalidSpec("generator spec must be a JSON object");
    read_per_class(j, "n_per_class", s.n_per_class);
    read_per_class(j, "class_lexicons", s.class_lexicons);
    read_per_class(j, "class_hashtags", s.class_hashtags);
    read_per_class(j, "class_mentions", s.class_mentions);
    if (j.contains("shared_lexicon")) s.shared_lexicon = strings_at(j, "shared_lexicon");
    if (j.contains("shared_hashtags")) s.shared_hashtags = strings_at(j, "shared_hashtags");
    if (j.contains("shared_mentions")) s.shared_mentions = strings_at(j, "shared_mentions");
    s.signal_rate = j.value("signal_rate", s.signal_rate);
    s.tag_rate = j.value("tag_rate", s.tag_rate);
    s.geotag_rate = j.value("geotag_rate", s.geotag_rate);
    if (j.contains("tokens_per_tweet")) {
      const auto& r = j.at("tokens_per_tweet");
      if (!r.is_array() || r.size() != 2) throw InvalidSpec("tokens_per_tweet must be [min, max]");
      s.min_tokens = r[0].get<std::size_t>();
      s.max_tokens = r[1].get<std::size_t>();
    }
    if (j.contains("geo_distribution")) s.geo_distribution = j.at("geo_distribution").get<std::map<std::string, double>>();
    if (j.contains("time_window")) {
      const auto start = parse_iso8601(j.at("time_window").at("start").get<std::string>());
      const auto end = parse_iso8601(j.at("time_window").at("end").get<std::string>());
      if (!start || !end) throw InvalidSpec("unparseable time_window");
      s.time_window = {*start, *end};
    }
    if (j.contains("event_spike")) {
      if (j.at("event_spike").is_null()) {
        s.event_spike.reset();
      } else {
        const auto ts = parse_iso8601(j.at("event_spike").at("timestamp").get<std::string>());
        if (!ts) throw InvalidSpec("unparseable event_spike timestamp");
        s.event_spike = EventSpike{*ts, j.at("event_spike").value("multiplier", 1.0)};
      }
    }
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("generator spec: ") + e.what());
  }
  return s;
}

GeneratorSpec default_generator_spec() {
  GeneratorSpec s;
  s.n_per_class = {2000, 2000, 1000};
  s.class_lexicons[to_index(SentimentLabel::ProGun)] = {
      "rights", "freedom", "defend", "armed", "liberty", "constitution", "nra", "carry", "holster",
      "selfdefense", "patriot", "ammo", "rifle", "protect", "infringed", "militia", "concealed", "owners"};
  s.class_lexicons[to_index(SentimentLabel::AntiGun)] = {
      "ban", "control", "tragedy", "victims", "pray", "heartbroken", "enough", "reform", "assault",
      "senseless", "mourn", "stricter", "background", "checks", "massacre", "outrage", "children", "violence"};
  s.class_lexicons[to_index(SentimentLabel::Neutral)] = {
      "weather", "coffee", "football", "movie", "traffic", "lunch", "music", "holiday", "shopping",
      "weekend", "game", "pizza", "concert", "snow", "birthday", "dinner", "school", "meeting"};
  s.shared_lexicon = {"the", "a", "today", "news", "people", "just", "think", "really", "about", "now",
                      "this", "that", "we", "they", "all", "what", "new", "time", "see", "more"};
  s.class_hashtags[to_index(SentimentLabel::ProGun)] = {"#2ndamendment", "#gunrights", "#nra"};
  s.class_hashtags[to_index(SentimentLabel::AntiGun)] = {"#guncontrol", "#prayfornewtown", "#enough"};
  s.class_hashtags[to_index(SentimentLabel::Neutral)] = {"#nowplaying", "#football", "#christmas"};
  s.class_mentions[to_index(SentimentLabel::ProGun)] = {"@nra", "@gunowners"};
  s.class_mentions[to_index(SentimentLabel::AntiGun)] = {"@bradycampaign", "@momsdemand"};
  s.class_mentions[to_index(SentimentLabel::Neutral)] = {"@espn", "@weatherchannel"};
  s.shared_hashtags = {"#news", "#usa", "#breaking"};
  s.shared_mentions = {"@cnn", "@foxnews", "@ap"};
  s.signal_rate = 0.8;
  s.time_window = {*parse_iso8601("2012-12-10T00:00:00Z"), *parse_iso8601("2012-12-19T23:59:59Z")};
  s.event_spike = EventSpike{*parse_iso8601("2012-12-14T15:00:00Z"), 6.0};
  s.seed = 20121214;
  return s;
}

std::vector<TweetRecord> generate_corpus(const GeneratorSpec& spec, std::span<const StatePolygon> polygons) {
  spec.validate();
  std::vector<const StatePolygon*> states;
  std::vector<double> weights;
  for (const auto& [code, w] : spec.geo_distribution) {
    if (w <= 0.0) continue;
    const auto it = std::find_if(polygons.begin(), polygons.end(),
                                 [&](const StatePolygon& p) { return p.state_code == code; });
    if (it == polygons.end()) {
      if (spec.geotag_rate > 0.0) throw InvalidSpec("no polygon for state '" + code + "'");
      continue;
    }
    states.push_back(&*it);
    weights.push_back(w);
  }
  const auto state_cumulative = cumulate(weights);
  const TimeSampler times(spec);

  std::vector<TweetRecord> out;
  std::size_t index = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto label = static_cast<SentimentLabel>(c);
    for (std::size_t k = 0; k < spec.n_per_class[c]; ++k, ++index) {
      CounterRng rng(spec.seed, index);
      TweetRecord r;
      r.label = label;
      Tweet& t = r.tweet;
      const std::size_t n = spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);
      for (std::size_t i = 0; i < n; ++i) {
        const bool signal = rng.uniform() < spec.signal_rate;
        if (i > 0) t.text += ' ';
        t.text += signal ? pick(rng, spec.class_lexicons[c]) : pick(rng, spec.shared_lexicon);
      }
      const auto add_tag = [&](const std::vector<std::string>& own, const std::vector<std::string>& shared,
                               std::vector<std::string>& field) {
        if (!(rng.uniform() < spec.tag_rate)) return;
        const bool signal = rng.uniform() < spec.signal_rate;
        const auto& pool = signal ? own : shared;
        if (pool.empty()) return;
        const std::string& tag = pick(rng, pool);
        t.text += ' ' + tag;
        field.push_back(tag);
      };
      add_tag(spec.class_hashtags[c], spec.shared_hashtags, t.hashtags);
      add_tag(spec.class_mentions[c], spec.shared_mentions, t.mentions);
      t.timestamp = times.sample(rng);
      t.lang = "en";
      t.country_code = "US";
      if (!states.empty() && rng.uniform() < spec.geotag_rate) {
        const StatePolygon& s = *states[pick_weighted(rng, state_cumulative)];
        t.coordinates = sample_inside(rng, s);
        r.state = s.state_code;
      }
      out.push_back(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TweetRecord& a, const TweetRecord& b) { return a.tweet.timestamp < b.tweet.timestamp; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].tweet.id = format_id(i + 1);
  return out;
}

std::vector<TweetRecord> generate_unique_trigram_corpus(std::size_t n_per_class, std::uint64_t seed) {
  static const std::array<std::array<const char*, 2>, kNumClasses> signals{
      {{"liberty", "armed"}, {"tragedy", "reform"}, {"weather", "coffee"}}};
  std::vector<TweetRecord> out;
  const std::int64_t base = *parse_iso8601("2012-12-14T00:00:00Z");
  for (std::size_t c = 0; c < kNumClasses; ++c)
    for (std::size_t k = 0; k < n_per_class; ++k) {
      const std::size_t i = out.size();
      CounterRng rng(seed, i);
      TweetRecord r;
      r.label = static_cast<SentimentLabel>(c);
      char uniq[16];
      std::snprintf(uniq, sizeof uniq, "u%zu", i);
      // the unique token sits in the middle of every tri-gram window
      r.tweet.text = std::string(signals[c][0]) + ' ' + signals[c][1] + ' ' + uniq + " today";
      r.tweet.timestamp = base + static_cast<std::int64_t>(rng.below(kSecondsPerDay));
      r.tweet.lang = "en";
      out.push_back(std::move(r));
    }
  CounterRng rng(seed, 0xABCDEF);
  rng.shuffle(std::span(out));
  for (std::size_t i = 0; i < out.size(); ++i) out[i].tweet.id = format_id(i + 1);
  return out;
}

void write_corpus_ndjson(std::span<const TweetRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    const Tweet& t = r.tweet;
    nlohmann::json j{{"id", t.id}, {"text", t.text}, {"timestamp", format_iso8601(t.timestamp)},
                     {"hashtags", t.hashtags}, {"mentions", t.mentions}};
    if (t.coordinates) {
      j["lat"] = t.coordinates->lat;
      j["lon"] = t.coordinates->lon;
    }
    if (!t.lang.empty()) j["lang"] = t.lang;
    if (t.country_code) j["country_code"] = *t.country_code;
    j["is_retweet"] = t.is_retweet;
    if (r.label) j["label"] = to_int(*r.label);
    out << j.dump() << '\n';
  }
}

void write_corpus_ndjson(std::span<const TweetRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_corpus_ndjson(records, out);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace sentiscope
