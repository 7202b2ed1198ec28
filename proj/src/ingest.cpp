#include "sentiscope/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "sentiscope/error.hpp"
#include "sentiscope/features.hpp"
#include "sentiscope/timeutil.hpp"

namespace sentiscope {

CorpusWindow make_window(std::int64_t start, std::int64_t end) {
  if (start > end) throw InvalidArgument("window start after end");
  return {start, end};
}

bool valid_coordinates(const Coordinates& c) {
  return c.lat >= -90.0 && c.lat <= 90.0 && c.lon >= -180.0 && c.lon <= 180.0;
}

bool valid_tag(const std::string& tag, char sigil) {
  if (tag.size() < 2 || tag[0] != sigil) return false;
  return std::none_of(tag.begin() + 1, tag.end(), [](char c) {
    return c == ';' || c == ',' || c == '"' || c == ' ' || (c >= '\t' && c <= '\r');
  });
}

std::vector<Tweet> ParseResult::tweets() const {
  std::vector<Tweet> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.tweet);
  return out;
}

namespace {

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::string upper(std::string s) {
  for (char& c : s)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return s;
}

std::string normalize_tag(const std::string& raw, char sigil) {
  std::string tag = lower(raw);
  if (tag.empty() || tag[0] != sigil) tag.insert(tag.begin(), sigil);
  return tag;
}

// Reads an optional tag array; falls back to tags found in the text.
std::vector<std::string> read_tags(const nlohmann::json& obj, const char* field, char sigil,
                                   const std::string& text, std::size_t line,
                                   std::vector<ParseIssue>& warnings) {
  std::vector<std::string> tags;
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    for (const auto& token : tokenize(text))
      if (token.size() > 1 && token[0] == sigil) tags.push_back(token);
  } else if (it->is_array()) {
    for (const auto& element : *it) {
      if (!element.is_string()) {
        warnings.push_back({line, std::string(field) + ": non-string element dropped"});
        continue;
      }
      auto tag = normalize_tag(element.get<std::string>(), sigil);
      if (!valid_tag(tag, sigil)) {
        warnings.push_back({line, std::string(field) + ": invalid tag '" + tag + "' dropped"});
        continue;
      }
      tags.push_back(std::move(tag));
    }
  } else {
    warnings.push_back({line, std::string(field) + ": not an array, ignored"});
  }
  std::vector<std::string> unique;
  for (auto& t : tags)
    if (std::find(unique.begin(), unique.end(), t) == unique.end()) unique.push_back(std::move(t));
  return unique;
}

std::optional<std::string> parse_line(const std::string& line, std::size_t line_no, TweetRecord& out,
                                      std::vector<ParseIssue>& warnings) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) return "invalid JSON";
  if (!j.is_object()) return "not a JSON object";

  Tweet t;
  const auto id = j.find("id");
  if (id == j.end() || id->is_null()) return "missing required field: id";
  if (id->is_string()) {
    t.id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    t.id = id->dump();
  } else {
    return "id must be a string";
  }
  if (t.id.empty()) return "id is empty";

  const auto text = j.find("text");
  if (text == j.end() || text->is_null()) return "missing required field: text";
  if (!text->is_string()) return "text must be a string";
  t.text = text->get<std::string>();

  const auto ts = j.find("timestamp");
  if (ts == j.end() || ts->is_null()) return "missing required field: timestamp";
  if (ts->is_string()) {
    const auto parsed = parse_iso8601(ts->get<std::string>());
    if (!parsed) return "unparseable timestamp '" + ts->get<std::string>() + "'";
    t.timestamp = *parsed;
  } else if (ts->is_number_integer()) {
    t.timestamp = ts->get<std::int64_t>();
  } else {
    return "unparseable timestamp";
  }

  const auto lat = j.find("lat");
  const auto lon = j.find("lon");
  const bool has_lat = lat != j.end() && !lat->is_null();
  const bool has_lon = lon != j.end() && !lon->is_null();
  if (has_lat || has_lon) {
    if (!has_lat || !has_lon || !lat->is_number() || !lon->is_number()) {
      warnings.push_back({line_no, "incomplete or non-numeric coordinates dropped"});
    } else {
      const Coordinates c{lat->get<double>(), lon->get<double>()};
      if (valid_coordinates(c)) {
        t.coordinates = c;
      } else {
        warnings.push_back({line_no, "out-of-range coordinates dropped"});
      }
    }
  }

  t.hashtags = read_tags(j, "hashtags", '#', t.text, line_no, warnings);
  t.mentions = read_tags(j, "mentions", '@', t.text, line_no, warnings);
  if (const auto it = j.find("lang"); it != j.end() && it->is_string()) t.lang = lower(it->get<std::string>());
  if (const auto it = j.find("country_code"); it != j.end() && it->is_string() && !it->get<std::string>().empty())
    t.country_code = upper(it->get<std::string>());
  if (const auto it = j.find("is_retweet"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) return "is_retweet must be a boolean";
    t.is_retweet = it->get<bool>();
  }

  out = TweetRecord{std::move(t), std::nullopt, std::nullopt};
  if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
    std::optional<SentimentLabel> label;
    if (it->is_number_integer()) label = label_from_int(it->get<long long>());
    if (it->is_string()) label = parse_label(it->get<std::string>());
    if (!label) return "invalid label " + it->dump();
    out.label = label;
  }
  return std::nullopt;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || (c >= '\t' && c <= '\r'); });
}

}  // namespace

ParseResult parse_tweet_json(std::istream& in) {
  ParseResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    TweetRecord record;
    if (auto err = parse_line(line, line_no, record, result.warnings)) {
      result.errors.push_back({line_no, std::move(*err)});
      continue;
    }
    if (!seen.insert(record.tweet.id).second) {
      result.errors.push_back({line_no, "duplicate id '" + record.tweet.id + "'"});
      continue;
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

ParseResult parse_tweet_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_tweet_json(in);
}

// ---------------------------------------------------------------------------
// Filters

void FilterRules::validate() const {
  if (keywords.empty() && phrases.empty() && hashtags.empty() && mentions.empty())
    throw InvalidArgument("filter rules need at least one keyword, phrase, hashtag or mention");
}

bool matches_filters(const Tweet& tweet, const FilterRules& rules) {
  if (rules.exclude_retweets && tweet.is_retweet) return false;
  if (rules.country_code && upper(*rules.country_code) != tweet.country_code.value_or("")) return false;
  if (rules.lang && lower(*rules.lang) != tweet.lang) return false;

  const auto has = [](const std::vector<std::string>& list, const std::string& item) {
    return std::find(list.begin(), list.end(), item) != list.end();
  };
  for (const auto& h : rules.hashtags)
    if (has(tweet.hashtags, normalize_tag(h, '#'))) return true;
  for (const auto& m : rules.mentions)
    if (has(tweet.mentions, normalize_tag(m, '@'))) return true;

  if (rules.keywords.empty() && rules.phrases.empty()) return false;
  const auto tokens = tokenize(tweet.text);
  for (const auto& k : rules.keywords)
    if (has(tokens, lower(k))) return true;
  for (const auto& p : rules.phrases) {
    const auto needle = tokenize(p);
    if (needle.empty()) continue;
    if (std::search(tokens.begin(), tokens.end(), needle.begin(), needle.end()) != tokens.end())
      return true;
  }
  return false;
}

std::vector<Tweet> apply_filters(std::span<const Tweet> tweets, const FilterRules& rules) {
  rules.validate();
  std::vector<Tweet> out;
  std::copy_if(tweets.begin(), tweets.end(), std::back_inserter(out),
               [&](const Tweet& t) { return matches_filters(t, rules); });
  return out;
}

std::vector<TweetRecord> apply_filters(std::span<const TweetRecord> records, const FilterRules& rules) {
  rules.validate();
  std::vector<TweetRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const TweetRecord& r) { return matches_filters(r.tweet, rules); });
  return out;
}

// ---------------------------------------------------------------------------
// Trimmed CSV

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t row) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (;; c = in.get()) {
    if (quoted) {
      if (c == EOF) throw CsvFormatError(row, "unterminated quoted field");
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\n' || c == EOF) {
      break;
    } else if (c == '\r' && in.peek() == '\n') {
      in.get();
      break;
    } else {
      if (was_quoted) throw CsvFormatError(row, "characters after closing quote");
      field.push_back(static_cast<char>(c));
    }
  }
  fields.push_back(std::move(field));
  return true;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(';');
    out += items[i];
  }
  return out;
}

std::vector<std::string> split_tags(const std::string& field, char sigil, std::size_t row) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto end = field.find(';', start);
    auto tag = field.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!valid_tag(tag, sigil)) throw CsvFormatError(row, "invalid tag '" + tag + "'");
    out.push_back(std::move(tag));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::size_t write_trimmed_csv(std::span<const TweetRecord> records, std::ostream& out) {
  out << kTrimmedCsvHeader << '\n';
  for (const auto& r : records) {
    const Tweet& t = r.tweet;
    if (t.id.empty()) throw InvalidArgument("tweet with empty id");
    for (const auto& h : t.hashtags)
      if (!valid_tag(h, '#')) throw InvalidArgument("invalid hashtag '" + h + "' in tweet " + t.id);
    for (const auto& m : t.mentions)
      if (!valid_tag(m, '@')) throw InvalidArgument("invalid mention '" + m + "' in tweet " + t.id);
    out << csv_escape(t.id) << ',' << format_iso8601(t.timestamp) << ',' << csv_escape(t.text) << ',';
    if (t.coordinates) out << format_double(t.coordinates->lat) << ',' << format_double(t.coordinates->lon);
    else out << ',';
    out << ',' << csv_escape(r.state.value_or("")) << ',';
    if (r.label) out << to_int(*r.label);
    out << ',' << join(t.hashtags) << ',' << join(t.mentions) << '\n';
  }
  return records.size();
}

std::size_t write_trimmed_csv(std::span<const TweetRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto n = write_trimmed_csv(records, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
  return n;
}

std::size_t write_trimmed_csv(std::span<const Tweet> tweets, const std::filesystem::path& path) {
  std::vector<TweetRecord> records;
  records.reserve(tweets.size());
  for (const auto& t : tweets) records.push_back({t, std::nullopt, std::nullopt});
  return write_trimmed_csv(records, path);
}

std::vector<TweetRecord> read_trimmed_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields, 0)) throw CsvFormatError(0, "missing header");
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + fields[i];
  if (header != kTrimmedCsvHeader) throw CsvFormatError(0, "unexpected header '" + header + "'");

  std::vector<TweetRecord> records;
  for (std::size_t row = 1; read_csv_record(in, fields, row); ++row) {
    if (fields.size() == 1 && fields[0].empty()) {
      --row;
      continue;
    }
    if (fields.size() != 9)
      throw CsvFormatError(row, "expected 9 columns, got " + std::to_string(fields.size()));
    TweetRecord r;
    Tweet& t = r.tweet;
    t.id = fields[0];
    if (t.id.empty()) throw CsvFormatError(row, "empty id");
    const auto ts = parse_iso8601(fields[1]);
    if (!ts) throw CsvFormatError(row, "bad timestamp '" + fields[1] + "'");
    t.timestamp = *ts;
    t.text = fields[2];
    if (!fields[3].empty() || !fields[4].empty()) {
      const auto lat = parse_double(fields[3]);
      const auto lon = parse_double(fields[4]);
      if (!lat || !lon || !valid_coordinates({*lat, *lon})) throw CsvFormatError(row, "bad coordinates");
      t.coordinates = Coordinates{*lat, *lon};
    }
    if (!fields[5].empty()) r.state = fields[5];
    if (!fields[6].empty()) {
      long long v = -1;
      const auto [p, ec] = std::from_chars(fields[6].data(), fields[6].data() + fields[6].size(), v);
      const auto label = (ec == std::errc{} && p == fields[6].data() + fields[6].size()) ? label_from_int(v)
                                                                                        : std::nullopt;
      if (!label) throw CsvFormatError(row, "bad label '" + fields[6] + "'");
      r.label = label;
    }
    t.hashtags = split_tags(fields[7], '#', row);
    t.mentions = split_tags(fields[8], '@', row);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<TweetRecord> read_trimmed_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_trimmed_csv(in);
}

}  // namespace sentiscope
