#include "sentiscope/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "sentiscope/aggregate.hpp"
#include "sentiscope/corpusgen.hpp"
#include "sentiscope/error.hpp"
#include "sentiscope/geo.hpp"
#include "sentiscope/parallel.hpp"
#include "sentiscope/scoring.hpp"
#include "sentiscope/service.hpp"
#include "sentiscope/timeutil.hpp"

namespace sentiscope {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace {

std::vector<std::string> str_list(const json& j, const char* key) {
  return j.contains(key) ? j.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
}

AlgorithmSpec algorithm_from_json(const json& j, std::uint64_t seed) {
  const std::string name = j.is_string() ? j.get<std::string>() : j.at("algorithm").get<std::string>();
  const auto a = parse_algorithm(name);
  if (!a) throw InvalidArgument("unknown algorithm '" + name + "'");
  AlgorithmSpec spec{*a, {}, seed};
  if (j.is_object() && j.contains("hyperparameters")) spec.hyperparameters = j.at("hyperparameters").get<Hyperparameters>();
  resolve_hyperparameters(spec);
  return spec;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  try {
    if (const int v = j.value("version", kConfigVersion); v != kConfigVersion)
      throw VersionMismatch("config version " + std::to_string(v) + ", expected " + std::to_string(kConfigVersion));
    c.seed = j.value("seed", c.seed);
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.input = p.value("input", c.input);
      c.output_dir = p.value("output_dir", c.output_dir);
      c.geo = p.value("geo", c.geo);
      c.population_csv = p.value("population_csv", c.population_csv);
    }
    if (j.contains("filters")) {
      const auto& f = j.at("filters");
      c.filters.keywords = str_list(f, "keywords");
      c.filters.phrases = str_list(f, "phrases");
      c.filters.hashtags = str_list(f, "hashtags");
      c.filters.mentions = str_list(f, "mentions");
      if (f.contains("country_code") && !f.at("country_code").is_null())
        c.filters.country_code = f.at("country_code").get<std::string>();
      if (f.contains("lang") && !f.at("lang").is_null()) c.filters.lang = f.at("lang").get<std::string>();
      c.filters.exclude_retweets = f.value("exclude_retweets", false);
    }
    if (j.contains("features")) {
      const auto& f = j.at("features");
      c.features.ngram_order = f.value("ngram_order", c.features.ngram_order);
      c.features.use_hashtags = f.value("use_hashtags", c.features.use_hashtags);
      c.features.use_mentions = f.value("use_mentions", c.features.use_mentions);
      c.features.min_doc_freq = f.value("min_doc_freq", c.features.min_doc_freq);
      c.features.lowercase = f.value("lowercase", c.features.lowercase);
    }
    if (j.contains("algorithms"))
      for (const auto& a : j.at("algorithms")) c.algorithms.push_back(algorithm_from_json(a, c.seed));
    if (j.contains("cv")) c.folds = j.at("cv").value("folds", c.folds);
    if (j.contains("quota")) {
      c.quota = {};
      for (const auto& [k, v] : j.at("quota").items()) {
        const auto label = parse_label(k);
        if (!label) throw InvalidArgument("quota: unknown class '" + k + "'");
        c.quota[to_index(*label)] = v.get<std::size_t>();
      }
    }
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("generator")) c.generator = j.at("generator");
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.features.validate();
  for (auto& a : c.algorithms) a.rng_seed = c.seed;
  return c;
}

json PipelineConfig::hashed_json() const {
  json f{{"keywords", filters.keywords}, {"phrases", filters.phrases},   {"hashtags", filters.hashtags},
         {"mentions", filters.mentions}, {"exclude_retweets", filters.exclude_retweets}};
  f["country_code"] = filters.country_code ? json(*filters.country_code) : json(nullptr);
  f["lang"] = filters.lang ? json(*filters.lang) : json(nullptr);
  json algos = json::array();
  for (const auto& a : algorithms)
    algos.push_back({{"algorithm", algorithm_name(a.algorithm)}, {"hyperparameters", a.hyperparameters}});
  json quota_j;
  for (std::size_t c = 0; c < kNumClasses; ++c) quota_j[std::string(label_name(static_cast<SentimentLabel>(c)))] = quota[c];
  return {{"version", kConfigVersion},
          {"seed", seed},
          {"filters", f},
          {"features",
           {{"ngram_order", features.ngram_order},
            {"use_hashtags", features.use_hashtags},
            {"use_mentions", features.use_mentions},
            {"min_doc_freq", features.min_doc_freq},
            {"lowercase", features.lowercase}}},
          {"algorithms", algos},
          {"cv", {{"folds", folds}}},
          {"quota", quota_j},
          {"sizes", sizes},
          {"generator", generator}};
}

json PipelineConfig::to_json() const {
  json j = hashed_json();
  j["paths"] = {{"input", input}, {"output_dir", output_dir}, {"geo", geo}, {"population_csv", population_csv}};
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const PipelineConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.hashed_json().dump())));
  return buf;
}

json provenance_json(const PipelineConfig& config) {
  return {{"version", SENTISCOPE_VERSION}, {"seed", config.seed}, {"config_hash", config_hash(config)}};
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void log(const std::string& message) { std::cerr << "sentiscope: " << message << '\n'; }

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  const auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InvalidArgument(path.string() + " is not valid JSON");
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

// Artifacts that cannot hold a provenance block get a sidecar.
void write_sidecar(const fs::path& path, const PipelineConfig& config) {
  write_file(path.string() + ".meta.json", json{{"provenance", provenance_json(config)}}.dump(2) + "\n");
}

fs::path output_path(const PipelineConfig& config, const std::string& flag, const char* default_name) {
  if (!flag.empty()) return flag;
  return fs::path(config.output_dir) / default_name;
}

std::string input_path(const PipelineConfig& config, const std::string& flag) {
  const std::string p = flag.empty() ? config.input : flag;
  if (p.empty()) throw UsageError("no input file (use --in or paths.input)");
  return p;
}

bool is_csv(const fs::path& p) { return p.extension() == ".csv"; }

// Trimmed CSV or newline-delimited JSON, by extension.
std::vector<TweetRecord> read_records(const fs::path& path) {
  if (is_csv(path)) return read_trimmed_csv(path);
  auto parsed = parse_tweet_json_file(path);
  for (const auto& e : parsed.errors) log(path.string() + ":" + std::to_string(e.line) + ": skipped: " + e.reason);
  if (!parsed.warnings.empty()) log(std::to_string(parsed.warnings.size()) + " warnings while parsing " + path.string());
  return std::move(parsed.records);
}

std::vector<Tweet> tweets_of(std::span<const TweetRecord> records) {
  std::vector<Tweet> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.tweet);
  return out;
}

std::vector<SentimentLabel> labels_of(std::span<const TweetRecord> records) {
  std::vector<SentimentLabel> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.label) throw InvalidArgument("tweet " + r.tweet.id + " has no label");
    out.push_back(*r.label);
  }
  return out;
}

StateGeo load_geo(const PipelineConfig& config, const std::string& flag) {
  const std::string p = flag.empty() ? config.geo : flag;
  if (p.empty()) throw UsageError("no geo fixture (use --geo or paths.geo)");
  StateGeo geo = load_state_geo(p);
  if (!config.population_csv.empty()) apply_population_overrides(geo.population, config.population_csv);
  return geo;
}

void save_bundle(const fs::path& path, const Vocabulary& vocab, const TrainedModel& model, const json& provenance) {
  const json j{{"version", 1},
               {"vocabulary", json::parse(vocab.to_json())},
               {"model", json::parse(model.serialize())},
               {"provenance", provenance}};
  write_file(path, j.dump() + "\n");
}

std::pair<Vocabulary, TrainedModel> load_bundle(const fs::path& path) {
  const json j = read_json_file(path);
  if (!j.is_object() || !j.contains("vocabulary") || !j.contains("model"))
    throw CorruptPayload(path.string() + " is not a model bundle");
  if (j.value("version", 0) != 1) throw VersionMismatch("unsupported model bundle version");
  Vocabulary vocab = Vocabulary::from_json(j.at("vocabulary").dump());
  TrainedModel model = TrainedModel::deserialize(j.at("model").dump());
  if (model.vocab_size() != vocab.size()) throw DimensionMismatch("model and vocabulary sizes differ");
  return {std::move(vocab), std::move(model)};
}

std::optional<std::int64_t> date_flag(const std::string& value, const char* name) {
  if (value.empty()) return std::nullopt;
  const auto d = parse_date(value);
  if (!d) throw UsageError(std::string(name) + " must be YYYY-MM-DD");
  return d;
}

CorpusWindow window_from(std::span<const TweetRecord> records, const std::string& from, const std::string& to) {
  const auto lo = date_flag(from, "--from");
  const auto hi = date_flag(to, "--to");
  if (lo && hi) {
    if (*lo > *hi) throw UsageError("--from is after --to");
    return {*lo, *hi + kSecondsPerDay - 1};
  }
  const CorpusWindow cover = covering_window(records);
  return {lo.value_or(cover.start), hi ? *hi + kSecondsPerDay - 1 : cover.end};
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

// ---------------------------------------------------------------------------
// Options

struct Options {
  std::string config_path;
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;

  std::string in, out, geo, spec, kind = "standard", model, format, from, to, classifier_id, snapshot, host = "127.0.0.1",
      port_file, dtm, vocab;
  std::optional<std::size_t> total, per_class, folds, min_df;
  std::optional<double> signal_rate;
  std::optional<int> ngram;
  bool no_hashtags = false, no_mentions = false, strict = false, table1 = false, table2 = false;
  std::vector<std::string> params, algorithms, quota;
  std::vector<std::size_t> sizes;
  int port = 8080;
  std::string algorithm;
};

PipelineConfig effective_config(const Options& o) {
  json j = o.config_path.empty() ? json::object() : read_json_file(o.config_path);
  PipelineConfig c = PipelineConfig::from_json(j);
  if (o.seed) {
    c.seed = *o.seed;
    for (auto& a : c.algorithms) a.rng_seed = c.seed;
  }
  if (o.ngram) c.features.ngram_order = *o.ngram;
  if (o.min_df) c.features.min_doc_freq = static_cast<int>(*o.min_df);
  if (o.no_hashtags) c.features.use_hashtags = false;
  if (o.no_mentions) c.features.use_mentions = false;
  if (o.folds) c.folds = *o.folds;
  if (!o.sizes.empty()) c.sizes = o.sizes;
  if (!o.quota.empty()) {
    if (o.quota.size() != kNumClasses) throw UsageError("--quota takes three counts: pro,anti,neutral");
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      try {
        c.quota[i] = std::stoull(o.quota[i]);
      } catch (const std::exception&) {
        throw UsageError("--quota values must be integers");
      }
    }
  }
  if (!o.algorithms.empty()) {
    c.algorithms.clear();
    for (const auto& name : o.algorithms) {
      const auto a = parse_algorithm(name);
      if (!a) throw UsageError("unknown algorithm '" + name + "'");
      c.algorithms.push_back({*a, {}, c.seed});
    }
  }
  c.features.validate();
  return c;
}

AlgorithmSpec single_algorithm(const Options& o, const PipelineConfig& c) {
  AlgorithmSpec spec;
  if (!o.algorithm.empty()) {
    const auto a = parse_algorithm(o.algorithm);
    if (!a) throw UsageError("unknown algorithm '" + o.algorithm + "'");
    spec = {*a, {}, c.seed};
    for (const auto& cfg : c.algorithms)
      if (cfg.algorithm == *a) spec.hyperparameters = cfg.hyperparameters;
  } else if (!c.algorithms.empty()) {
    spec = c.algorithms.front();
  } else {
    throw UsageError("no algorithm (use --algorithm or the config's algorithms list)");
  }
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + kv + "'");
    try {
      std::size_t used = 0;
      const std::string v = kv.substr(eq + 1);
      spec.hyperparameters[kv.substr(0, eq)] = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw UsageError("--param value is not a number: '" + kv + "'");
    }
  }
  spec.rng_seed = c.seed;
  resolve_hyperparameters(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_gen(const Options& o, PipelineConfig c) {
  const fs::path out = output_path(c, o.out, "corpus.ndjson");
  std::vector<TweetRecord> corpus;
  if (o.kind == "unique-trigram") {
    c.generator = {{"kind", "unique-trigram"}, {"n_per_class", o.per_class.value_or(100)}};
    corpus = generate_unique_trigram_corpus(o.per_class.value_or(100), c.seed);
  } else if (o.kind == "standard") {
    json spec_json = c.generator;
    if (!o.spec.empty()) spec_json = read_json_file(o.spec);
    GeneratorSpec spec = GeneratorSpec::from_json(spec_json);
    spec.seed = c.seed;
    if (o.total) {
      // keep the spec's class mix at the requested size
      ClassQuota weights{};
      for (std::size_t k = 0; k < kNumClasses; ++k) weights[k] = spec.n_per_class[k] * *o.total;
      if (std::accumulate(weights.begin(), weights.end(), std::size_t{0}) == 0 && *o.total > 0)
        throw InvalidSpec("cannot scale an empty class mix");
      spec.n_per_class = scale_quota(weights, *o.total);
    }
    if (o.signal_rate) spec.signal_rate = *o.signal_rate;
    StateGeo geo;
    const std::string geo_path = o.geo.empty() ? c.geo : o.geo;
    if (!geo_path.empty()) {
      geo = load_geo(c, o.geo);
      if (spec.geo_distribution.empty())
        for (const auto& [code, info] : geo.population.states) spec.geo_distribution[code] = static_cast<double>(info.population);
    } else if (spec.geotag_rate > 0.0) {
      log("no geo fixture given; generated tweets carry no coordinates");
      spec.geotag_rate = 0.0;
    }
    c.generator = spec.to_json();
    corpus = generate_corpus(spec, geo.polygons);
  } else {
    throw UsageError("--kind must be standard or unique-trigram");
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_corpus_ndjson(corpus, out);
  write_sidecar(out, c);
  log("wrote " + std::to_string(corpus.size()) + " tweets to " + out.string());
}

void cmd_ingest(const Options& o, const PipelineConfig& c) {
  const fs::path in = input_path(c, o.in);
  const fs::path out = output_path(c, o.out, "tweets.csv");
  std::vector<TweetRecord> records;
  if (is_csv(in)) {
    records = read_trimmed_csv(in);
  } else {
    auto parsed = parse_tweet_json_file(in);
    for (const auto& e : parsed.errors) log(in.string() + ":" + std::to_string(e.line) + ": " + e.reason);
    for (const auto& w : parsed.warnings) log(in.string() + ":" + std::to_string(w.line) + ": warning: " + w.reason);
    if (o.strict && !parsed.errors.empty())
      throw InvalidArgument(std::to_string(parsed.errors.size()) + " malformed records in " + in.string());
    records = std::move(parsed.records);
  }
  const FilterRules& f = c.filters;
  const bool has_terms = !f.keywords.empty() || !f.phrases.empty() || !f.hashtags.empty() || !f.mentions.empty();
  if (has_terms) {
    const std::size_t before = records.size();
    records = apply_filters(std::span<const TweetRecord>(records), f);
    log("filters kept " + std::to_string(records.size()) + " of " + std::to_string(before) + " tweets");
  }
  const std::string geo_path = o.geo.empty() ? c.geo : o.geo;
  if (!geo_path.empty()) {
    const StateGeo geo = load_geo(c, o.geo);
    assign_states(records, geo.polygons);
  }
  write_trimmed_csv(std::span<const TweetRecord>(records), out);
  write_sidecar(out, c);
  log("wrote " + std::to_string(records.size()) + " tweets to " + out.string());
}

void cmd_featurize(const Options& o, const PipelineConfig& c) {
  const auto records = read_records(input_path(c, o.in));
  const auto tweets = tweets_of(records);
  const Vocabulary vocab = build_vocabulary(tweets, c.features);
  const fs::path out = output_path(c, o.out, "vocabulary.json");
  json j = json::parse(vocab.to_json());
  j["provenance"] = provenance_json(c);
  write_file(out, j.dump() + "\n");
  if (!o.dtm.empty()) {
    // Matrix Market coordinate format, 1-based.
    const auto dtm = vectorize_corpus(tweets, vocab);
    std::ostringstream mm;
    mm << "%%MatrixMarket matrix coordinate integer general\n";
    mm << "% " << json{{"provenance", provenance_json(c)}}.dump() << '\n';
    mm << dtm.n_docs() << ' ' << dtm.n_terms() << ' ' << dtm.nnz() << '\n';
    for (std::size_t r = 0; r < dtm.n_docs(); ++r)
      for (const auto& tc : dtm.row(r)) mm << r + 1 << ' ' << tc.column + 1 << ' ' << tc.count << '\n';
    write_file(o.dtm, mm.str());
  }
  log("vocabulary of " + std::to_string(vocab.size()) + " terms written to " + out.string());
}

void cmd_train(const Options& o, const PipelineConfig& c) {
  const auto records = read_records(input_path(c, o.in));
  const auto tweets = tweets_of(records);
  const auto labels = labels_of(records);
  const AlgorithmSpec spec = single_algorithm(o, c);
  const Vocabulary vocab = o.vocab.empty() ? build_vocabulary(tweets, c.features) : Vocabulary::load(o.vocab);
  TrainedModel model = train(spec, vectorize_corpus(tweets, vocab), labels);
  const json prov = provenance_json(c);
  for (const auto& [k, v] : prov.items()) model.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
  const fs::path out = output_path(c, o.out, "model.json");
  save_bundle(out, vocab, model, prov);
  log("trained " + std::string(algorithm_name(spec.algorithm)) + " on " + std::to_string(tweets.size()) +
      " tweets; model written to " + out.string());
}

void cmd_classify(const Options& o, const PipelineConfig& c) {
  if (o.model.empty()) throw UsageError("--model is required");
  auto records = read_records(input_path(c, o.in));
  const auto [vocab, model] = load_bundle(o.model);
  const auto predicted = model.predict(vectorize_corpus(tweets_of(records), vocab));
  std::size_t agree = 0, gold = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].label) {
      ++gold;
      agree += *records[i].label == predicted[i] ? 1 : 0;
    }
    records[i].label = predicted[i];
  }
  if (gold > 0)
    log("agreement with existing labels: " + std::to_string(agree) + "/" + std::to_string(gold));
  const fs::path out = output_path(c, o.out, "classified.csv");
  write_trimmed_csv(std::span<const TweetRecord>(records), out);
  write_sidecar(out, c);
  log("classified " + std::to_string(records.size()) + " tweets into " + out.string());
}

void cmd_score(const Options& o, const PipelineConfig& c) {
  const auto records = read_records(input_path(c, o.in));
  const StateGeo geo = load_geo(c, o.geo);
  const CorpusWindow window = window_from(records, o.from, o.to);
  std::map<std::string, SentimentCounts> counts;
  for (const auto& r : records) {
    if (!r.label) throw InvalidArgument("tweet " + r.tweet.id + " has no label");
    if (r.state && window.contains(r.tweet.timestamp)) counts[*r.state].add(*r.label);
  }
  const PGPSSResult result = score_all_states(counts, window, geo.population);
  const std::string format = o.format.empty() ? (is_csv(o.out) ? "csv" : "json") : o.format;
  const fs::path out = output_path(c, o.out, format == "csv" ? "scores.csv" : "scores.json");
  if (format == "csv") {
    write_file(out, result.to_csv());
    write_sidecar(out, c);
  } else if (format == "json") {
    json j = result.to_json();
    j["provenance"] = provenance_json(c);
    write_file(out, j.dump(1) + "\n");
  } else {
    throw UsageError("--format must be json or csv");
  }
  log("scores written to " + out.string());
}

void cmd_snapshot(const Options& o, const PipelineConfig& c) {
  const auto records = read_records(input_path(c, o.in));
  const StateGeo geo = load_geo(c, o.geo);
  const CorpusWindow window = window_from(records, o.from, o.to);
  Snapshot s = build_snapshot(records, geo.population, window, o.classifier_id.empty() ? "unspecified" : o.classifier_id);
  s.provenance = provenance_json(c);
  const fs::path out = output_path(c, o.out, "snapshot.json");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_snapshot(s, out);
  log("snapshot of " + std::to_string(s.totals.total()) + " tweets written to " + out.string());
}

void cmd_evaluate(const Options& o, const PipelineConfig& c) {
  if (o.table1 == o.table2) throw UsageError("choose exactly one of --table1 or --table2");
  const auto records = read_records(input_path(c, o.in));
  const auto tweets = tweets_of(records);
  const auto labels = labels_of(records);
  std::vector<AlgorithmSpec> specs = c.algorithms;
  if (specs.empty())
    for (const auto a : kAllAlgorithms) specs.push_back({a, {}, c.seed});
  std::vector<std::size_t> sizes;
  std::vector<FeatureConfig> configs;
  const std::size_t total = std::accumulate(c.quota.begin(), c.quota.end(), std::size_t{0});
  if (o.table1) {
    sizes = c.sizes;
    configs = {c.features};
  } else {
    sizes = {total};
    for (int n = 1; n <= 3; ++n) {
      FeatureConfig f = c.features;
      f.ngram_order = n;
      configs.push_back(f);
    }
  }
  for (const auto s : sizes)
    if (s > total) throw UsageError("training size " + std::to_string(s) + " exceeds the quota total");
  const ComparisonTable table = compare_models(specs, sizes, configs, tweets, labels, c.quota, c.folds, c.seed);
  for (std::size_t r = 0; r < table.notes.size(); ++r)
    for (std::size_t k = 0; k < table.notes[r].size(); ++k)
      if (!table.notes[r][k].empty())
        log(table.row_keys[r] + " / " + table.columns[k] + ": " + kNotAvailable + " (" + one_line(table.notes[r][k]) + ")");
  std::string format = o.format;
  if (format.empty()) format = o.out.empty() ? "text" : fs::path(o.out).extension() == ".json" ? "json" : "csv";
  std::string content;
  if (format == "csv") {
    content = table.to_csv();
  } else if (format == "json") {
    json j = json::parse(table.to_json());
    j["provenance"] = provenance_json(c);
    content = j.dump(2) + "\n";
  } else if (format == "text") {
    content = table.to_text();
  } else {
    throw UsageError("--format must be csv, json or text");
  }
  if (o.out.empty()) {
    std::cout << content;
  } else {
    write_file(o.out, content);
    if (format != "json") write_sidecar(o.out, c);
    log("table written to " + o.out);
  }
}

void cmd_serve(const Options& o, const PipelineConfig& c) {
  const fs::path snap = o.snapshot.empty() ? fs::path(c.output_dir) / "snapshot.json" : fs::path(o.snapshot);
  serve(snap, o.host, o.port, [&](int port) {
    log("serving " + snap.string() + " on http://" + o.host + ":" + std::to_string(port));
    if (!o.port_file.empty()) write_file(o.port_file, std::to_string(port) + "\n");
  });
  log("shut down");
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Event-sentiment analytics pipeline", "sentiscope"};
  app.set_version_flag("--version", SENTISCOPE_VERSION);
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--jobs", o.jobs, "Worker thread cap (0 = hardware concurrency)");
  app.add_option("--seed", o.seed, "Override the config seed");

  auto* gen = app.add_subcommand("gen", "Generate a synthetic labeled corpus (ndjson)");
  gen->add_option("--out", o.out, "Output ndjson");
  gen->add_option("--spec", o.spec, "Generator spec JSON")->check(CLI::ExistingFile);
  gen->add_option("--geo", o.geo, "State GeoJSON fixture")->check(CLI::ExistingFile);
  gen->add_option("--total", o.total, "Total tweets, split in the spec's class proportions");
  gen->add_option("--signal-rate", o.signal_rate, "Fraction of class-lexicon tokens")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--kind", o.kind, "standard | unique-trigram");
  gen->add_option("--per-class", o.per_class, "Tweets per class (unique-trigram)");

  auto* ingest = app.add_subcommand("ingest", "Parse, filter and geo-assign tweets into the trimmed CSV");
  ingest->add_option("--in", o.in, "Input ndjson or CSV");
  ingest->add_option("--out", o.out, "Output CSV");
  ingest->add_option("--geo", o.geo, "State GeoJSON fixture")->check(CLI::ExistingFile);
  ingest->add_flag("--strict", o.strict, "Fail on malformed records");

  auto* featurize = app.add_subcommand("featurize", "Build the vocabulary (and optionally the DTM)");
  featurize->add_option("--in", o.in, "Input CSV or ndjson");
  featurize->add_option("--out", o.out, "Output vocabulary JSON");
  featurize->add_option("--dtm", o.dtm, "Also write the DTM in Matrix Market format");

  auto* train_cmd = app.add_subcommand("train", "Train one classifier on labeled tweets");
  train_cmd->add_option("--in", o.in, "Labeled CSV or ndjson");
  train_cmd->add_option("--out", o.out, "Output model bundle JSON");
  train_cmd->add_option("--algorithm", o.algorithm, "NB, ME, Tree, Bagging, Boosting, RF, SVM or NN");
  train_cmd->add_option("--param", o.params, "Hyperparameter override key=value");
  train_cmd->add_option("--vocab", o.vocab, "Reuse a vocabulary instead of building one")->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated comparison tables");
  evaluate->add_option("--in", o.in, "Labeled pool (CSV or ndjson)");
  evaluate->add_option("--out", o.out, "Output table (stdout when omitted)");
  evaluate->add_option("--format", o.format, "csv | json | text");
  auto* t1 = evaluate->add_flag("--table1", o.table1, "Training sizes x algorithms");
  auto* t2 = evaluate->add_flag("--table2", o.table2, "N-gram orders x algorithms");
  t1->excludes(t2);
  evaluate->add_option("--folds", o.folds, "Cross-validation folds");
  evaluate->add_option("--quota", o.quota, "Class quota pro,anti,neutral")->delimiter(',');
  evaluate->add_option("--sizes", o.sizes, "Training sizes (table 1)")->delimiter(',');
  evaluate->add_option("--algorithms", o.algorithms, "Algorithms to compare")->delimiter(',');

  auto* classify = app.add_subcommand("classify", "Label tweets with a trained model");
  classify->add_option("--in", o.in, "Input CSV or ndjson");
  classify->add_option("--model", o.model, "Model bundle")->check(CLI::ExistingFile);
  classify->add_option("--out", o.out, "Output CSV");

  auto* score = app.add_subcommand("score", "Per-state PGPSS over a window");
  score->add_option("--in", o.in, "Classified CSV");
  score->add_option("--geo", o.geo, "State GeoJSON fixture")->check(CLI::ExistingFile);
  score->add_option("--out", o.out, "Output JSON or CSV");
  score->add_option("--format", o.format, "json | csv");
  score->add_option("--from", o.from, "First day, YYYY-MM-DD");
  score->add_option("--to", o.to, "Last day, YYYY-MM-DD");

  auto* snapshot = app.add_subcommand("snapshot", "Aggregate classified tweets into a service snapshot");
  snapshot->add_option("--in", o.in, "Classified CSV");
  snapshot->add_option("--geo", o.geo, "State GeoJSON fixture")->check(CLI::ExistingFile);
  snapshot->add_option("--out", o.out, "Output snapshot JSON");
  snapshot->add_option("--classifier-id", o.classifier_id, "Label recorded as the snapshot's classifier");
  snapshot->add_option("--from", o.from, "First day, YYYY-MM-DD");
  snapshot->add_option("--to", o.to, "Last day, YYYY-MM-DD");

  auto* serve_cmd = app.add_subcommand("serve", "Serve a snapshot over HTTP");
  serve_cmd->add_option("--snapshot", o.snapshot, "Snapshot JSON (plain or gzip)")->check(CLI::ExistingFile);
  serve_cmd->add_option("--host", o.host, "Bind address");
  serve_cmd->add_option("--port", o.port, "Port (0 = ephemeral)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--port-file", o.port_file, "Write the bound port here once listening");

  for (auto* sub : {featurize, train_cmd, evaluate}) {
    sub->add_option("--ngram", o.ngram, "N-gram order 1-3")->check(CLI::Range(1, 3));
    sub->add_option("--min-df", o.min_df, "Minimum document frequency");
    sub->add_flag("--no-hashtags", o.no_hashtags, "Drop hashtag features");
    sub->add_flag("--no-mentions", o.no_mentions, "Drop mention features");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const PipelineConfig config = effective_config(o);
    if (o.jobs > 0) set_max_jobs(o.jobs);
    if (gen->parsed()) cmd_gen(o, config);
    else if (ingest->parsed()) cmd_ingest(o, config);
    else if (featurize->parsed()) cmd_featurize(o, config);
    else if (train_cmd->parsed()) cmd_train(o, config);
    else if (evaluate->parsed()) cmd_evaluate(o, config);
    else if (classify->parsed()) cmd_classify(o, config);
    else if (score->parsed()) cmd_score(o, config);
    else if (snapshot->parsed()) cmd_snapshot(o, config);
    else if (serve_cmd->parsed()) cmd_serve(o, config);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.code() << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sentiscope
