#include "sentiscope/features.hpp"

#include <algorithm>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "sentiscope/error.hpp"

namespace sentiscope {

namespace {

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }
bool is_word(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c >= 0x80;
}
bool is_letter(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (ascii_lower(s[i]) != prefix[i]) return false;
  return true;
}

bool looks_like_url(std::string_view chunk) {
  std::size_t i = 0;
  while (i < chunk.size() && !is_word(static_cast<unsigned char>(chunk[i]))) ++i;
  const auto rest = chunk.substr(i);
  return starts_with_ci(rest, "http://") || starts_with_ci(rest, "https://") ||
         starts_with_ci(rest, "www.");
}

std::string collapse_elongation(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  std::size_t run = 0;
  for (std::size_t i = 0; i < token.size(); ++i) {
    const char c = token[i];
    run = (i > 0 && c == token[i - 1]) ? run + 1 : 1;
    if (run > 3 && is_letter(static_cast<unsigned char>(c))) continue;
    out.push_back(c);
  }
  return out;
}

bool is_tag_token(const std::string& token) {
  return token.size() > 1 && (token[0] == '#' || token[0] == '@');
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  std::string chunk;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) break;
    chunk.assign(text.substr(start, pos - start));
    if (lowercase) std::transform(chunk.begin(), chunk.end(), chunk.begin(), ascii_lower);

    if (chunk == kUrlToken || looks_like_url(chunk)) {
      tokens.emplace_back(kUrlToken);
      continue;
    }
    const auto word = [&](std::size_t k) {
      return k < chunk.size() && is_word(static_cast<unsigned char>(chunk[k]));
    };
    std::size_t i = 0;
    while (i < chunk.size()) {
      const char c = chunk[i];
      if ((c == '#' || c == '@') && (i == 0 || !word(i - 1)) && word(i + 1)) {
        std::size_t j = i + 1;
        while (word(j)) ++j;
        tokens.push_back(collapse_elongation(std::string_view(chunk).substr(i, j - i)));
        i = j;
      } else if (word(i)) {
        std::size_t j = i;
        for (;;) {
          while (word(j)) ++j;
          if (j < chunk.size() && chunk[j] == '\'' && word(j + 1)) {
            ++j;
            continue;
          }
          break;
        }
        tokens.push_back(collapse_elongation(std::string_view(chunk).substr(i, j - i)));
        i = j;
      } else {
        ++i;
      }
    }
  }
  return tokens;
}

std::vector<std::string> extract_ngrams(std::span<const std::string> tokens, int n) {
  if (n < 1 || n > 3) throw InvalidArgument("n-gram order must be 1, 2 or 3");
  std::vector<std::string> out;
  const auto order = static_cast<std::size_t>(n);
  if (tokens.size() < order) return out;
  out.reserve(tokens.size() - order + 1);
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t k = 1; k < order; ++k) {
      gram.push_back(' ');
      gram += tokens[i + k];
    }
    out.push_back(std::move(gram));
  }
  return out;
}

std::vector<std::string> extract_tag_features(const Tweet& tweet) {
  std::vector<std::string> out;
  const auto add = [&](const std::string& tag) {
    std::string t(kTagPrefix);
    for (char c : tag) t.push_back(ascii_lower(c));
    out.push_back(std::move(t));
  };
  for (const auto& h : tweet.hashtags) add(h);
  for (const auto& m : tweet.mentions) add(m);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void FeatureConfig::validate() const {
  if (ngram_order < 1 || ngram_order > 3)
    throw InvalidArgument("ngram_order must be 1, 2 or 3 (got " + std::to_string(ngram_order) + ")");
  if (min_doc_freq < 1) throw InvalidArgument("min_doc_freq must be >= 1");
}

std::string ngram_name(int order) {
  switch (order) {
    case 1:
      return "uni-gram";
    case 2:
      return "bi-gram";
    case 3:
      return "tri-gram";
  }
  return std::to_string(order) + "-gram";
}

std::vector<std::string> document_terms(const Tweet& tweet, const FeatureConfig& config) {
  const auto tokens = tokenize(tweet.text, config.lowercase);
  std::vector<std::string> terms;
  std::vector<std::string> run;
  const auto flush = [&] {
    auto grams = extract_ngrams(run, config.ngram_order);
    std::move(grams.begin(), grams.end(), std::back_inserter(terms));
    run.clear();
  };
  for (const auto& token : tokens) {
    if (is_tag_token(token)) {
      flush();
    } else {
      run.push_back(token);
    }
  }
  flush();
  if (config.use_hashtags || config.use_mentions) {
    for (auto& tag : extract_tag_features(tweet)) {
      const char sigil = tag[kTagPrefix.size()];
      if ((sigil == '#' && config.use_hashtags) || (sigil == '@' && config.use_mentions))
        terms.push_back(std::move(tag));
    }
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Vocabulary

namespace {

bool term_fits(const std::string& term, const FeatureConfig& config) {
  if (term.empty()) return false;
  if (term.starts_with(kTagPrefix)) {
    if (term.size() <= kTagPrefix.size() + 1) return false;
    const char sigil = term[kTagPrefix.size()];
    return (sigil == '#' && config.use_hashtags) || (sigil == '@' && config.use_mentions);
  }
  const auto spaces = std::count(term.begin(), term.end(), ' ');
  return spaces == config.ngram_order - 1 && term.front() != ' ' && term.back() != ' ' &&
         term.find("  ") == std::string::npos;
}

nlohmann::json config_to_json(const FeatureConfig& c) {
  return {{"ngram_order", c.ngram_order},
          {"use_hashtags", c.use_hashtags},
          {"use_mentions", c.use_mentions},
          {"min_doc_freq", c.min_doc_freq},
          {"lowercase", c.lowercase}};
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms, FeatureConfig config)
    : terms_(std::move(terms)), config_(config) {
  config_.validate();
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i]))
      throw InvalidArgument("vocabulary terms must be strictly increasing");
    if (!term_fits(terms_[i], config_))
      throw InvalidArgument("term '" + terms_[i] + "' does not fit the feature configuration");
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(const std::string& term) const {
  const auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_json() const {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  j["config"] = config_to_json(config_);
  j["terms"] = terms_;
  return j.dump();
}

Vocabulary Vocabulary::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CorruptPayload("vocabulary is not a JSON object");
  try {
    if (j.at("version").get<int>() != kFormatVersion)
      throw VersionMismatch("unsupported vocabulary version " + j.at("version").dump());
    const auto& c = j.at("config");
    FeatureConfig config;
    config.ngram_order = c.at("ngram_order").get<int>();
    config.use_hashtags = c.at("use_hashtags").get<bool>();
    config.use_mentions = c.at("use_mentions").get<bool>();
    config.min_doc_freq = c.at("min_doc_freq").get<int>();
    config.lowercase = c.value("lowercase", true);
    return Vocabulary(j.at("terms").get<std::vector<std::string>>(), config);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptPayload(std::string("vocabulary: ") + e.what());
  }
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

Vocabulary build_vocabulary(std::span<const Tweet> corpus, const FeatureConfig& config) {
  config.validate();
  if (corpus.empty()) throw InvalidArgument("cannot build a vocabulary from an empty corpus");
  std::unordered_map<std::string, std::size_t> doc_freq;
  for (const auto& tweet : corpus) {
    auto terms = document_terms(tweet, config);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& t : terms) ++doc_freq[std::move(t)];
  }
  std::vector<std::string> kept;
  for (const auto& [term, df] : doc_freq)
    if (df >= static_cast<std::size_t>(config.min_doc_freq)) kept.push_back(term);
  if (kept.empty())
    throw EmptyVocabulary("no " + ngram_name(config.ngram_order) + " term reaches document frequency " +
                          std::to_string(config.min_doc_freq));
  std::sort(kept.begin(), kept.end());
  return Vocabulary(std::move(kept), config);
}

// ---------------------------------------------------------------------------
// DocumentTermMatrix

void DocumentTermMatrix::add_row(std::vector<TermCount> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const TermCount& a, const TermCount& b) { return a.column < b.column; });
  for (std::size_t i = 0; i < entries.size();) {
    const std::uint32_t column = entries[i].column;
    if (column >= n_terms_) throw InvalidArgument("column " + std::to_string(column) + " out of range");
    std::uint32_t total = 0;
    for (; i < entries.size() && entries[i].column == column; ++i) total += entries[i].count;
    if (total > 0) entries_.push_back({column, total});
  }
  offsets_.push_back(entries_.size());
}

std::uint32_t DocumentTermMatrix::at(std::size_t row_index, std::uint32_t column) const {
  const auto r = row(row_index);
  const auto it = std::lower_bound(r.begin(), r.end(), column,
                                   [](const TermCount& e, std::uint32_t c) { return e.column < c; });
  return (it != r.end() && it->column == column) ? it->count : 0;
}

DocumentTermMatrix DocumentTermMatrix::select_rows(std::span<const std::size_t> rows) const {
  DocumentTermMatrix out(n_terms_);
  for (const std::size_t r : rows) {
    const auto src = row(r);
    out.entries_.insert(out.entries_.end(), src.begin(), src.end());
    out.offsets_.push_back(out.entries_.size());
  }
  return out;
}

DocumentTermMatrix vectorize_corpus(std::span<const Tweet> corpus, const Vocabulary& vocab) {
  DocumentTermMatrix dtm(vocab.size());
  std::vector<TermCount> entries;
  for (const auto& tweet : corpus) {
    entries.clear();
    for (const auto& term : document_terms(tweet, vocab.config()))
      if (const auto idx = vocab.index_of(term)) entries.push_back({*idx, 1});
    dtm.add_row(entries);
  }
  return dtm;
}

}  // namespace sentiscope
