#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentiscope/tweet.hpp"

namespace sentiscope {

inline constexpr std::string_view kUrlToken = "<url>";
inline constexpr std::string_view kTagPrefix = "tag:";

// Lowercases, replaces URLs with "<url>", keeps "#tag"/"@user" tokens whole,
// splits the rest on whitespace and punctuation (inner apostrophes survive)
// and collapses letter runs longer than three.
std::vector<std::string> tokenize(std::string_view text, bool lowercase = true);

// All contiguous n-token windows joined by a single space.
std::vector<std::string> extract_ngrams(std::span<const std::string> tokens, int n);

// "tag:#x" / "tag:@y" for the tweet's hashtags and mentions; lowercased,
// deduplicated, sorted.
std::vector<std::string> extract_tag_features(const Tweet& tweet);

struct FeatureConfig {
  int ngram_order = 1;
  bool use_hashtags = true;
  bool use_mentions = true;
  int min_doc_freq = 2;
  bool lowercase = true;

  void validate() const;
  bool operator==(const FeatureConfig&) const = default;
};

std::string ngram_name(int order);  // "uni-gram", "bi-gram", "tri-gram"

// Terms of one document under `config`, with multiplicity. N-grams are formed
// within runs of plain tokens (tag tokens in the text break a run and are not
// counted there; tags only enter through the "tag:" namespace, once each).
std::vector<std::string> document_terms(const Tweet& tweet, const FeatureConfig& config);

class Vocabulary {
 public:
  static constexpr int kFormatVersion = 1;

  Vocabulary() = default;
  // `terms` must be strictly increasing; index i is the column of terms[i].
  Vocabulary(std::vector<std::string> terms, FeatureConfig config);

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const FeatureConfig& config() const { return config_; }
  std::optional<std::uint32_t> index_of(const std::string& term) const;

  std::string to_json() const;
  static Vocabulary from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && config_ == other.config_;
  }

 private:
  std::vector<std::string> terms_;
  FeatureConfig config_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Throws InvalidArgument on an empty corpus and EmptyVocabulary when no term
// reaches min_doc_freq.
Vocabulary build_vocabulary(std::span<const Tweet> corpus, const FeatureConfig& config);

struct TermCount {
  std::uint32_t column = 0;
  std::uint32_t count = 0;
  bool operator==(const TermCount&) const = default;
};

// Compressed sparse rows of term counts. Columns strictly increase within a
// row and every stored count is >= 1.
class DocumentTermMatrix {
 public:
  DocumentTermMatrix() : offsets_{0} {}
  explicit DocumentTermMatrix(std::size_t n_terms) : n_terms_(n_terms), offsets_{0} {}

  // Appends a row; `entries` are sorted and merged, zero counts dropped.
  // Throws InvalidArgument for a column >= n_terms.
  void add_row(std::vector<TermCount> entries);

  std::size_t n_docs() const { return offsets_.size() - 1; }
  std::size_t n_terms() const { return n_terms_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const TermCount> row(std::size_t i) const {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::uint32_t at(std::size_t row_index, std::uint32_t column) const;

  DocumentTermMatrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const DocumentTermMatrix&) const = default;

 private:
  std::size_t n_terms_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<TermCount> entries_;
};

DocumentTermMatrix vectorize_corpus(std::span<const Tweet> corpus, const Vocabulary& vocab);

}  // namespace sentiscope
