#include "sentiscope/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sentiscope/error.hpp"
#include "sentiscope/parallel.hpp"
#include "sentiscope/rng.hpp"

namespace sentiscope {

namespace {

// Per-class pool indices, each list shuffled by its own stream.
std::array<std::vector<std::size_t>, kNumClasses> shuffled_by_class(std::span<const SentimentLabel> pool,
                                                                     std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < pool.size(); ++i) by_class[to_index(pool[i])].push_back(i);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    CounterRng rng(seed, 0xC0 + c);
    rng.shuffle(std::span(by_class[c]));
  }
  return by_class;
}

}  // namespace

ClassQuota scale_quota(const ClassQuota& full, std::size_t size) {
  const std::size_t total = std::accumulate(full.begin(), full.end(), std::size_t{0});
  if (size > total) throw InvalidArgument("size " + std::to_string(size) + " exceeds quota total " + std::to_string(total));
  ClassQuota out{};
  if (total == 0) return out;
  std::array<std::size_t, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out[c] = full[c] * size / total;
    remainder[c] = full[c] * size % total;
    assigned += out[c];
  }
  while (assigned < size) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c)
      if (remainder[c] > remainder[best]) best = c;
    ++out[best];
    remainder[best] = 0;
    ++assigned;
  }
  return out;
}

std::vector<std::vector<std::size_t>> compose_nested_training_sets(std::span<const SentimentLabel> pool,
                                                                   const ClassQuota& full,
                                                                   std::span<const std::size_t> sizes,
                                                                   std::uint64_t seed) {
  const auto by_class = shuffled_by_class(pool, seed);
  for (std::size_t c = 0; c < kNumClasses; ++c)
    if (by_class[c].size() < full[c])
      throw InsufficientClassData(std::string(label_name(static_cast<SentimentLabel>(c))), by_class[c].size(),
                                  full[c]);
  std::vector<std::vector<std::size_t>> sets;
  for (const std::size_t size : sizes) {
    const ClassQuota quota = scale_quota(full, size);
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < kNumClasses; ++c)
      chosen.insert(chosen.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
    CounterRng rng(seed, 0xF00D);
    rng.shuffle(std::span(chosen));
    sets.push_back(std::move(chosen));
  }
  return sets;
}

std::vector<std::size_t> compose_training_set(std::span<const SentimentLabel> pool, const ClassQuota& quota,
                                              std::uint64_t seed) {
  const std::size_t total = std::accumulate(quota.begin(), quota.end(), std::size_t{0});
  const std::size_t sizes[] = {total};
  return std::move(compose_nested_training_sets(pool, quota, sizes, seed).front());
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const SentimentLabel> labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k must be at least 2 (got " + std::to_string(k) + ")");
  const auto by_class = shuffled_by_class(labels, seed ^ 0x5EED);
  for (std::size_t c = 0; c < kNumClasses; ++c)
    if (!by_class[c].empty() && by_class[c].size() < k)
      throw TooFewPerClass("class " + std::string(label_name(static_cast<SentimentLabel>(c))) + " has " +
                           std::to_string(by_class[c].size()) + " members, need at least " + std::to_string(k));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;  // carried across classes so fold sizes stay balanced too
  for (const auto& members : by_class)
    for (const auto idx : members) {
      folds[next].push_back(idx);
      next = (next + 1) % k;
    }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

FoldModel train_on_subset(const AlgorithmSpec& spec, std::span<const Tweet> corpus,
                          std::span<const SentimentLabel> labels, const FeatureConfig& config,
                          std::span<const std::size_t> rows) {
  std::vector<Tweet> tweets;
  std::vector<SentimentLabel> y;
  tweets.reserve(rows.size());
  y.reserve(rows.size());
  for (const auto r : rows) {
    tweets.push_back(corpus[r]);
    y.push_back(labels[r]);
  }
  Vocabulary vocab = build_vocabulary(tweets, config);
  const auto dtm = vectorize_corpus(tweets, vocab);
  auto model = train(spec, dtm, y);
  return {std::move(vocab), std::move(model)};
}

double subset_accuracy(const FoldModel& fold, std::span<const Tweet> corpus, std::span<const SentimentLabel> labels,
                       std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  std::vector<Tweet> tweets;
  tweets.reserve(rows.size());
  for (const auto r : rows) tweets.push_back(corpus[r]);
  const auto predicted = fold.model.predict(vectorize_corpus(tweets, fold.vocabulary));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) correct += predicted[i] == labels[rows[i]] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

CVReport cross_validate(const AlgorithmSpec& spec, std::span<const Tweet> corpus,
                        std::span<const SentimentLabel> labels, const FeatureConfig& config, std::size_t k,
                        std::uint64_t seed) {
  if (corpus.size() != labels.size()) throw DimensionMismatch("corpus and labels differ in length");
  config.validate();
  resolve_hyperparameters(spec);
  const auto folds = stratified_kfold(labels, k, seed);
  CVReport report{spec, config, corpus.size(), std::vector<double>(k, 0.0), 0.0, seed};
  parallel_for(k, [&](std::size_t i) {
    std::vector<std::size_t> train_rows;
    train_rows.reserve(corpus.size() - folds[i].size());
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) train_rows.insert(train_rows.end(), folds[j].begin(), folds[j].end());
    std::sort(train_rows.begin(), train_rows.end());
    try {
      const auto fold = train_on_subset(spec, corpus, labels, config, train_rows);
      report.fold_accuracies[i] = subset_accuracy(fold, corpus, labels, folds[i]);
    } catch (const Error& e) {
      throw FoldFailure(i, e);
    }
  });
  report.mean_accuracy = std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(), 0.0) /
                         static_cast<double>(k);
  return report;
}

// ---------------------------------------------------------------------------
// Comparison tables

namespace {

std::string format_cell(const std::optional<double>& v, const char* fmt) {
  if (!v) return kNotAvailable;
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, *v);
  return buf;
}

}  // namespace

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  out << row_header;
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < row_keys.size(); ++r) {
    out << row_keys[r];
    for (const auto& cell : cells[r]) out << ',' << format_cell(cell, "%.6f");
    out << '\n';
  }
  return out.str();
}

std::string ComparisonTable::to_json() const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& row : cells) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& cell : row) r.push_back(cell ? nlohmann::json(*cell) : nlohmann::json(kNotAvailable));
    cells_json.push_back(r);
  }
  nlohmann::json j{{"row_header", row_header}, {"rows", row_keys}, {"columns", columns}, {"cells", cells_json}};
  if (std::any_of(notes.begin(), notes.end(),
                  [](const auto& row) { return std::any_of(row.begin(), row.end(), [](const auto& n) { return !n.empty(); }); }))
    j["notes"] = notes;
  return j.dump(2);
}

std::string ComparisonTable::to_text() const {
  std::size_t key_width = row_header.size();
  for (const auto& k : row_keys) key_width = std::max(key_width, k.size());
  std::size_t cell_width = 8;
  for (const auto& c : columns) cell_width = std::max(cell_width, c.size());
  std::ostringstream out;
  const auto pad = [&](const std::string& s, std::size_t w) {
    out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  pad(row_header, key_width);
  for (const auto& c : columns) {
    out << "  ";
    pad(c, cell_width);
  }
  out << '\n';
  for (std::size_t r = 0; r < row_keys.size(); ++r) {
    pad(row_keys[r], key_width);
    for (const auto& cell : cells[r]) {
      out << "  ";
      pad(format_cell(cell, "%.4f"), cell_width);
    }
    out << '\n';
  }
  return out.str();
}

ComparisonTable compare_models(std::span<const AlgorithmSpec> specs, std::span<const std::size_t> sizes,
                               std::span<const FeatureConfig> configs, std::span<const Tweet> pool,
                               std::span<const SentimentLabel> pool_labels, const ClassQuota& full_quota,
                               std::size_t k, std::uint64_t seed) {
  if (specs.empty() || sizes.empty() || configs.empty()) throw InvalidArgument("empty comparison grid");
  if (pool.size() != pool_labels.size()) throw DimensionMismatch("pool and labels differ in length");
  const auto sets = compose_nested_training_sets(pool_labels, full_quota, sizes, seed);

  ComparisonTable table;
  const bool by_size = configs.size() == 1;
  const bool by_config = !by_size && sizes.size() == 1;
  table.row_header = by_size ? "training_size" : by_config ? "features" : "training_size/features";
  for (const auto& s : specs) table.columns.emplace_back(algorithm_short_name(s.algorithm));

  for (std::size_t si = 0; si < sizes.size(); ++si) {
    std::vector<Tweet> tweets;
    std::vector<SentimentLabel> labels;
    for (const auto idx : sets[si]) {
      tweets.push_back(pool[idx]);
      labels.push_back(pool_labels[idx]);
    }
    for (const auto& config : configs) {
      const std::string size_key = std::to_string(sizes[si]);
      const std::string config_key = ngram_name(config.ngram_order);
      table.row_keys.push_back(by_size ? size_key : by_config ? config_key : size_key + "/" + config_key);
      std::vector<std::optional<double>> row;
      std::vector<std::string> notes;
      for (const auto& spec : specs) {
        try {
          row.push_back(cross_validate(spec, tweets, labels, config, k, seed).mean_accuracy);
          notes.emplace_back();
        } catch (const Error& e) {
          row.push_back(std::nullopt);
          notes.emplace_back(e.code() + ": " + e.what());
        }
      }
      table.cells.push_back(std::move(row));
      table.notes.push_back(std::move(notes));
    }
  }
  return table;
}

}  // namespace sentiscope
