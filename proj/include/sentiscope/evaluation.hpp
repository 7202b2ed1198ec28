#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentiscope/classifiers.hpp"
#include "sentiscope/features.hpp"
#include "sentiscope/tweet.hpp"

namespace sentiscope {

// Examples wanted per class, indexed by SentimentLabel.
using ClassQuota = std::array<std::size_t, kNumClasses>;

// Indices into the pool: exactly quota[c] of each class, drawn without
// replacement and returned in a seed-determined shuffled order. Throws
// InsufficientClassData when a class is short.
std::vector<std::size_t> compose_training_set(std::span<const SentimentLabel> pool, const ClassQuota& quota,
                                              std::uint64_t seed);

// Quota for `size` examples, proportional to `full` (largest-remainder
// rounding, ties to the earlier class).
ClassQuota scale_quota(const ClassQuota& full, std::size_t size);

// One training set per size, nested: a smaller set is always a subset of a
// larger one. `full` is the quota of the largest size.
std::vector<std::vector<std::size_t>> compose_nested_training_sets(std::span<const SentimentLabel> pool,
                                                                   const ClassQuota& full,
                                                                   std::span<const std::size_t> sizes,
                                                                   std::uint64_t seed);

// k disjoint folds covering 0..n-1; each class is dealt round-robin so its
// per-fold counts differ by at most one. Throws InvalidArgument for k < 2 and
// TooFewPerClass when a present class has fewer than k members.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const SentimentLabel> labels, std::size_t k,
                                                       std::uint64_t seed);

struct CVReport {
  AlgorithmSpec algorithm;
  FeatureConfig feature_config;
  std::size_t training_size = 0;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  std::uint64_t seed = 0;
};

struct FoldModel {
  Vocabulary vocabulary;
  TrainedModel model;
};

// Vocabulary and model built from the given rows only.
FoldModel train_on_subset(const AlgorithmSpec& spec, std::span<const Tweet> corpus,
                          std::span<const SentimentLabel> labels, const FeatureConfig& config,
                          std::span<const std::size_t> rows);

// Exact-match accuracy of `model` on the given rows.
double subset_accuracy(const FoldModel& fold, std::span<const Tweet> corpus, std::span<const SentimentLabel> labels,
                       std::span<const std::size_t> rows);

// Stratified k-fold CV; each fold's vocabulary comes from its training part
// only. A failing fold surfaces as FoldFailure carrying the inner error code.
CVReport cross_validate(const AlgorithmSpec& spec, std::span<const Tweet> corpus,
                        std::span<const SentimentLabel> labels, const FeatureConfig& config, std::size_t k,
                        std::uint64_t seed);

struct ComparisonTable {
  std::string row_header;  // "training_size" or "features"
  std::vector<std::string> row_keys;
  std::vector<std::string> columns;                      // algorithm short names
  std::vector<std::vector<std::optional<double>>> cells;  // nullopt = not available
  std::vector<std::vector<std::string>> notes;            // failure reason for N/A cells

  std::string to_csv() const;
  std::string to_json() const;  // {row_header, rows, columns, cells}
  std::string to_text() const;  // aligned, for terminals
};

inline constexpr const char* kNotAvailable = "N/A";

// Grid of mean CV accuracies, one row per (size, config) pair, one column per
// spec. Training sets are nested across sizes. Cell failures become N/A.
ComparisonTable compare_models(std::span<const AlgorithmSpec> specs, std::span<const std::size_t> sizes,
                               std::span<const FeatureConfig> configs, std::span<const Tweet> pool,
                               std::span<const SentimentLabel> pool_labels, const ClassQuota& full_quota,
                               std::size_t k, std::uint64_t seed);

}  // namespace sentiscope
