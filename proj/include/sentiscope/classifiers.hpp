#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentiscope/features.hpp"
#include "sentiscope/label.hpp"

namespace sentiscope {

enum class Algorithm : std::uint8_t {
  NaiveBayes,
  MaxEnt,
  Tree,
  BaggedTree,
  BoostedTree,
  RandomForest,
  SVM,
  NeuralNet,
};

inline constexpr std::array<Algorithm, 8> kAllAlgorithms{
    Algorithm::NaiveBayes,  Algorithm::MaxEnt,       Algorithm::Tree, Algorithm::BaggedTree,
    Algorithm::BoostedTree, Algorithm::RandomForest, Algorithm::SVM,  Algorithm::NeuralNet};

std::string_view algorithm_name(Algorithm algorithm);        // "RandomForest"
std::string_view algorithm_short_name(Algorithm algorithm);  // "RF"
// Case-insensitive; accepts full and short names.
std::optional<Algorithm> parse_algorithm(std::string_view text);

using Hyperparameters = std::map<std::string, double>;

struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::NaiveBayes;
  Hyperparameters hyperparameters;  // overrides on top of the defaults
  std::uint64_t rng_seed = 0;

  bool operator==(const AlgorithmSpec&) const = default;
};

// Defaults:
//   NaiveBayes   alpha=1
//   MaxEnt       l2=1e-4 learning_rate=0.1 epochs=200
//   Tree         max_depth=30 min_samples_split=2
//   BaggedTree   n_trees=25 max_depth=30 min_samples_split=2
//   BoostedTree  iterations=100
//   RandomForest n_trees=200 mtry=0 (floor(sqrt(n_terms))) max_depth=30 min_samples_split=2
//   SVM          C=1 epochs=200
//   NeuralNet    hidden_units=50 learning_rate=0.05 epochs=300 init_scale=0.5
Hyperparameters default_hyperparameters(Algorithm algorithm);
// Defaults merged with the spec's overrides. Throws InvalidHyperparameter for
// unknown keys or out-of-range values.
Hyperparameters resolve_hyperparameters(const AlgorithmSpec& spec);

// Per-class scores indexed by SentimentLabel. Probabilistic models
// (NaiveBayes, MaxEnt, NeuralNet, BoostedTree) return probabilities summing to
// one; Tree returns the leaf class fractions; BaggedTree and RandomForest
// return vote fractions; SVM returns one-vs-rest margins. Classes absent from
// training score 0 (or -inf for SVM margins).
using ClassScores = std::array<double, kNumClasses>;

// First maximum in ProGun < AntiGun < Neutral order.
SentimentLabel argmax_label(const ClassScores& scores);

// Objective value per epoch for the gradient-trained models (MaxEnt,
// NeuralNet); entry 0 is the loss at initialization.
struct TrainingTrace {
  std::vector<double> losses;
};

namespace detail {
struct ModelPayload;
}

class TrainedModel {
 public:
  static constexpr int kFormatVersion = 1;

  TrainedModel(AlgorithmSpec spec, std::size_t vocab_size, std::vector<SentimentLabel> class_list,
               std::shared_ptr<const detail::ModelPayload> payload);

  const AlgorithmSpec& spec() const { return spec_; }
  std::size_t vocab_size() const { return vocab_size_; }
  const std::vector<SentimentLabel>& class_list() const { return class_list_; }
  bool is_constant() const { return class_list_.size() == 1; }

  // Free-form provenance (seed, config hash, ...) stored with the model.
  std::map<std::string, std::string> provenance;

  ClassScores score_row(std::span<const TermCount> row) const;
  std::vector<ClassScores> predict_scores(const DocumentTermMatrix& dtm) const;
  std::vector<SentimentLabel> predict(const DocumentTermMatrix& dtm) const;

  std::string serialize() const;
  static TrainedModel deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

  const detail::ModelPayload& payload() const { return *payload_; }

 private:
  AlgorithmSpec spec_;
  std::size_t vocab_size_;
  std::vector<SentimentLabel> class_list_;
  std::shared_ptr<const detail::ModelPayload> payload_;
};

// Deterministic in (spec, dtm, labels). A single distinct label yields a
// constant predictor. Throws DimensionMismatch when labels and rows disagree,
// InvalidHyperparameter for bad settings, InvalidArgument for fewer than two
// documents.
TrainedModel train(const AlgorithmSpec& spec, const DocumentTermMatrix& dtm,
                   std::span<const SentimentLabel> labels, TrainingTrace* trace = nullptr);

// Throw DimensionMismatch when dtm.n_terms() != model.vocab_size().
std::vector<SentimentLabel> predict(const TrainedModel& model, const DocumentTermMatrix& dtm);
std::vector<ClassScores> predict_scores(const TrainedModel& model, const DocumentTermMatrix& dtm);

std::string serialize_model(const TrainedModel& model);
// Throws VersionMismatch or CorruptPayload.
TrainedModel deserialize_model(std::string_view bytes);

}  // namespace sentiscope
