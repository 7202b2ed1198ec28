#pragma once

// Parameter payloads and training kernels behind TrainedModel. Exposed so the
// tests can check objectives and gradients directly.

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sentiscope/classifiers.hpp"
#include "sentiscope/rng.hpp"

namespace sentiscope::detail {

// Rows of a DocumentTermMatrix rescaled to unit Euclidean norm (empty rows
// stay empty). Input space of MaxEnt, SVM and NeuralNet.
struct ScaledMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> columns;
  std::vector<double> values;

  std::size_t row_begin(std::size_t i) const { return offsets[i]; }
  std::size_t row_end(std::size_t i) const { return offsets[i + 1]; }
};

ScaledMatrix l2_normalize(const DocumentTermMatrix& dtm);

struct ScaledRow {
  std::vector<std::uint32_t> columns;
  std::vector<double> values;
};
ScaledRow l2_normalize(std::span<const TermCount> row);

struct ConstantParams {
  SentimentLabel label = SentimentLabel::Neutral;
};

// Multinomial event model; arrays indexed by position in the class list.
struct NaiveBayesParams {
  std::vector<double> log_prior;       // K
  std::vector<double> log_likelihood;  // K x V, row-major
};

// Shared by MaxEnt (softmax link) and SVM (one-vs-rest margins).
struct LinearParams {
  std::size_t n_features = 0;
  std::vector<double> weights;  // K x V, row-major
  std::vector<double> bias;     // K
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // count >= threshold goes right
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<double, kNumClasses> counts{};  // weighted class counts, by label
};

struct TreeParams {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestParams {
  std::vector<TreeParams> trees;
};

struct Stump {
  std::int32_t feature = -1;  // -1: constant stump returning left_value
  double threshold = 0.0;
  double left_value = 0.0;   // count < threshold
  double right_value = 0.0;  // count >= threshold
};

// One additive model per class position (one-vs-rest LogitBoost).
struct BoostParams {
  std::vector<std::vector<Stump>> stumps;
};

struct MlpParams {
  std::size_t n_inputs = 0;
  std::size_t n_hidden = 0;
  std::vector<double> w1;  // V x H, feature-major: w1[j * H + h]
  std::vector<double> b1;  // H
  std::vector<double> w2;  // K x H, row-major
  std::vector<double> b2;  // K
};

struct ModelPayload {
  std::variant<ConstantParams, NaiveBayesParams, LinearParams, TreeParams, ForestParams, BoostParams,
               MlpParams>
      params;
};

// ---------------------------------------------------------------------------
// Training kernels. `y` holds class positions in [0, n_classes).

NaiveBayesParams train_naive_bayes(const DocumentTermMatrix& x, std::span<const std::size_t> y,
                                   std::size_t n_classes, double alpha);

// Mean cross-entropy plus (l2/2)||W||^2; fills `grad` (same shape) if given.
double maxent_objective(const LinearParams& params, const ScaledMatrix& x, std::span<const std::size_t> y,
                        double l2, LinearParams* grad);
LinearParams train_maxent(const ScaledMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                          double l2, double learning_rate, int epochs, TrainingTrace* trace);

LinearParams train_linear_svm(const ScaledMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                              double c, int epochs);

// Mean cross-entropy of the one-hidden-layer tanh network.
double mlp_objective(const MlpParams& params, const ScaledMatrix& x, std::span<const std::size_t> y,
                     MlpParams* grad);
MlpParams init_mlp(std::size_t n_inputs, std::size_t n_hidden, std::size_t n_classes, double init_scale,
                   CounterRng& rng);
MlpParams train_mlp(const ScaledMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                    std::size_t n_hidden, double learning_rate, int epochs, double init_scale,
                    std::uint64_t seed, TrainingTrace* trace);

struct TreeOptions {
  int max_depth = 30;
  int min_samples_split = 2;
  std::size_t mtry = 0;  // features tried per node; 0 = all
};

// CART with Gini impurity. `labels` are label indices (0..2), `weights` the
// per-document multiplicity (bootstrap counts; 0 excludes a document).
TreeParams grow_tree(const DocumentTermMatrix& x, std::span<const std::uint8_t> labels,
                     std::span<const std::uint32_t> weights, const TreeOptions& options, CounterRng& rng);
// Leaf reached by a row.
const TreeNode& tree_leaf(const TreeParams& tree, std::span<const TermCount> row);

ForestParams train_forest(const DocumentTermMatrix& x, std::span<const std::uint8_t> labels,
                          std::size_t n_trees, const TreeOptions& options, std::uint64_t seed);

BoostParams train_logitboost(const DocumentTermMatrix& x, std::span<const std::size_t> y,
                             std::size_t n_classes, int iterations);
double stump_value(const Stump& stump, std::span<const TermCount> row);

// Raw per-position scores; the caller maps positions to labels.
std::vector<double> naive_bayes_log_posterior(const NaiveBayesParams& p, std::span<const TermCount> row);
std::vector<double> linear_scores(const LinearParams& p, const ScaledRow& row);
std::vector<double> mlp_probabilities(const MlpParams& p, const ScaledRow& row);
std::vector<double> boost_probabilities(const BoostParams& p, std::span<const TermCount> row);

// Numerically stable softmax in place.
void softmax(std::vector<double>& z);

// JSON (de)serialization of each payload.
nlohmann::json payload_to_json(const ModelPayload& payload);
ModelPayload payload_from_json(Algorithm algorithm, bool constant, const nlohmann::json& j,
                               std::size_t vocab_size, std::size_t n_classes);

}  // namespace sentiscope::detail
