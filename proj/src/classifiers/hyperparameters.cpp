#include <algorithm>
#include <cctype>
#include <cmath>

#include "sentiscope/classifiers.hpp"
#include "sentiscope/error.hpp"

namespace sentiscope {

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::NaiveBayes: return "NaiveBayes";
    case Algorithm::MaxEnt: return "MaxEnt";
    case Algorithm::Tree: return "Tree";
    case Algorithm::BaggedTree: return "BaggedTree";
    case Algorithm::BoostedTree: return "BoostedTree";
    case Algorithm::RandomForest: return "RandomForest";
    case Algorithm::SVM: return "SVM";
    case Algorithm::NeuralNet: return "NeuralNet";
  }
  return "?";
}

std::string_view algorithm_short_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::NaiveBayes: return "NB";
    case Algorithm::MaxEnt: return "ME";
    case Algorithm::Tree: return "Tree";
    case Algorithm::BaggedTree: return "Bagging";
    case Algorithm::BoostedTree: return "Boosting";
    case Algorithm::RandomForest: return "RF";
    case Algorithm::SVM: return "SVM";
    case Algorithm::NeuralNet: return "NN";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  const auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const std::string needle = lower(text);
  for (const Algorithm a : kAllAlgorithms)
    if (needle == lower(algorithm_name(a)) || needle == lower(algorithm_short_name(a))) return a;
  return std::nullopt;
}

Hyperparameters default_hyperparameters(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::NaiveBayes:
      return {{"alpha", 1.0}};
    case Algorithm::MaxEnt:
      return {{"l2", 1e-4}, {"learning_rate", 0.1}, {"epochs", 200}};
    case Algorithm::Tree:
      return {{"max_depth", 30}, {"min_samples_split", 2}};
    case Algorithm::BaggedTree:
      return {{"n_trees", 25}, {"max_depth", 30}, {"min_samples_split", 2}};
    case Algorithm::BoostedTree:
      return {{"iterations", 100}};
    case Algorithm::RandomForest:
      return {{"n_trees", 200}, {"mtry", 0}, {"max_depth", 30}, {"min_samples_split", 2}};
    case Algorithm::SVM:
      return {{"C", 1.0}, {"epochs", 200}};
    case Algorithm::NeuralNet:
      return {{"hidden_units", 50}, {"learning_rate", 0.05}, {"epochs", 300}, {"init_scale", 0.5}};
  }
  return {};
}

namespace {

bool is_count_key(const std::string& key) {
  return key == "epochs" || key == "max_depth" || key == "min_samples_split" || key == "n_trees" ||
         key == "iterations" || key == "hidden_units" || key == "mtry";
}

}  // namespace

Hyperparameters resolve_hyperparameters(const AlgorithmSpec& spec) {
  Hyperparameters resolved = default_hyperparameters(spec.algorithm);
  for (const auto& [key, value] : spec.hyperparameters) {
    if (!resolved.contains(key))
      throw InvalidHyperparameter("unknown hyperparameter '" + key + "' for " +
                                  std::string(algorithm_name(spec.algorithm)));
    resolved[key] = value;
  }
  for (const auto& [key, value] : resolved) {
    const auto bad = [&](const char* why) {
      return InvalidHyperparameter(std::string(algorithm_name(spec.algorithm)) + "." + key + " = " +
                                   std::to_string(value) + ": " + why);
    };
    if (!std::isfinite(value)) throw bad("must be finite");
    if (is_count_key(key)) {
      if (value != std::floor(value) || value > 1e9) throw bad("must be an integer");
      if (key == "mtry") {
        if (value < 0) throw bad("must be >= 0");
      } else if (key == "min_samples_split") {
        if (value < 2) throw bad("must be >= 2");
      } else if (value < 1) {
        throw bad("must be >= 1");
      }
    } else if (key == "l2") {
      if (value < 0) throw bad("must be >= 0");
    } else if (value <= 0) {
      throw bad("must be > 0");
    }
  }
  return resolved;
}

SentimentLabel argmax_label(const ClassScores& scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k)
    if (scores[k] > scores[best]) best = k;
  return static_cast<SentimentLabel>(best);
}

}  // namespace sentiscope
