#include "sentiscope/classifiers/internals.hpp"
#include "sentiscope/error.hpp"

namespace sentiscope::detail {

namespace {

using nlohmann::json;

json tree_to_json(const TreeParams& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       counts = json::array();
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    for (double c : n.counts) counts.push_back(c);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"counts", counts}};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw CorruptPayload("model parameters: " + what);
}

TreeParams tree_from_json(const json& j, std::size_t vocab_size) {
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto counts = j.at("counts").get<std::vector<double>>();
  const std::size_t n = feature.size();
  require(n > 0 && threshold.size() == n && left.size() == n && right.size() == n &&
              counts.size() == n * kNumClasses,
          "inconsistent tree arrays");
  TreeParams t;
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = t.nodes[i];
    node.feature = feature[i];
    node.threshold = threshold[i];
    node.left = left[i];
    node.right = right[i];
    double total = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) total += (node.counts[c] = counts[i * kNumClasses + c]);
    require(total > 0, "empty tree node");
    if (node.feature >= 0) {
      const auto self = static_cast<std::int32_t>(i);
      require(static_cast<std::size_t>(node.feature) < vocab_size, "tree feature out of range");
      require(node.left > self && node.right > self && static_cast<std::size_t>(node.left) < n &&
                  static_cast<std::size_t>(node.right) < n,
              "bad tree child index");
    } else {
      require(node.feature == -1, "bad leaf marker");
    }
  }
  return t;
}

}  // namespace

json payload_to_json(const ModelPayload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantParams>) {
          return {{"constant", to_int(p.label)}};
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          return {{"log_prior", p.log_prior}, {"log_likelihood", p.log_likelihood}};
        } else if constexpr (std::is_same_v<T, LinearParams>) {
          return {{"n_features", p.n_features}, {"weights", p.weights}, {"bias", p.bias}};
        } else if constexpr (std::is_same_v<T, TreeParams>) {
          return tree_to_json(p);
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          json trees = json::array();
          for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
          return {{"trees", trees}};
        } else if constexpr (std::is_same_v<T, BoostParams>) {
          json per_class = json::array();
          for (const auto& stumps : p.stumps) {
            json list = json::array();
            for (const auto& s : stumps) list.push_back(json::array({s.feature, s.threshold, s.left_value, s.right_value}));
            per_class.push_back(list);
          }
          return {{"stumps", per_class}};
        } else {
          return {{"n_inputs", p.n_inputs}, {"n_hidden", p.n_hidden}, {"w1", p.w1},
                  {"b1", p.b1},             {"w2", p.w2},             {"b2", p.b2}};
        }
      },
      payload.params);
}

ModelPayload payload_from_json(Algorithm algorithm, bool constant, const json& j, std::size_t vocab_size,
                               std::size_t n_classes) {
  require(j.is_object(), "not an object");
  ModelPayload out;
  if (constant) {
    const auto label = label_from_int(j.at("constant").get<long long>());
    require(label.has_value(), "bad constant label");
    out.params = ConstantParams{*label};
    return out;
  }
  require(n_classes >= 2, "non-constant model needs two classes");
  switch (algorithm) {
    case Algorithm::NaiveBayes: {
      NaiveBayesParams p{j.at("log_prior").get<std::vector<double>>(),
                         j.at("log_likelihood").get<std::vector<double>>()};
      require(p.log_prior.size() == n_classes && p.log_likelihood.size() == n_classes * vocab_size,
              "naive bayes shape");
      out.params = std::move(p);
      break;
    }
    case Algorithm::MaxEnt:
    case Algorithm::SVM: {
      LinearParams p{j.at("n_features").get<std::size_t>(), j.at("weights").get<std::vector<double>>(),
                     j.at("bias").get<std::vector<double>>()};
      require(p.n_features == vocab_size && p.bias.size() == n_classes &&
                  p.weights.size() == n_classes * vocab_size,
              "linear model shape");
      out.params = std::move(p);
      break;
    }
    case Algorithm::Tree:
      out.params = tree_from_json(j, vocab_size);
      break;
    case Algorithm::BaggedTree:
    case Algorithm::RandomForest: {
      ForestParams p;
      for (const auto& t : j.at("trees")) p.trees.push_back(tree_from_json(t, vocab_size));
      require(!p.trees.empty(), "forest without trees");
      out.params = std::move(p);
      break;
    }
    case Algorithm::BoostedTree: {
      BoostParams p;
      for (const auto& list : j.at("stumps")) {
        std::vector<Stump> stumps;
        for (const auto& s : list) {
          require(s.is_array() && s.size() == 4, "stump shape");
          Stump st{s[0].get<std::int32_t>(), s[1].get<double>(), s[2].get<double>(), s[3].get<double>()};
          require(st.feature == -1 || (st.feature >= 0 && static_cast<std::size_t>(st.feature) < vocab_size),
                  "stump feature out of range");
          stumps.push_back(st);
        }
        p.stumps.push_back(std::move(stumps));
      }
      require(p.stumps.size() == n_classes, "boosting class count");
      out.params = std::move(p);
      break;
    }
    case Algorithm::NeuralNet: {
      MlpParams p;
      p.n_inputs = j.at("n_inputs").get<std::size_t>();
      p.n_hidden = j.at("n_hidden").get<std::size_t>();
      p.w1 = j.at("w1").get<std::vector<double>>();
      p.b1 = j.at("b1").get<std::vector<double>>();
      p.w2 = j.at("w2").get<std::vector<double>>();
      p.b2 = j.at("b2").get<std::vector<double>>();
      require(p.n_inputs == vocab_size && p.w1.size() == p.n_inputs * p.n_hidden && p.b1.size() == p.n_hidden &&
                  p.w2.size() == n_classes * p.n_hidden && p.b2.size() == n_classes,
              "network shape");
      out.params = std::move(p);
      break;
    }
  }
  return out;
}

}  // namespace sentiscope::detail
