#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sentiscope/classifiers/internals.hpp"
#include "sentiscope/error.hpp"

namespace sentiscope {

using detail::ModelPayload;

TrainedModel::TrainedModel(AlgorithmSpec spec, std::size_t vocab_size, std::vector<SentimentLabel> class_list,
                           std::shared_ptr<const ModelPayload> payload)
    : spec_(std::move(spec)),
      vocab_size_(vocab_size),
      class_list_(std::move(class_list)),
      payload_(std::move(payload)) {}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int as_int(const Hyperparameters& h, const char* key) { return static_cast<int>(h.at(key)); }

std::vector<std::uint8_t> label_indices(std::span<const SentimentLabel> labels) {
  std::vector<std::uint8_t> out(labels.size());
  std::transform(labels.begin(), labels.end(), out.begin(),
                 [](SentimentLabel l) { return static_cast<std::uint8_t>(l); });
  return out;
}

ClassScores vote_fractions(const detail::ForestParams& forest, std::span<const TermCount> row) {
  ClassScores votes{};
  for (const auto& tree : forest.trees) {
    const auto& leaf = detail::tree_leaf(tree, row);
    votes[to_index(argmax_label(leaf.counts))] += 1.0;
  }
  for (auto& v : votes) v /= static_cast<double>(forest.trees.size());
  return votes;
}

}  // namespace

ClassScores TrainedModel::score_row(std::span<const TermCount> row) const {
  ClassScores out{};
  const auto scatter = [&](const std::vector<double>& by_position, double absent) {
    out.fill(absent);
    for (std::size_t k = 0; k < class_list_.size(); ++k) out[to_index(class_list_[k])] = by_position[k];
  };
  std::visit(Overloaded{
                 [&](const detail::ConstantParams& p) { out[to_index(p.label)] = 1.0; },
                 [&](const detail::NaiveBayesParams& p) {
                   auto z = detail::naive_bayes_log_posterior(p, row);
                   detail::softmax(z);
                   scatter(z, 0.0);
                 },
                 [&](const detail::LinearParams& p) {
                   auto z = detail::linear_scores(p, detail::l2_normalize(row));
                   if (spec_.algorithm == Algorithm::MaxEnt) {
                     detail::softmax(z);
                     scatter(z, 0.0);
                   } else {
                     scatter(z, -std::numeric_limits<double>::infinity());
                   }
                 },
                 [&](const detail::TreeParams& p) {
                   const auto& counts = detail::tree_leaf(p, row).counts;
                   double total = 0;
                   for (double c : counts) total += c;
                   for (std::size_t k = 0; k < kNumClasses; ++k) out[k] = counts[k] / total;
                 },
                 [&](const detail::ForestParams& p) { out = vote_fractions(p, row); },
                 [&](const detail::BoostParams& p) { scatter(detail::boost_probabilities(p, row), 0.0); },
                 [&](const detail::MlpParams& p) {
                   scatter(detail::mlp_probabilities(p, detail::l2_normalize(row)), 0.0);
                 },
             },
             payload_->params);
  return out;
}

std::vector<ClassScores> TrainedModel::predict_scores(const DocumentTermMatrix& dtm) const {
  if (dtm.n_terms() != vocab_size_)
    throw DimensionMismatch("matrix has " + std::to_string(dtm.n_terms()) + " terms, model expects " +
                            std::to_string(vocab_size_));
  std::vector<ClassScores> out(dtm.n_docs());
  for (std::size_t i = 0; i < dtm.n_docs(); ++i) out[i] = score_row(dtm.row(i));
  return out;
}

std::vector<SentimentLabel> TrainedModel::predict(const DocumentTermMatrix& dtm) const {
  const auto scores = predict_scores(dtm);
  std::vector<SentimentLabel> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(), argmax_label);
  return out;
}

TrainedModel train(const AlgorithmSpec& spec, const DocumentTermMatrix& dtm,
                   std::span<const SentimentLabel> labels, TrainingTrace* trace) {
  if (labels.size() != dtm.n_docs())
    throw DimensionMismatch(std::to_string(labels.size()) + " labels for " + std::to_string(dtm.n_docs()) +
                            " documents");
  if (dtm.n_docs() < 2) throw InvalidArgument("training needs at least two documents");
  const Hyperparameters h = resolve_hyperparameters(spec);
  AlgorithmSpec resolved{spec.algorithm, h, spec.rng_seed};

  std::vector<SentimentLabel> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  auto payload = std::make_shared<ModelPayload>();
  if (trace) trace->losses.clear();
  if (classes.size() == 1) {
    payload->params = detail::ConstantParams{classes.front()};
    return TrainedModel(resolved, dtm.n_terms(), classes, payload);
  }

  std::vector<std::size_t> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    y[i] = static_cast<std::size_t>(std::find(classes.begin(), classes.end(), labels[i]) - classes.begin());
  const std::size_t k = classes.size();

  switch (spec.algorithm) {
    case Algorithm::NaiveBayes:
      payload->params = detail::train_naive_bayes(dtm, y, k, h.at("alpha"));
      break;
    case Algorithm::MaxEnt:
      payload->params = detail::train_maxent(detail::l2_normalize(dtm), y, k, h.at("l2"), h.at("learning_rate"),
                                             as_int(h, "epochs"), trace);
      break;
    case Algorithm::SVM:
      payload->params = detail::train_linear_svm(detail::l2_normalize(dtm), y, k, h.at("C"), as_int(h, "epochs"));
      break;
    case Algorithm::NeuralNet:
      payload->params = detail::train_mlp(detail::l2_normalize(dtm), y, k,
                                          static_cast<std::size_t>(h.at("hidden_units")), h.at("learning_rate"),
                                          as_int(h, "epochs"), h.at("init_scale"), spec.rng_seed, trace);
      break;
    case Algorithm::Tree: {
      const auto lab = label_indices(labels);
      const std::vector<std::uint32_t> weights(labels.size(), 1);
      CounterRng rng(spec.rng_seed);
      payload->params = detail::grow_tree(dtm, lab, weights,
                                          {as_int(h, "max_depth"), as_int(h, "min_samples_split"), 0}, rng);
      break;
    }
    case Algorithm::BaggedTree:
    case Algorithm::RandomForest: {
      const auto lab = label_indices(labels);
      detail::TreeOptions options{as_int(h, "max_depth"), as_int(h, "min_samples_split"), 0};
      if (spec.algorithm == Algorithm::RandomForest) {
        const auto mtry = static_cast<std::size_t>(h.at("mtry"));
        options.mtry = mtry > 0 ? mtry
                                : std::max<std::size_t>(
                                      1, static_cast<std::size_t>(std::floor(std::sqrt(
                                             static_cast<double>(dtm.n_terms())))));
      }
      payload->params =
          detail::train_forest(dtm, lab, static_cast<std::size_t>(h.at("n_trees")), options, spec.rng_seed);
      break;
    }
    case Algorithm::BoostedTree:
      payload->params = detail::train_logitboost(dtm, y, k, as_int(h, "iterations"));
      break;
  }
  return TrainedModel(resolved, dtm.n_terms(), classes, payload);
}

std::vector<SentimentLabel> predict(const TrainedModel& model, const DocumentTermMatrix& dtm) {
  return model.predict(dtm);
}

std::vector<ClassScores> predict_scores(const TrainedModel& model, const DocumentTermMatrix& dtm) {
  return model.predict_scores(dtm);
}

// ---------------------------------------------------------------------------
// Serialization: {version, spec, vocab_size, class_list, parameters[, provenance]}

std::string TrainedModel::serialize() const {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  nlohmann::json spec;
  spec["algorithm"] = std::string(algorithm_name(spec_.algorithm));
  spec["hyperparameters"] = spec_.hyperparameters;
  spec["rng_seed"] = spec_.rng_seed;
  j["spec"] = spec;
  j["vocab_size"] = vocab_size_;
  nlohmann::json classes = nlohmann::json::array();
  for (const auto c : class_list_) classes.push_back(to_int(c));
  j["class_list"] = classes;
  j["parameters"] = detail::payload_to_json(*payload_);
  if (!provenance.empty()) j["provenance"] = provenance;
  return j.dump();
}

TrainedModel TrainedModel::deserialize(std::string_view bytes) {
  const auto j = nlohmann::json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CorruptPayload("model payload is not valid JSON");
  try {
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion)
      throw VersionMismatch("model format version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kFormatVersion) + ")");
    const auto& s = j.at("spec");
    const auto algorithm = parse_algorithm(s.at("algorithm").get<std::string>());
    if (!algorithm) throw CorruptPayload("unknown algorithm " + s.at("algorithm").dump());
    AlgorithmSpec spec{*algorithm, s.at("hyperparameters").get<Hyperparameters>(),
                       s.at("rng_seed").get<std::uint64_t>()};
    resolve_hyperparameters(spec);
    const auto vocab_size = j.at("vocab_size").get<std::size_t>();
    std::vector<SentimentLabel> classes;
    for (const auto& c : j.at("class_list")) {
      const auto label = label_from_int(c.get<long long>());
      if (!label) throw CorruptPayload("bad class label " + c.dump());
      if (!classes.empty() && classes.back() >= *label) throw CorruptPayload("class_list not increasing");
      classes.push_back(*label);
    }
    if (classes.empty()) throw CorruptPayload("empty class_list");
    auto payload = std::make_shared<ModelPayload>(
        detail::payload_from_json(*algorithm, classes.size() == 1, j.at("parameters"), vocab_size, classes.size()));
    if (const auto* c = std::get_if<detail::ConstantParams>(&payload->params); c && c->label != classes.front())
      throw CorruptPayload("constant label disagrees with class_list");
    TrainedModel model(spec, vocab_size, classes, payload);
    if (j.contains("provenance")) model.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptPayload(std::string("model payload: ") + e.what());
  }
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

std::string serialize_model(const TrainedModel& model) { return model.serialize(); }
TrainedModel deserialize_model(std::string_view bytes) { return TrainedModel::deserialize(bytes); }

}  // namespace sentiscope
