#include <cmath>

#include "doctest.h"
#include "sentiscope/classifiers.hpp"
#include "sentiscope/classifiers/internals.hpp"
#include "sentiscope/error.hpp"
#include "sentiscope/parallel.hpp"
#include "support.hpp"

using namespace sentiscope;
namespace d = sentiscope::detail;

namespace {

AlgorithmSpec quick(Algorithm a, std::uint64_t seed = 3) {
  AlgorithmSpec s{a, {}, seed};
  // Smaller ensembles keep the suite fast; behaviour is the same.
  if (a == Algorithm::RandomForest) s.hyperparameters["n_trees"] = 30;
  if (a == Algorithm::NeuralNet) s.hyperparameters["epochs"] = 120;
  return s;
}

// Each class owns two terms; every document uses only its class's terms.
std::pair<DocumentTermMatrix, std::vector<SentimentLabel>> separable(std::size_t per_class, std::uint64_t seed) {
  CounterRng rng(seed, 5);
  DocumentTermMatrix m(6);
  std::vector<SentimentLabel> y;
  for (std::size_t i = 0; i < per_class * 3; ++i) {
    const auto c = static_cast<std::uint32_t>(i % 3);
    std::vector<TermCount> row{{2 * c, static_cast<std::uint32_t>(1 + rng.below(3))}};
    if (rng.uniform() < 0.6) row.push_back({2 * c + 1, static_cast<std::uint32_t>(1 + rng.below(2))});
    m.add_row(row);
    y.push_back(static_cast<SentimentLabel>(c));
  }
  return {m, y};
}

std::vector<SentimentLabel> random_labels(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 8);
  std::vector<SentimentLabel> y;
  for (std::size_t i = 0; i < n; ++i) y.push_back(static_cast<SentimentLabel>(rng.below(3)));
  return y;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

TEST_SUITE("classifiers") {
  TEST_CASE("naive bayes posterior matches the hand computation") {
    const auto docs = test::tweets_from({"good gun", "ban gun"});
    FeatureConfig c;
    c.min_doc_freq = 1;
    const auto vocab = build_vocabulary(docs, c);
    REQUIRE(vocab.size() == 3);
    const auto x = vectorize_corpus(docs, vocab);
    const std::vector<SentimentLabel> y{SentimentLabel::ProGun, SentimentLabel::AntiGun};
    const auto model = train({Algorithm::NaiveBayes, {}, 0}, x, y);

    // P(good|Pro) = (1+1)/(2+3), P(good|Anti) = (0+1)/(2+3), equal priors.
    const auto& nb = std::get<d::NaiveBayesParams>(model.payload().params);
    const std::size_t good = *vocab.index_of("good");
    CHECK(std::abs(std::exp(nb.log_likelihood[0 * 3 + good]) - 2.0 / 5.0) < 1e-12);
    CHECK(std::abs(std::exp(nb.log_likelihood[1 * 3 + good]) - 1.0 / 5.0) < 1e-12);

    const auto q = vectorize_corpus(test::tweets_from({"good"}), vocab);
    const auto s = model.predict_scores(q)[0];
    CHECK(std::abs(s[0] - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(s[1] - 1.0 / 3.0) < 1e-12);
    CHECK(s[2] == 0.0);
    CHECK(model.predict(q)[0] == SentimentLabel::ProGun);

    // No evidence: the posterior is the prior.
    const auto empty = vectorize_corpus(test::tweets_from({"zzz"}), vocab);
    const auto p = model.predict_scores(empty)[0];
    CHECK(std::abs(p[0] - 0.5) < 1e-12);
    CHECK(std::abs(p[1] - 0.5) < 1e-12);
  }

  TEST_CASE("maxent gradient matches central differences") {
    const auto dtm = test::random_dtm(10, 8, 11, 0.4);
    const auto x = d::l2_normalize(dtm);
    const std::vector<std::size_t> y{0, 1, 2, 0, 1, 2, 0, 1, 2, 1};
    CounterRng rng(17);
    d::LinearParams p{8, std::vector<double>(3 * 8), std::vector<double>(3)};
    for (auto& w : p.weights) w = rng.uniform(-1, 1);
    for (auto& b : p.bias) b = rng.uniform(-1, 1);
    const double l2 = 0.01;
    d::LinearParams g;
    d::maxent_objective(p, x, y, l2, &g);
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      auto plus = p, minus = p;
      plus.weights[i] += h;
      minus.weights[i] -= h;
      const double num = (d::maxent_objective(plus, x, y, l2, nullptr) - d::maxent_objective(minus, x, y, l2, nullptr)) / (2 * h);
      worst = std::max(worst, rel_err(g.weights[i], num));
    }
    for (std::size_t k = 0; k < 3; ++k) {
      auto plus = p, minus = p;
      plus.bias[k] += h;
      minus.bias[k] -= h;
      const double num = (d::maxent_objective(plus, x, y, l2, nullptr) - d::maxent_objective(minus, x, y, l2, nullptr)) / (2 * h);
      worst = std::max(worst, rel_err(g.bias[k], num));
    }
    CHECK(worst < 1e-4);
  }

  TEST_CASE("neural net gradient matches central differences") {
    const auto dtm = test::random_dtm(10, 8, 12, 0.4);
    const auto x = d::l2_normalize(dtm);
    const std::vector<std::size_t> y{2, 1, 0, 0, 1, 2, 2, 1, 0, 1};
    CounterRng rng(19);
    auto p = d::init_mlp(8, 5, 3, 0.5, rng);
    for (auto& b : p.b1) b = rng.uniform(-0.5, 0.5);
    for (auto& b : p.b2) b = rng.uniform(-0.5, 0.5);
    d::MlpParams g;
    d::mlp_objective(p, x, y, &g);
    const double h = 1e-6;
    double worst = 0.0;
    const auto check = [&](std::vector<double> d::MlpParams::*field) {
      for (std::size_t i = 0; i < (p.*field).size(); ++i) {
        auto plus = p, minus = p;
        (plus.*field)[i] += h;
        (minus.*field)[i] -= h;
        const double num = (d::mlp_objective(plus, x, y, nullptr) - d::mlp_objective(minus, x, y, nullptr)) / (2 * h);
        worst = std::max(worst, rel_err((g.*field)[i], num));
      }
    };
    check(&d::MlpParams::w1);
    check(&d::MlpParams::b1);
    check(&d::MlpParams::w2);
    check(&d::MlpParams::b2);
    CHECK(worst < 1e-4);
  }

  TEST_CASE("maxent and neural net losses never increase") {
    const auto [x, y] = separable(20, 4);
    const auto noisy = random_labels(60, 4);
    for (const auto* labels : {&y, &noisy}) {
      for (const auto a : {Algorithm::MaxEnt, Algorithm::NeuralNet}) {
        TrainingTrace trace;
        train({a, {}, 1}, x, *labels, &trace);
        REQUIRE(trace.losses.size() > 10);
        for (std::size_t i = 1; i < trace.losses.size(); ++i) CHECK(trace.losses[i] <= trace.losses[i - 1] + 1e-6);
      }
    }
  }

  TEST_CASE("single-class training gives a constant predictor for every algorithm") {
    const auto x = test::random_dtm(12, 5, 2);
    const std::vector<SentimentLabel> y(12, SentimentLabel::Neutral);
    const auto q = test::random_dtm(5, 5, 9);
    for (const auto a : kAllAlgorithms) {
      const auto m = train(quick(a), x, y);
      CHECK(m.is_constant());
      CHECK(m.predict(q) == std::vector<SentimentLabel>(5, SentimentLabel::Neutral));
      for (const auto& s : m.predict_scores(q)) CHECK(argmax_label(s) == SentimentLabel::Neutral);
    }
  }

  TEST_CASE("hyperparameter validation") {
    const auto [x, y] = separable(5, 1);
    CHECK_THROWS_AS(train({Algorithm::RandomForest, {{"n_trees", 0}}, 0}, x, y), InvalidHyperparameter);
    CHECK_THROWS_AS(train({Algorithm::SVM, {{"C", -1}}, 0}, x, y), InvalidHyperparameter);
    CHECK_THROWS_AS(train({Algorithm::Tree, {{"depth", 3}}, 0}, x, y), InvalidHyperparameter);
    CHECK_THROWS_AS(train({Algorithm::NeuralNet, {{"hidden_units", 2.5}}, 0}, x, y), InvalidHyperparameter);
    CHECK(resolve_hyperparameters({Algorithm::RandomForest, {}, 0}).at("n_trees") == 200);
    CHECK(resolve_hyperparameters({Algorithm::BaggedTree, {}, 0}).at("n_trees") == 25);
  }

  TEST_CASE("dimension checks") {
    const auto [x, y] = separable(5, 1);
    CHECK_THROWS_AS(train({Algorithm::NaiveBayes, {}, 0}, x, std::vector<SentimentLabel>(3)), DimensionMismatch);
    const auto m = train({Algorithm::NaiveBayes, {}, 0}, x, y);
    CHECK_THROWS_AS(m.predict(test::random_dtm(2, 7, 1)), DimensionMismatch);
  }

  TEST_CASE("zero-weight maxent scores are uniform") {
    auto payload = std::make_shared<d::ModelPayload>();
    payload->params = d::LinearParams{4, std::vector<double>(12, 0.0), std::vector<double>(3, 0.0)};
    const TrainedModel m({Algorithm::MaxEnt, {}, 0}, 4, {SentimentLabel::ProGun, SentimentLabel::AntiGun, SentimentLabel::Neutral},
                         payload);
    for (const auto& s : m.predict_scores(test::random_dtm(4, 4, 3)))
      for (const double v : s) CHECK(std::abs(v - 1.0 / 3.0) < 1e-15);
  }

  TEST_CASE("separable corpus is fit exactly") {
    const auto [x, y] = separable(30, 6);
    for (const auto a : kAllAlgorithms) {
      const auto pred = train(quick(a), x, y).predict(x);
      std::size_t ok = 0;
      for (std::size_t i = 0; i < y.size(); ++i) ok += pred[i] == y[i];
      const double acc = static_cast<double>(ok) / static_cast<double>(y.size());
      INFO(algorithm_name(a));
      if (a == Algorithm::NaiveBayes) {
        CHECK(acc >= 0.99);
      } else {
        CHECK(acc == 1.0);
      }
    }
  }

  TEST_CASE("predict equals argmax of scores; probabilities sum to one") {
    const auto x = test::random_dtm(40, 9, 21);
    const auto y = random_labels(40, 21);
    const auto q = test::random_dtm(60, 9, 22, 0.2);
    for (const auto a : kAllAlgorithms) {
      INFO(algorithm_name(a));
      const auto m = train(quick(a), x, y);
      const auto scores = m.predict_scores(q);
      const auto labels = m.predict(q);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        CHECK(labels[i] == argmax_label(scores[i]));
        if (a == Algorithm::NaiveBayes || a == Algorithm::MaxEnt || a == Algorithm::NeuralNet ||
            a == Algorithm::BoostedTree)
          CHECK(std::abs(scores[i][0] + scores[i][1] + scores[i][2] - 1.0) < 1e-9);
      }
    }
  }

  TEST_CASE("argmax tie-break follows class order") {
    CHECK(argmax_label({0.5, 0.5, 0.0}) == SentimentLabel::ProGun);
    CHECK(argmax_label({0.2, 0.4, 0.4}) == SentimentLabel::AntiGun);
    CHECK(argmax_label({0.0, 0.0, 0.0}) == SentimentLabel::ProGun);
  }

  TEST_CASE("serialization round trip and determinism") {
    const auto x = test::random_dtm(50, 10, 31);
    const auto y = random_labels(50, 31);
    const auto q = test::random_dtm(100, 10, 32);
    for (const auto a : kAllAlgorithms) {
      INFO(algorithm_name(a));
      const auto m = train(quick(a, 77), x, y);
      const std::string bytes = serialize_model(m);
      CHECK(serialize_model(train(quick(a, 77), x, y)) == bytes);
      const auto back = deserialize_model(bytes);
      CHECK(back.predict_scores(q) == m.predict_scores(q));
      CHECK(back.predict(q) == m.predict(q));
      CHECK(serialize_model(back) == bytes);
    }
  }

  TEST_CASE("corrupt and future payloads are rejected") {
    const auto [x, y] = separable(5, 2);
    const std::string bytes = serialize_model(train(quick(Algorithm::RandomForest), x, y));
    CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() / 2)), CorruptPayload);
    std::string future = bytes;
    future.replace(future.find("\"version\":1"), 11, "\"version\":2");
    CHECK_THROWS_AS(deserialize_model(future), VersionMismatch);
    CHECK_THROWS_AS(deserialize_model("[]"), CorruptPayload);
  }

  TEST_CASE("random forest seeds matter, job count does not") {
    const auto x = test::random_dtm(60, 12, 41);
    const auto y = random_labels(60, 41);
    AlgorithmSpec s = quick(Algorithm::RandomForest, 1);
    set_max_jobs(1);
    const std::string one = serialize_model(train(s, x, y));
    set_max_jobs(4);
    CHECK(serialize_model(train(s, x, y)) == one);
    set_max_jobs(0);
    s.rng_seed = 2;
    CHECK(serialize_model(train(s, x, y)) != one);
  }
}
