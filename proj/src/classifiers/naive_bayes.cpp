#include <cmath>

#include "sentiscope/classifiers/internals.hpp"

namespace sentiscope::detail {

NaiveBayesParams train_naive_bayes(const DocumentTermMatrix& x, std::span<const std::size_t> y,
                                   std::size_t n_classes, double alpha) {
  const std::size_t v = x.n_terms();
  std::vector<double> doc_count(n_classes, 0.0);
  std::vector<double> term_count(n_classes * v, 0.0);
  std::vector<double> total(n_classes, 0.0);
  for (std::size_t i = 0; i < x.n_docs(); ++i) {
    const std::size_t c = y[i];
    doc_count[c] += 1.0;
    for (const auto& e : x.row(i)) {
      term_count[c * v + e.column] += e.count;
      total[c] += e.count;
    }
  }
  NaiveBayesParams p;
  p.log_prior.resize(n_classes);
  p.log_likelihood.resize(n_classes * v);
  const double n = static_cast<double>(x.n_docs());
  for (std::size_t c = 0; c < n_classes; ++c) {
    p.log_prior[c] = std::log(doc_count[c] / n);
    const double denom = std::log(total[c] + alpha * static_cast<double>(v));
    for (std::size_t j = 0; j < v; ++j) p.log_likelihood[c * v + j] = std::log(term_count[c * v + j] + alpha) - denom;
  }
  return p;
}

std::vector<double> naive_bayes_log_posterior(const NaiveBayesParams& p, std::span<const TermCount> row) {
  const std::size_t k = p.log_prior.size();
  const std::size_t v = k == 0 ? 0 : p.log_likelihood.size() / k;
  std::vector<double> z = p.log_prior;
  for (std::size_t c = 0; c < k; ++c)
    for (const auto& e : row) z[c] += e.count * p.log_likelihood[c * v + e.column];
  return z;
}

}  // namespace sentiscope::detail
