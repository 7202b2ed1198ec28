#include <algorithm>
#include <cmath>

#include "sentiscope/classifiers/internals.hpp"

namespace sentiscope::detail {

void softmax(std::vector<double>& z) {
  if (z.empty()) return;
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) sum += (v = std::exp(v - m));
  for (auto& v : z) v /= sum;
}

ScaledMatrix l2_normalize(const DocumentTermMatrix& dtm) {
  ScaledMatrix out;
  out.n_rows = dtm.n_docs();
  out.n_cols = dtm.n_terms();
  out.offsets.reserve(dtm.n_docs() + 1);
  out.columns.reserve(dtm.nnz());
  out.values.reserve(dtm.nnz());
  for (std::size_t i = 0; i < dtm.n_docs(); ++i) {
    const auto row = dtm.row(i);
    double norm = 0.0;
    for (const auto& e : row) norm += static_cast<double>(e.count) * e.count;
    norm = std::sqrt(norm);
    for (const auto& e : row) {
      out.columns.push_back(e.column);
      out.values.push_back(e.count / norm);
    }
    out.offsets.push_back(out.columns.size());
  }
  return out;
}

ScaledRow l2_normalize(std::span<const TermCount> row) {
  ScaledRow out;
  double norm = 0.0;
  for (const auto& e : row) norm += static_cast<double>(e.count) * e.count;
  norm = std::sqrt(norm);
  for (const auto& e : row) {
    out.columns.push_back(e.column);
    out.values.push_back(e.count / norm);
  }
  return out;
}

std::vector<double> linear_scores(const LinearParams& p, const ScaledRow& row) {
  const std::size_t k = p.bias.size();
  std::vector<double> z = p.bias;
  for (std::size_t c = 0; c < k; ++c) {
    const double* w = p.weights.data() + c * p.n_features;
    for (std::size_t t = 0; t < row.columns.size(); ++t)
      if (row.columns[t] < p.n_features) z[c] += w[row.columns[t]] * row.values[t];
  }
  return z;
}

// ---------------------------------------------------------------------------
// MaxEnt: multinomial logistic regression, full-batch gradient descent.

double maxent_objective(const LinearParams& params, const ScaledMatrix& x, std::span<const std::size_t> y,
                        double l2, LinearParams* grad) {
  const std::size_t k = params.bias.size();
  const std::size_t v = params.n_features;
  if (grad) {
    grad->n_features = v;
    grad->weights.assign(k * v, 0.0);
    grad->bias.assign(k, 0.0);
  }
  double loss = 0.0;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < x.n_rows; ++i) {
    const std::size_t b = x.row_begin(i), e = x.row_end(i);
    for (std::size_t c = 0; c < k; ++c) {
      double s = params.bias[c];
      const double* w = params.weights.data() + c * v;
      for (std::size_t t = b; t < e; ++t) s += w[x.columns[t]] * x.values[t];
      z[c] = s;
    }
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += std::exp(z[c] - m);
    const double lse = m + std::log(sum);
    loss += lse - z[y[i]];
    if (grad) {
      for (std::size_t c = 0; c < k; ++c) {
        const double d = std::exp(z[c] - lse) - (c == y[i] ? 1.0 : 0.0);
        grad->bias[c] += d;
        double* g = grad->weights.data() + c * v;
        for (std::size_t t = b; t < e; ++t) g[x.columns[t]] += d * x.values[t];
      }
    }
  }
  const double n = static_cast<double>(x.n_rows);
  loss /= n;
  double sq = 0.0;
  for (double w : params.weights) sq += w * w;
  loss += 0.5 * l2 * sq;
  if (grad) {
    for (auto& g : grad->bias) g /= n;
    for (std::size_t j = 0; j < grad->weights.size(); ++j)
      grad->weights[j] = grad->weights[j] / n + l2 * params.weights[j];
  }
  return loss;
}

LinearParams train_maxent(const ScaledMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                          double l2, double learning_rate, int epochs, TrainingTrace* trace) {
  LinearParams p;
  p.n_features = x.n_cols;
  p.weights.assign(n_classes * x.n_cols, 0.0);
  p.bias.assign(n_classes, 0.0);
  LinearParams grad;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double loss = maxent_objective(p, x, y, l2, &grad);
    if (trace) trace->losses.push_back(loss);
    for (std::size_t j = 0; j < p.weights.size(); ++j) p.weights[j] -= learning_rate * grad.weights[j];
    for (std::size_t c = 0; c < n_classes; ++c) p.bias[c] -= learning_rate * grad.bias[c];
  }
  if (trace) trace->losses.push_back(maxent_objective(p, x, y, l2, nullptr));
  return p;
}

// ---------------------------------------------------------------------------
// Linear SVM: one-vs-rest, hinge loss, deterministic full-batch Pegasos.
//
// Minimizes (lambda/2)||w||^2 + (1/n) sum_i max(0, 1 - y_i w.x_i) with
// lambda = 1/(C n), which is C sum_i hinge + ||w||^2/2 up to scale. The bias
// is an extra weight on a constant input of 1. Step t uses eta = 1/(lambda t)
// and the iterate is projected onto the ball of radius 1/sqrt(lambda).

LinearParams train_linear_svm(const ScaledMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                              double c, int epochs) {
  const std::size_t v = x.n_cols;
  const double n = static_cast<double>(x.n_rows);
  const double lambda = 1.0 / (c * n);
  const double radius = 1.0 / std::sqrt(lambda);
  LinearParams p;
  p.n_features = v;
  p.weights.assign(n_classes * v, 0.0);
  p.bias.assign(n_classes, 0.0);
  std::vector<double> step(v);
  for (std::size_t cls = 0; cls < n_classes; ++cls) {
    double* w = p.weights.data() + cls * v;
    double& b = p.bias[cls];
    for (int t = 1; t <= epochs; ++t) {
      std::fill(step.begin(), step.end(), 0.0);
      double step_b = 0.0;
      for (std::size_t i = 0; i < x.n_rows; ++i) {
        const double target = y[i] == cls ? 1.0 : -1.0;
        double margin = b;
        for (std::size_t k = x.row_begin(i); k < x.row_end(i); ++k) margin += w[x.columns[k]] * x.values[k];
        if (target * margin < 1.0) {
          for (std::size_t k = x.row_begin(i); k < x.row_end(i); ++k) step[x.columns[k]] += target * x.values[k];
          step_b += target;
        }
      }
      const double decay = 1.0 - 1.0 / t;
      const double scale = c / t;  // eta_t / n
      double norm = 0.0;
      for (std::size_t j = 0; j < v; ++j) {
        w[j] = decay * w[j] + scale * step[j];
        norm += w[j] * w[j];
      }
      b = decay * b + scale * step_b;
      norm = std::sqrt(norm + b * b);
      if (norm > radius) {
        const double shrink = radius / norm;
        for (std::size_t j = 0; j < v; ++j) w[j] *= shrink;
        b *= shrink;
      }
    }
  }
  return p;
}

}  // namespace sentiscope::detail
