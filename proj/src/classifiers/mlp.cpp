#include <algorithm>
#include <cmath>

#include "sentiscope/classifiers/internals.hpp"

namespace sentiscope::detail {

MlpParams init_mlp(std::size_t n_inputs, std::size_t n_hidden, std::size_t n_classes, double init_scale,
                   CounterRng& rng) {
  MlpParams p;
  p.n_inputs = n_inputs;
  p.n_hidden = n_hidden;
  p.w1.resize(n_inputs * n_hidden);
  p.b1.assign(n_hidden, 0.0);
  p.w2.resize(n_classes * n_hidden);
  p.b2.assign(n_classes, 0.0);
  for (auto& w : p.w1) w = rng.uniform(-init_scale, init_scale);
  for (auto& w : p.w2) w = rng.uniform(-init_scale, init_scale);
  return p;
}

namespace {

// Hidden activations and class probabilities of one row.
void forward(const MlpParams& p, const std::uint32_t* cols, const double* vals, std::size_t nnz,
             std::vector<double>& hidden, std::vector<double>& probs) {
  const std::size_t h_n = p.n_hidden;
  hidden.assign(p.b1.begin(), p.b1.end());
  for (std::size_t t = 0; t < nnz; ++t) {
    if (cols[t] >= p.n_inputs) continue;
    const double* w = p.w1.data() + static_cast<std::size_t>(cols[t]) * h_n;
    const double v = vals[t];
    for (std::size_t h = 0; h < h_n; ++h) hidden[h] += w[h] * v;
  }
  for (auto& a : hidden) a = std::tanh(a);
  const std::size_t k = p.b2.size();
  probs.assign(p.b2.begin(), p.b2.end());
  for (std::size_t c = 0; c < k; ++c) {
    const double* w = p.w2.data() + c * h_n;
    double s = 0.0;
    for (std::size_t h = 0; h < h_n; ++h) s += w[h] * hidden[h];
    probs[c] += s;
  }
}

}  // namespace

double mlp_objective(const MlpParams& p, const ScaledMatrix& x, std::span<const std::size_t> y, MlpParams* grad) {
  const std::size_t h_n = p.n_hidden;
  const std::size_t k = p.b2.size();
  if (grad) {
    grad->n_inputs = p.n_inputs;
    grad->n_hidden = h_n;
    grad->w1.assign(p.w1.size(), 0.0);
    grad->b1.assign(h_n, 0.0);
    grad->w2.assign(p.w2.size(), 0.0);
    grad->b2.assign(k, 0.0);
  }
  std::vector<double> hidden, z, delta_h(h_n);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.n_rows; ++i) {
    const std::size_t b = x.row_begin(i), nnz = x.row_end(i) - b;
    forward(p, x.columns.data() + b, x.values.data() + b, nnz, hidden, z);
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - m);
    const double lse = m + std::log(sum);
    loss += lse - z[y[i]];
    if (!grad) continue;
    std::fill(delta_h.begin(), delta_h.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const double d = std::exp(z[c] - lse) - (c == y[i] ? 1.0 : 0.0);
      grad->b2[c] += d;
      double* g = grad->w2.data() + c * h_n;
      const double* w = p.w2.data() + c * h_n;
      for (std::size_t h = 0; h < h_n; ++h) {
        g[h] += d * hidden[h];
        delta_h[h] += d * w[h];
      }
    }
    for (std::size_t h = 0; h < h_n; ++h) {
      delta_h[h] *= 1.0 - hidden[h] * hidden[h];
      grad->b1[h] += delta_h[h];
    }
    for (std::size_t t = b; t < b + nnz; ++t) {
      double* g = grad->w1.data() + static_cast<std::size_t>(x.columns[t]) * h_n;
      const double v = x.values[t];
      for (std::size_t h = 0; h < h_n; ++h) g[h] += delta_h[h] * v;
    }
  }
  const double n = static_cast<double>(x.n_rows);
  if (grad) {
    for (auto* vec : {&grad->w1, &grad->b1, &grad->w2, &grad->b2})
      for (auto& g : *vec) g /= n;
  }
  return loss / n;
}

MlpParams train_mlp(const ScaledMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                    std::size_t n_hidden, double learning_rate, int epochs, double init_scale, std::uint64_t seed,
                    TrainingTrace* trace) {
  CounterRng rng(seed, 0x4E4E);
  MlpParams p = init_mlp(x.n_cols, n_hidden, n_classes, init_scale, rng);
  MlpParams grad;
  const auto step = [&](std::vector<double>& w, const std::vector<double>& g) {
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= learning_rate * g[j];
  };
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double loss = mlp_objective(p, x, y, &grad);
    if (trace) trace->losses.push_back(loss);
    step(p.w1, grad.w1);
    step(p.b1, grad.b1);
    step(p.w2, grad.w2);
    step(p.b2, grad.b2);
  }
  if (trace) trace->losses.push_back(mlp_objective(p, x, y, nullptr));
  return p;
}

std::vector<double> mlp_probabilities(const MlpParams& p, const ScaledRow& row) {
  std::vector<double> hidden, z;
  forward(p, row.columns.data(), row.values.data(), row.columns.size(), hidden, z);
  softmax(z);
  return z;
}

}  // namespace sentiscope::detail
