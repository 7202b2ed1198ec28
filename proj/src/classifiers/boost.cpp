#include <algorithm>
#include <cmath>

#include "sentiscope/classifiers/internals.hpp"

namespace sentiscope::detail {

// LogitBoost (Friedman, Hastie & Tibshirani) with regression stumps, fitted
// one-vs-rest. Per round: p = 1/(1+exp(-2F)), working response
// z = (y - p)/(p(1-p)) clipped to [-4, 4], weights w = p(1-p); the stump is the
// weighted least-squares fit of z and F moves by half its prediction.

namespace {

constexpr double kMaxResponse = 4.0;
constexpr double kMinWeight = 1e-12;

struct ColumnEntry {
  std::uint32_t doc;
  std::uint32_t value;
};

// Column-major copy of the matrix with each column sorted by value.
struct SortedColumns {
  std::vector<std::size_t> offsets;
  std::vector<ColumnEntry> entries;
};

SortedColumns sort_columns(const DocumentTermMatrix& x) {
  SortedColumns cols;
  cols.offsets.assign(x.n_terms() + 1, 0);
  for (std::size_t i = 0; i < x.n_docs(); ++i)
    for (const auto& e : x.row(i)) ++cols.offsets[e.column + 1];
  for (std::size_t j = 0; j < x.n_terms(); ++j) cols.offsets[j + 1] += cols.offsets[j];
  cols.entries.resize(x.nnz());
  std::vector<std::size_t> cursor(cols.offsets.begin(), cols.offsets.end() - 1);
  for (std::size_t i = 0; i < x.n_docs(); ++i)
    for (const auto& e : x.row(i)) cols.entries[cursor[e.column]++] = {static_cast<std::uint32_t>(i), e.count};
  for (std::size_t j = 0; j < x.n_terms(); ++j)
    std::stable_sort(cols.entries.begin() + static_cast<std::ptrdiff_t>(cols.offsets[j]),
                     cols.entries.begin() + static_cast<std::ptrdiff_t>(cols.offsets[j + 1]),
                     [](const ColumnEntry& a, const ColumnEntry& b) { return a.value < b.value; });
  return cols;
}

Stump fit_stump(const SortedColumns& cols, std::size_t n_terms, const std::vector<double>& w,
                const std::vector<double>& z) {
  double s_total = 0.0, w_total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s_total += w[i] * z[i];
    w_total += w[i];
  }
  Stump best;
  best.left_value = best.right_value = s_total / w_total;
  double best_gain = s_total * s_total / w_total;
  const double n = static_cast<double>(w.size());

  for (std::size_t f = 0; f < n_terms; ++f) {
    const std::size_t b = cols.offsets[f], e = cols.offsets[f + 1];
    if (b == e) continue;
    double s_nz = 0.0, w_nz = 0.0;
    for (std::size_t k = b; k < e; ++k) {
      s_nz += w[cols.entries[k].doc] * z[cols.entries[k].doc];
      w_nz += w[cols.entries[k].doc];
    }
    // Left side starts as the block of documents without the term.
    double s_left = s_total - s_nz, w_left = w_total - w_nz;
    double n_left = n - static_cast<double>(e - b);
    double prev = 0.0;
    for (std::size_t k = b; k < e;) {
      const std::uint32_t value = cols.entries[k].value;
      if (n_left > 0.5) {
        const double s_right = s_total - s_left, w_right = w_total - w_left;
        if (w_left > 0 && w_right > 0) {
          const double gain = s_left * s_left / w_left + s_right * s_right / w_right;
          if (gain > best_gain + 1e-12 * std::max(1.0, best_gain)) {
            best_gain = gain;
            best.feature = static_cast<std::int32_t>(f);
            best.threshold = 0.5 * (prev + value);
            best.left_value = s_left / w_left;
            best.right_value = s_right / w_right;
          }
        }
      }
      for (; k < e && cols.entries[k].value == value; ++k) {
        s_left += w[cols.entries[k].doc] * z[cols.entries[k].doc];
        w_left += w[cols.entries[k].doc];
        n_left += 1.0;
      }
      prev = value;
    }
  }
  return best;
}

}  // namespace

BoostParams train_logitboost(const DocumentTermMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                             int iterations) {
  const SortedColumns cols = sort_columns(x);
  const std::size_t n = x.n_docs();
  BoostParams params;
  params.stumps.resize(n_classes);
  std::vector<double> f(n), w(n), z(n);
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::fill(f.begin(), f.end(), 0.0);
    for (int it = 0; it < iterations; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-2.0 * f[i]));
        const double target = y[i] == c ? 1.0 : 0.0;
        w[i] = std::max(p * (1.0 - p), kMinWeight);
        z[i] = std::clamp((target - p) / w[i], -kMaxResponse, kMaxResponse);
      }
      const Stump stump = fit_stump(cols, x.n_terms(), w, z);
      params.stumps[c].push_back(stump);
      for (std::size_t i = 0; i < n; ++i) f[i] += 0.5 * stump.left_value;
      if (stump.feature >= 0) {
        const auto j = static_cast<std::size_t>(stump.feature);
        for (std::size_t k = cols.offsets[j]; k < cols.offsets[j + 1]; ++k)
          if (cols.entries[k].value >= stump.threshold)
            f[cols.entries[k].doc] += 0.5 * (stump.right_value - stump.left_value);
      }
    }
  }
  return params;
}

double stump_value(const Stump& stump, std::span<const TermCount> row) {
  if (stump.feature < 0) return stump.left_value;
  const auto j = static_cast<std::uint32_t>(stump.feature);
  const auto it = std::lower_bound(row.begin(), row.end(), j,
                                   [](const TermCount& e, std::uint32_t c) { return e.column < c; });
  const double value = (it != row.end() && it->column == j) ? it->count : 0.0;
  return value >= stump.threshold ? stump.right_value : stump.left_value;
}

std::vector<double> boost_probabilities(const BoostParams& p, std::span<const TermCount> row) {
  std::vector<double> prob(p.stumps.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < p.stumps.size(); ++c) {
    double f = 0.0;
    for (const auto& s : p.stumps[c]) f += 0.5 * stump_value(s, row);
    prob[c] = 1.0 / (1.0 + std::exp(-2.0 * f));
    sum += prob[c];
  }
  for (auto& v : prob) v /= sum;
  return prob;
}

}  // namespace sentiscope::detail
