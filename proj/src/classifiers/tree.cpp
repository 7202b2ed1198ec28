#include <algorithm>
#include <cmath>
#include <optional>

#include "sentiscope/classifiers/internals.hpp"
#include "sentiscope/parallel.hpp"

namespace sentiscope::detail {

namespace {

using Counts = std::array<double, kNumClasses>;

double sum_of_squares_ratio(const Counts& c, double total) {
  double s = 0.0;
  for (double v : c) s += v * v;
  return s / total;
}

struct Split {
  std::uint32_t feature = 0;
  double threshold = 0.0;
};

struct GroupEntry {
  std::uint32_t value;
  std::uint32_t weight;
  std::uint8_t label;
};

// Scratch buffers reused across the nodes of one tree.
class SplitFinder {
 public:
  SplitFinder(const DocumentTermMatrix& x, std::span<const std::uint8_t> labels,
              std::span<const std::uint32_t> weights)
      : x_(x), labels_(labels), weights_(weights), feature_count_(x.n_terms(), 0),
        feature_start_(x.n_terms(), 0),
        cursor_(x.n_terms(), 0) {}

  std::optional<Split> find(const std::vector<std::uint32_t>& docs, const Counts& counts, double total,
                            std::size_t mtry, CounterRng& rng) {
    touched_.clear();
    std::size_t m = 0;
    for (const auto d : docs)
      for (const auto& e : x_.row(d)) {
        if (feature_count_[e.column]++ == 0) touched_.push_back(e.column);
        ++m;
      }
    std::sort(touched_.begin(), touched_.end());
    std::size_t offset = 0;
    for (const auto f : touched_) {
      feature_start_[f] = cursor_[f] = offset;
      offset += feature_count_[f];
    }
    grouped_.resize(m);
    for (const auto d : docs)
      for (const auto& e : x_.row(d)) grouped_[cursor_[e.column]++] = {e.count, weights_[d], labels_[d]};

    candidates_.clear();
    for (const auto f : touched_) {
      const std::size_t b = feature_start_[f], n = feature_count_[f];
      double present = 0.0;
      std::uint32_t lo = grouped_[b].value, hi = lo;
      for (std::size_t k = b; k < b + n; ++k) {
        present += grouped_[k].weight;
        lo = std::min(lo, grouped_[k].value);
        hi = std::max(hi, grouped_[k].value);
      }
      if (total - present > 0.5 || lo != hi) candidates_.push_back(f);
    }
    for (const auto f : touched_) feature_count_[f] = 0;

    if (mtry > 0 && candidates_.size() > mtry) {
      for (std::size_t i = 0; i < mtry; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(candidates_.size() - i));
        std::swap(candidates_[i], candidates_[j]);
      }
      candidates_.resize(mtry);
      std::sort(candidates_.begin(), candidates_.end());
    }

    const double parent = sum_of_squares_ratio(counts, total);
    double best_score = parent;
    std::optional<Split> best;
    for (const auto f : candidates_) {
      const std::size_t b = feature_start_[f];
      const std::size_t e = cursor_[f];
      std::sort(grouped_.begin() + static_cast<std::ptrdiff_t>(b), grouped_.begin() + static_cast<std::ptrdiff_t>(e),
                [](const GroupEntry& a, const GroupEntry& c) { return a.value < c.value; });
      Counts left = counts;
      for (std::size_t k = b; k < e; ++k) left[grouped_[k].label] -= grouped_[k].weight;
      double left_total = 0.0;
      for (double v : left) left_total += v;
      double prev = 0.0;
      for (std::size_t k = b; k < e;) {
        const std::uint32_t value = grouped_[k].value;
        if (left_total > 0.5) {
          Counts right;
          for (std::size_t c = 0; c < kNumClasses; ++c) right[c] = counts[c] - left[c];
          const double score = sum_of_squares_ratio(left, left_total) + sum_of_squares_ratio(right, total - left_total);
          if (score > best_score + 1e-12 * std::max(1.0, best_score)) {
            best_score = score;
            best = Split{f, 0.5 * (prev + value)};
          }
        }
        for (; k < e && grouped_[k].value == value; ++k) {
          left[grouped_[k].label] += grouped_[k].weight;
          left_total += grouped_[k].weight;
        }
        prev = value;
      }
    }
    return best;
  }

 private:
  const DocumentTermMatrix& x_;
  std::span<const std::uint8_t> labels_;
  std::span<const std::uint32_t> weights_;
  std::vector<std::uint32_t> feature_count_;
  std::vector<std::size_t> feature_start_;
  std::vector<std::size_t> cursor_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint32_t> candidates_;
  std::vector<GroupEntry> grouped_;
};

}  // namespace

TreeParams grow_tree(const DocumentTermMatrix& x, std::span<const std::uint8_t> labels,
                     std::span<const std::uint32_t> weights, const TreeOptions& options, CounterRng& rng) {
  struct Task {
    std::int32_t node;
    std::vector<std::uint32_t> docs;
    int depth;
  };
  TreeParams tree;
  std::vector<std::uint32_t> root;
  for (std::size_t i = 0; i < x.n_docs(); ++i)
    if (weights[i] > 0) root.push_back(static_cast<std::uint32_t>(i));
  tree.nodes.emplace_back();
  std::vector<Task> stack;
  stack.push_back({0, std::move(root), 0});
  SplitFinder finder(x, labels, weights);

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    Counts counts{};
    for (const auto d : task.docs) counts[labels[d]] += weights[d];
    tree.nodes[static_cast<std::size_t>(task.node)].counts = counts;
    double total = 0.0;
    int classes_present = 0;
    for (double c : counts) {
      total += c;
      classes_present += c > 0 ? 1 : 0;
    }
    if (task.depth >= options.max_depth || total < options.min_samples_split || classes_present < 2) continue;
    const auto split = finder.find(task.docs, counts, total, options.mtry, rng);
    if (!split) continue;

    std::vector<std::uint32_t> left, right;
    for (const auto d : task.docs)
      (x.at(d, split->feature) >= split->threshold ? right : left).push_back(d);
    const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[static_cast<std::size_t>(task.node)];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = left_id;
    node.right = left_id + 1;
    stack.push_back({left_id + 1, std::move(right), task.depth + 1});
    stack.push_back({left_id, std::move(left), task.depth + 1});
  }
  return tree;
}

const TreeNode& tree_leaf(const TreeParams& tree, std::span<const TermCount> row) {
  const TreeNode* node = &tree.nodes.front();
  while (node->feature >= 0) {
    const auto f = static_cast<std::uint32_t>(node->feature);
    const auto it = std::lower_bound(row.begin(), row.end(), f,
                                     [](const TermCount& e, std::uint32_t c) { return e.column < c; });
    const double value = (it != row.end() && it->column == f) ? it->count : 0.0;
    node = &tree.nodes[static_cast<std::size_t>(value >= node->threshold ? node->right : node->left)];
  }
  return *node;
}

ForestParams train_forest(const DocumentTermMatrix& x, std::span<const std::uint8_t> labels, std::size_t n_trees,
                          const TreeOptions& options, std::uint64_t seed) {
  ForestParams forest;
  forest.trees.resize(n_trees);
  const CounterRng base(seed);
  const std::size_t n = x.n_docs();
  parallel_for(n_trees, [&](std::size_t b) {
    CounterRng rng = base.split(b);
    std::vector<std::uint32_t> weights(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++weights[rng.below(n)];
    forest.trees[b] = grow_tree(x, labels, weights, options, rng);
  });
  return forest;
}

}  // namespace sentiscope::detail
