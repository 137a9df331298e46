#include "tactile/learn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tactile/errors.hpp"

namespace tactile::learn {

using nlohmann::json;

namespace {

using Counts = std::array<std::int64_t, kNumClasses>;

std::int64_t sum_squares(const Counts& c) {
  std::int64_t s = 0;
  for (auto v : c) s += v * v;
  return s;
}

// Weighted child Gini is  n - (A / nL + B / nR)  up to the constant node
// size, so the best split maximises A / nL + B / nR. Candidates are kept as
// an exact fraction (numerator, denominator) and compared in integers.
__extension__ using Wide = __int128;

struct SplitScore {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  bool better_than(const SplitScore& other) const {
    return static_cast<Wide>(numerator) * other.denominator >
           static_cast<Wide>(other.numerator) * denominator;
  }
};

std::uint8_t majority(const Counts& counts) {
  return static_cast<std::uint8_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

void ForestConfig::validate() const {
  if (n_estimators == 0) throw ConfigError("forest needs at least one tree");
}

void DecisionTree::fit(const FeatureRows& rows,
                       std::span<const GestureClass> labels,
                       std::vector<std::size_t> samples,
                       std::size_t max_features, Rng& rng) {
  if (rows.empty() || rows.front().empty()) {
    throw ConfigError("cannot fit a tree on an empty feature matrix");
  }
  if (samples.empty()) throw ConfigError("tree needs at least one sample");
  n_features_ = rows.front().size();
  nodes_.clear();
  grow(rows, labels, samples, 0, samples.size(),
       std::clamp<std::size_t>(max_features, 1, n_features_), rng);
}

std::int32_t DecisionTree::grow(const FeatureRows& rows,
                                std::span<const GestureClass> labels,
                                std::vector<std::size_t>& samples,
                                std::size_t begin, std::size_t end,
                                std::size_t max_features, Rng& rng) {
  Counts counts{};
  for (std::size_t i = begin; i < end; ++i) {
    ++counts[index_of(labels[samples[i]])];
  }
  const auto node_id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[node_id].label = majority(counts);
  const auto n = static_cast<std::int64_t>(end - begin);
  if (std::count(counts.begin(), counts.end(), n) == 1) return node_id;  // pure

  // Feature order: a random permutation, of which the first max_features
  // are the candidate set (scanned in ascending order). The tail is the
  // fallback when no candidate can split.
  std::vector<std::size_t> order(n_features_);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < max_features; ++i) {
    std::swap(order[i], order[i + rng.index(n_features_ - i)]);
  }
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(max_features));

  std::vector<std::pair<double, std::size_t>> sorted(end - begin);
  bool found = false;
  SplitScore best;
  std::size_t best_feature = 0;
  double best_threshold = 0.0;

  auto scan_feature = [&](std::size_t f) {
    for (std::size_t i = begin; i < end; ++i) {
      sorted[i - begin] = {rows[samples[i]][f], samples[i]};
    }
    std::sort(sorted.begin(), sorted.end());
    Counts left{};
    Counts right = counts;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      const auto c = index_of(labels[sorted[k].second]);
      ++left[c];
      --right[c];
      if (sorted[k].first == sorted[k + 1].first) continue;
      const auto n_left = static_cast<std::int64_t>(k + 1);
      const auto n_right = n - n_left;
      const SplitScore score{
          sum_squares(left) * n_right + sum_squares(right) * n_left,
          n_left * n_right};
      if (!found || score.better_than(best)) {
        found = true;
        best = score;
        best_feature = f;
        best_threshold = sorted[k].first +
                         (sorted[k + 1].first - sorted[k].first) / 2.0;
        // Adjacent doubles can round the midpoint up to the right value.
        if (best_threshold >= sorted[k + 1].first) {
          best_threshold = sorted[k].first;
        }
      }
    }
  };

  for (std::size_t i = 0; i < max_features; ++i) scan_feature(order[i]);
  for (std::size_t i = max_features; !found && i < n_features_; ++i) {
    scan_feature(order[i]);
  }
  if (!found) return node_id;

  auto mid = std::partition(
      samples.begin() + static_cast<std::ptrdiff_t>(begin),
      samples.begin() + static_cast<std::ptrdiff_t>(end),
      [&](std::size_t s) { return rows[s][best_feature] <= best_threshold; });
  const auto split_at = static_cast<std::size_t>(mid - samples.begin());

  nodes_[node_id].feature = static_cast<std::int32_t>(best_feature);
  nodes_[node_id].threshold = best_threshold;
  const auto left = grow(rows, labels, samples, begin, split_at, max_features, rng);
  const auto right = grow(rows, labels, samples, split_at, end, max_features, rng);
  nodes_[node_id].left = left;
  nodes_[node_id].right = right;
  return node_id;
}

std::size_t DecisionTree::predict(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw ConfigError("tree expects " + std::to_string(n_features_) +
                      " features, got " + std::to_string(x.size()));
  }
  std::int32_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                      : node.right;
  }
  return nodes_[id].label;
}

std::size_t DecisionTree::depth() const {
  // Iterative walk; nodes are stored parent-before-children.
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

json DecisionTree::to_json() const {
  std::vector<std::int32_t> feature, left, right;
  std::vector<double> threshold;
  std::vector<int> label;
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    label.push_back(n.label);
  }
  return {{"n_features", n_features_}, {"feature", feature},
          {"threshold", threshold},    {"left", left},
          {"right", right},            {"label", label}};
}

DecisionTree DecisionTree::from_json(const json& j) {
  DecisionTree tree;
  tree.n_features_ = j.at("n_features").get<std::size_t>();
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto label = j.at("label").get<std::vector<int>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n ||
      label.size() != n || n == 0) {
    throw ConfigError("malformed tree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    Node node{feature[i], threshold[i], left[i], right[i],
              static_cast<std::uint8_t>(label[i])};
    if (!node.is_leaf() &&
        (node.left <= 0 || node.right <= 0 || static_cast<std::size_t>(node.left) >= n ||
         static_cast<std::size_t>(node.right) >= n ||
         static_cast<std::size_t>(node.feature) >= tree.n_features_)) {
      throw ConfigError("malformed tree node " + std::to_string(i));
    }
    if (label[i] < 0 || label[i] >= static_cast<int>(kNumClasses)) {
      throw ConfigError("tree leaf label out of range");
    }
    tree.nodes_.push_back(node);
  }
  return tree;
}

void RandomForest::fit(const FeatureRows& rows,
                       std::span<const GestureClass> labels,
                       const ForestConfig& config) {
  config.validate();
  if (rows.empty() || rows.front().empty()) {
    throw ConfigError("cannot fit a forest on an empty feature matrix");
  }
  if (rows.size() != labels.size()) {
    throw ConfigError("feature rows and labels differ in count");
  }
  const std::size_t d = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != d) throw ConfigError("feature rows differ in length");
  }
  const std::size_t max_features =
      config.max_features == 0
          ? std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))))
          : config.max_features;

  trees_.assign(config.n_estimators, DecisionTree{});
  for (std::size_t t = 0; t < config.n_estimators; ++t) {
    Rng rng(mix_seed(config.seed, t));
    std::vector<std::size_t> samples(rows.size());
    if (config.bootstrap) {
      for (auto& s : samples) s = rng.index(rows.size());
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    trees_[t].fit(rows, labels, std::move(samples), max_features, rng);
  }
}

std::array<double, kNumClasses> RandomForest::vote_fractions(
    std::span<const double> x) const {
  std::array<double, kNumClasses> votes{};
  for (const auto& tree : trees_) votes[tree.predict(x)] += 1.0;
  for (auto& v : votes) v /= static_cast<double>(trees_.size());
  return votes;
}

std::size_t RandomForest::predict(std::span<const double> x) const {
  const auto votes = vote_fractions(x);
  return static_cast<std::size_t>(
      std::max_element(votes.begin(), votes.end()) - votes.begin());
}

json RandomForest::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const json& j) {
  RandomForest forest;
  for (const auto& jt : j.at("trees")) {
    forest.trees_.push_back(DecisionTree::from_json(jt));
  }
  if (forest.trees_.empty()) throw ConfigError("forest has no trees");
  return forest;
}

}  // namespace tactile::learn
