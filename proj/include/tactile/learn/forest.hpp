#pragma once

// CART classification trees and a bagged random forest.
//
// Trees split on x[feature] <= threshold with thresholds at midpoints
// between consecutive distinct values, choose the candidate with the lowest
// weighted Gini impurity and grow until every leaf is pure or no feature
// separates its samples. Candidate features are scanned in ascending index
// order and thresholds in ascending order; the first best split wins.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "tactile/core.hpp"
#include "tactile/random.hpp"

namespace tactile::learn {

using FeatureRows = std::vector<std::vector<double>>;

struct ForestConfig {
  std::size_t n_estimators = 60;
  bool bootstrap = true;
  std::size_t max_features = 0;  // 0 selects floor(sqrt(d))
  std::uint64_t seed = 0;

  void validate() const;
};

class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t label = 0;  // majority class, lowest code on ties

    bool is_leaf() const { return feature < 0; }
  };

  /// Fits on rows[samples[i]]; `samples` may repeat indices (bootstrap).
  /// `max_features` features are sampled per node; when none of them can
  /// split, the remaining features are tried in random order.
  void fit(const FeatureRows& rows, std::span<const GestureClass> labels,
           std::vector<std::size_t> samples, std::size_t max_features,
           Rng& rng);

  std::size_t predict(std::span<const double> x) const;
  std::size_t depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::int32_t grow(const FeatureRows& rows,
                    std::span<const GestureClass> labels,
                    std::vector<std::size_t>& samples, std::size_t begin,
                    std::size_t end, std::size_t max_features, Rng& rng);

  std::vector<Node> nodes_;
  std::size_t n_features_ = 0;
};

class RandomForest {
 public:
  void fit(const FeatureRows& rows, std::span<const GestureClass> labels,
           const ForestConfig& config);

  /// Fraction of trees voting for each class.
  std::array<double, kNumClasses> vote_fractions(
      std::span<const double> x) const;
  /// Majority vote; ties go to the lowest class code.
  std::size_t predict(std::span<const double> x) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace tactile::learn
