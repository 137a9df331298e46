#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactile/core.hpp"
#include "tactile/learn/evaluate.hpp"
#include "tactile/learn/trainer.hpp"
#include "tactile/pipeline.hpp"

namespace tactile::learn {

struct AblationRow {
  FeatureKind kind = FeatureKind::ActivatedCount;
  std::string label;  // "Ours", "F1" .. "F4"
  EvalReport report;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::size_t dropped = 0;  // recordings without contact
};

struct AblationResult {
  std::vector<AblationRow> rows;

  const AblationRow& row(FeatureKind kind) const;
  nlohmann::json to_json() const;
  std::string render_table() const;
};

/// Trains one MLP per feature kind on the train split of `dataset` with the
/// same configuration and seed, and evaluates each on the test split.
/// Errors are re-raised with the feature kind in the message.
AblationResult ablation_run(const Dataset& dataset,
                            std::span<const FeatureKind> kinds,
                            const PipelineConfig& pipeline,
                            const DenseNetConfig& config);

}  // namespace tactile::learn
