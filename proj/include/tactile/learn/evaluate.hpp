#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "tactile/core.hpp"
#include "tactile/learn/trainer.hpp"

namespace tactile::learn {

using ConfusionMatrix =
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

struct EvalReport {
  double accuracy = 0.0;
  ConfusionMatrix confusion{};  // rows = true class, cols = predicted
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::size_t total = 0;

  std::size_t trace() const;
  nlohmann::json to_json() const;
  /// Plain-text confusion table with per-class precision and recall.
  std::string render_table() const;
};

/// Accuracy is trace / total. Precision (recall) of a class that is never
/// predicted (never present) is reported as 0.
EvalReport evaluate_predictions(std::span<const GestureClass> truth,
                                std::span<const GestureClass> predicted);

/// Throws KindMismatchError when a feature was produced by a different
/// extractor than the model expects.
EvalReport evaluate(const TrainedModel& model,
                    std::span<const FeatureVector> features,
                    std::span<const GestureClass> labels);

/// Heat-map rendering of the confusion matrix as standalone SVG.
void write_confusion_svg(std::ostream& out, const EvalReport& report);

}  // namespace tactile::learn
