#pragma once

// Classifier training on fixed-length feature vectors.
//
// Neural models share one loop: stratified train/validation split,
// standardization fitted on the training part, mini-batch Adam on softmax
// cross-entropy, and early stopping that keeps the parameters of the epoch
// with the best validation accuracy. Everything is single-threaded and
// seeded, so a fixed configuration reproduces the same parameters exactly.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tactile/core.hpp"
#include "tactile/learn/forest.hpp"
#include "tactile/learn/network.hpp"
#include "tactile/pipeline.hpp"

namespace tactile::learn {

enum class ModelKind : std::uint8_t { MLP = 0, LSTM = 1, RF = 2, CNN1D = 3 };

std::string_view to_string(ModelKind k);  // "mlp", "lstm", "rf", "cnn1d"
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 300;
  std::size_t patience = 20;       // epochs without validation improvement
  double train_fraction = 0.8;     // rest is validation
  std::uint64_t seed = 0;

  void validate() const;
};

/// Three hidden layers (256, 128, 64) with ReLU and a 6-way output.
struct DenseNetConfig {
  std::size_t input_dim = 0;  // 0 takes the feature length
  std::vector<std::size_t> hidden_dims{256, 128, 64};
  std::size_t output_dim = kNumClasses;
  TrainConfig train{.learning_rate = 0.00025};

  void validate() const;
};

struct LstmConfig {
  std::size_t hidden = 64;
  TrainConfig train{.learning_rate = 0.0001};
};

struct CnnConfig {
  TrainConfig train{.learning_rate = 0.001};
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainingHistory {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;

  void write_csv(std::ostream& out) const;
};

/// Affine input normalization: (x - mean) / scale, element-wise.
struct Standardizer {
  Vec mean;
  Vec scale;

  /// Per-dimension statistics; constant dimensions get scale 1.
  static Standardizer fit_per_dimension(std::span<const Vec> rows);
  /// One mean and scale shared by every position (sequence models).
  static Standardizer fit_global(std::span<const Vec> rows);
  static Standardizer identity(std::size_t dim);

  Vec apply(std::span<const double> x) const;
};

struct TrainedModel {
  ModelKind kind = ModelKind::MLP;
  FeatureKind feature_kind = FeatureKind::ActivatedCount;
  std::size_t input_dim = 0;
  Standardizer scaler;
  std::optional<Network> network;
  std::optional<RandomForest> forest;
  TrainingHistory history;

  /// Class probabilities (vote fractions for forests). Throws
  /// KindMismatchError when the feature kind or length is not the one the
  /// model was trained on.
  std::array<double, kNumClasses> predict_proba(
      const FeatureVector& features) const;
  GestureClass predict(const FeatureVector& features) const;
};

TrainedModel train_mlp(std::span<const FeatureVector> features,
                       std::span<const GestureClass> labels,
                       const DenseNetConfig& config);
TrainedModel train_lstm(std::span<const FeatureVector> features,
                        std::span<const GestureClass> labels,
                        const LstmConfig& config);
TrainedModel train_cnn1d(std::span<const FeatureVector> features,
                         std::span<const GestureClass> labels,
                         const CnnConfig& config);
TrainedModel train_rf(std::span<const FeatureVector> features,
                      std::span<const GestureClass> labels,
                      const ForestConfig& config);

}  // namespace tactile::learn
