#include "tactile/learn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <set>

#include "tactile/errors.hpp"
#include "tactile/learn/adam.hpp"

namespace tactile::learn {

namespace {

constexpr std::array<std::string_view, 4> kModelNames = {"mlp", "lstm", "rf",
                                                         "cnn1d"};

// Shared validation of a labeled feature set; returns the common length.
std::size_t check_training_set(std::span<const FeatureVector> features,
                               std::span<const GestureClass> labels) {
  if (features.empty()) throw ConfigError("empty feature matrix");
  if (features.size() != labels.size()) {
    throw ConfigError("features and labels differ in count");
  }
  const auto kind = features.front().kind;
  const std::size_t dim = features.front().values.size();
  if (dim == 0) throw ConfigError("empty feature matrix");
  for (const auto& f : features) {
    if (f.kind != kind) {
      throw KindMismatchError("training features mix kinds");
    }
    if (f.values.size() != dim) {
      throw ConfigError("training features differ in length");
    }
    for (double v : f.values) {
      if (!std::isfinite(v)) throw ConfigError("non-finite feature value");
    }
  }
  return dim;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) -
                                  v.begin());
}

using NetworkBuilder = std::function<Network(std::size_t dim, Rng& rng)>;

TrainedModel train_network(std::span<const FeatureVector> features,
                           std::span<const GestureClass> labels,
                           const TrainConfig& config, ModelKind kind,
                           bool per_dimension_scaling,
                           const NetworkBuilder& build) {
  config.validate();
  const std::size_t dim = check_training_set(features, labels);
  const auto split =
      stratified_split(labels, config.train_fraction, mix_seed(config.seed, 1));

  std::vector<Vec> raw_train;
  for (auto i : split.first) raw_train.push_back(features[i].values);

  TrainedModel model;
  model.kind = kind;
  model.feature_kind = features.front().kind;
  model.input_dim = dim;
  model.scaler = per_dimension_scaling ? Standardizer::fit_per_dimension(raw_train)
                                       : Standardizer::fit_global(raw_train);

  std::vector<Vec> x_train, x_val;
  std::vector<std::size_t> y_train, y_val;
  for (auto i : split.first) {
    x_train.push_back(model.scaler.apply(features[i].values));
    y_train.push_back(index_of(labels[i]));
  }
  for (auto i : split.second) {
    x_val.push_back(model.scaler.apply(features[i].values));
    y_val.push_back(index_of(labels[i]));
  }

  Rng init_rng(mix_seed(config.seed, 2));
  Network net = build(dim, init_rng);
  Rng shuffle_rng(mix_seed(config.seed, 3));

  auto blocks = net.params();
  std::vector<AdamState> states;
  for (const auto& b : blocks) states.emplace_back(b.values.size());
  const AdamConfig adam{.learning_rate = config.learning_rate};

  std::optional<Network> best;
  double best_val = -1.0;
  double best_val_loss = 0.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(x_train.size());

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      net.zero_grad();
      for (std::size_t k = start; k < stop; ++k) {
        const auto s = order[k];
        const auto logits = net.forward(x_train[s]);
        auto loss = softmax_cross_entropy(logits, y_train[s]);
        loss_sum += loss.loss;
        if (argmax(logits) == y_train[s]) ++correct;
        net.backward(loss.grad);
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (auto& g : blocks[b].grads) g *= inv;
        adam_step(blocks[b].values, blocks[b].grads, states[b], adam);
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(x_train.size());
    stats.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(x_train.size());
    if (!std::isfinite(stats.train_loss)) {
      throw DivergenceError("training loss became non-finite at epoch " +
                                std::to_string(epoch),
                            epoch);
    }
    double val_loss = 0.0;
    std::size_t val_correct = 0;
    for (std::size_t i = 0; i < x_val.size(); ++i) {
      const auto logits = net.infer(x_val[i]);
      val_loss += softmax_cross_entropy(logits, y_val[i]).loss;
      if (argmax(logits) == y_val[i]) ++val_correct;
    }
    stats.val_loss = val_loss / static_cast<double>(x_val.size());
    stats.val_accuracy =
        static_cast<double>(val_correct) / static_cast<double>(x_val.size());
    model.history.epochs.push_back(stats);

    // Ties in accuracy go to the lower validation loss.
    if (stats.val_accuracy > best_val ||
        (stats.val_accuracy == best_val && stats.val_loss < best_val_loss)) {
      best_val = stats.val_accuracy;
      best_val_loss = stats.val_loss;
      best = net;
      model.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  model.network = std::move(best);
  return model;
}

}  // namespace

std::string_view to_string(ModelKind k) {
  return kModelNames[static_cast<std::size_t>(k)];
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (std::size_t i = 0; i < kModelNames.size(); ++i) {
    if (kModelNames[i] == name) return static_cast<ModelKind>(i);
  }
  if (name == "cnn") return ModelKind::CNN1D;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (max_epochs == 0) throw ConfigError("max epochs must be positive");
  if (patience == 0) throw ConfigError("patience must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
}

void DenseNetConfig::validate() const {
  if (hidden_dims.size() != 3) {
    throw ConfigError("the MLP has exactly three hidden layers");
  }
  for (auto h : hidden_dims) {
    if (h == 0) throw ConfigError("hidden layer width must be positive");
  }
  if (output_dim != kNumClasses) {
    throw ConfigError("the MLP output layer has exactly 6 units");
  }
  train.validate();
}

void TrainingHistory::write_csv(std::ostream& out) const {
  out << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  const auto old_precision = out.precision(17);
  for (const auto& e : epochs) {
    out << e.epoch << ',' << e.train_loss << ',' << e.train_accuracy << ','
        << e.val_loss << ',' << e.val_accuracy << '\n';
  }
  out.precision(old_precision);
}

Standardizer Standardizer::fit_per_dimension(std::span<const Vec> rows) {
  if (rows.empty()) throw ConfigError("cannot standardize zero rows");
  const std::size_t d = rows.front().size();
  Standardizer s{Vec(d, 0.0), Vec(d, 0.0)};
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) s.mean[i] += r[i];
  }
  for (auto& m : s.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = r[i] - s.mean[i];
      s.scale[i] += diff * diff;
    }
  }
  for (auto& v : s.scale) {
    v = std::sqrt(v / n);
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

Standardizer Standardizer::fit_global(std::span<const Vec> rows) {
  if (rows.empty()) throw ConfigError("cannot standardize zero rows");
  const std::size_t d = rows.front().size();
  double sum = 0.0, count = 0.0;
  for (const auto& r : rows) {
    for (double v : r) sum += v;
    count += static_cast<double>(r.size());
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (const auto& r : rows) {
    for (double v : r) ss += (v - mean) * (v - mean);
  }
  double scale = std::sqrt(ss / count);
  if (!(scale > 1e-12)) scale = 1.0;
  return {Vec(d, mean), Vec(d, scale)};
}

Standardizer Standardizer::identity(std::size_t dim) {
  return {Vec(dim, 0.0), Vec(dim, 1.0)};
}

Vec Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw ConfigError("standardizer expects " + std::to_string(mean.size()) +
                      " values, got " + std::to_string(x.size()));
  }
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
  return out;
}

std::array<double, kNumClasses> TrainedModel::predict_proba(
    const FeatureVector& features) const {
  if (features.kind != feature_kind) {
    throw KindMismatchError("model was trained on '" +
                            std::string(tactile::to_string(feature_kind)) +
                            "' features, got '" +
                            std::string(tactile::to_string(features.kind)) + "'");
  }
  if (features.values.size() != input_dim) {
    throw KindMismatchError("model expects " + std::to_string(input_dim) +
                            " feature values, got " +
                            std::to_string(features.values.size()));
  }
  std::array<double, kNumClasses> out{};
  if (forest) return forest->vote_fractions(features.values);
  if (!network) throw ConfigError("model has no parameters");
  const auto p = softmax(network->infer(scaler.apply(features.values)));
  std::copy_n(p.begin(), kNumClasses, out.begin());
  return out;
}

GestureClass TrainedModel::predict(const FeatureVector& features) const {
  const auto p = predict_proba(features);
  return gesture_from_index(argmax(p));
}

TrainedModel train_mlp(std::span<const FeatureVector> features,
                       std::span<const GestureClass> labels,
                       const DenseNetConfig& config) {
  config.validate();
  if (!features.empty() && config.input_dim != 0 &&
      features.front().values.size() != config.input_dim) {
    throw ConfigError("MLP input_dim " + std::to_string(config.input_dim) +
                      " does not match feature length " +
                      std::to_string(features.front().values.size()));
  }
  return train_network(
      features, labels, config.train, ModelKind::MLP, true,
      [&](std::size_t dim, Rng& rng) {
        return make_mlp(dim, config.hidden_dims, config.output_dim, rng);
      });
}

TrainedModel train_lstm(std::span<const FeatureVector> features,
                        std::span<const GestureClass> labels,
                        const LstmConfig& config) {
  if (config.hidden == 0) throw ConfigError("LSTM hidden size must be positive");
  return train_network(features, labels, config.train, ModelKind::LSTM, false,
                       [&](std::size_t dim, Rng& rng) {
                         return make_lstm_classifier(dim, config.hidden,
                                                     kNumClasses, rng);
                       });
}

TrainedModel train_cnn1d(std::span<const FeatureVector> features,
                         std::span<const GestureClass> labels,
                         const CnnConfig& config) {
  return train_network(features, labels, config.train, ModelKind::CNN1D, false,
                       [](std::size_t dim, Rng& rng) {
                         return make_cnn1d(dim, kNumClasses, rng);
                       });
}

TrainedModel train_rf(std::span<const FeatureVector> features,
                      std::span<const GestureClass> labels,
                      const ForestConfig& config) {
  const std::size_t dim = check_training_set(features, labels);
  FeatureRows rows;
  rows.reserve(features.size());
  for (const auto& f : features) rows.push_back(f.values);
  TrainedModel model;
  model.kind = ModelKind::RF;
  model.feature_kind = features.front().kind;
  model.input_dim = dim;
  model.scaler = Standardizer::identity(dim);
  RandomForest forest;
  forest.fit(rows, labels, config);
  model.forest = std::move(forest);
  return model;
}

}  // namespace tactile::learn
