#pragma once

#include <memory>
#include <span>
#include <vector>

#include "tactile/learn/layers.hpp"

namespace tactile::learn {

/// Ordered stack of layers producing class logits.
class Network {
 public:
  Network() = default;
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  /// Throws ConfigError when the layer's input does not match the previous
  /// layer's output.
  void add(std::unique_ptr<Layer> layer);

  std::size_t input_size() const;
  std::size_t output_size() const;

  Vec infer(std::span<const double> input) const;
  Vec forward(std::span<const double> input);
  Vec backward(std::span<const double> grad_output);

  std::vector<ParamBlock> params();
  void zero_grad();
  std::size_t parameter_count();

  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

  nlohmann::json to_json() const;
  static Network from_json(const nlohmann::json& j);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// Dense stack: input -> hidden... (ReLU after each) -> outputs.
Network make_mlp(std::size_t inputs, std::span<const std::size_t> hidden,
                 std::size_t outputs, Rng& rng);

/// conv(k5, 16) ReLU pool2 conv(k5, 32) ReLU pool2 dense 64 ReLU dense out.
Network make_cnn1d(std::size_t length, std::size_t outputs, Rng& rng);

/// LSTM(hidden) over a 1-channel sequence, final state -> dense out.
Network make_lstm_classifier(std::size_t length, std::size_t hidden,
                             std::size_t outputs, Rng& rng);

Vec softmax(std::span<const double> logits);

struct LossResult {
  double loss = 0.0;
  Vec grad;  // d(loss)/d(logits) = softmax - onehot
};

LossResult softmax_cross_entropy(std::span<const double> logits,
                                 std::size_t target);

}  // namespace tactile::learn
