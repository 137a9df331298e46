#pragma once

// Differentiable building blocks. Layers process one sample at a time:
// `forward` caches what `backward` needs and `backward` accumulates
// parameter gradients until `zero_grad`. `infer` is the cache-free,
// const path used for prediction.
//
// Sequences and feature maps are stored flat and channel-last:
// element (t, c) of a length-L, C-channel signal lives at t * C + c.

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tactile/random.hpp"

namespace tactile::learn {

using Vec = std::vector<double>;

struct ParamBlock {
  std::span<double> values;
  std::span<double> grads;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string_view type() const = 0;
  virtual std::size_t input_size() const = 0;
  virtual std::size_t output_size() const = 0;

  virtual Vec infer(std::span<const double> input) const = 0;
  virtual Vec forward(std::span<const double> input) = 0;
  /// Returns d(loss)/d(input) for the most recent forward call.
  virtual Vec backward(std::span<const double> grad_output) = 0;

  virtual std::vector<ParamBlock> params() { return {}; }
  void zero_grad();

  virtual nlohmann::json to_json() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;
};

std::unique_ptr<Layer> layer_from_json(const nlohmann::json& j);

/// Fully connected layer, weights stored out x in, row-major.
class Dense final : public Layer {
 public:
  Dense(std::size_t inputs, std::size_t outputs);

  /// Uniform in +-1/sqrt(inputs) for weights and bias.
  void initialize(Rng& rng);

  std::string_view type() const override { return "dense"; }
  std::size_t input_size() const override { return inputs_; }
  std::size_t output_size() const override { return outputs_; }
  Vec infer(std::span<const double> input) const override;
  Vec forward(std::span<const double> input) override;
  Vec backward(std::span<const double> grad_output) override;
  std::vector<ParamBlock> params() override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Layer> clone() const override;

  std::span<double> weights() { return weights_; }
  std::span<double> bias() { return bias_; }

  static std::unique_ptr<Dense> from_json(const nlohmann::json& j);

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  Vec weights_, bias_;
  Vec grad_weights_, grad_bias_;
  Vec cached_input_;
};

class Relu final : public Layer {
 public:
  explicit Relu(std::size_t size) : size_(size) {}

  std::string_view type() const override { return "relu"; }
  std::size_t input_size() const override { return size_; }
  std::size_t output_size() const override { return size_; }
  Vec infer(std::span<const double> input) const override;
  Vec forward(std::span<const double> input) override;
  Vec backward(std::span<const double> grad_output) override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Layer> clone() const override;

 private:
  std::size_t size_;
  Vec cached_input_;
};

/// Valid (unpadded) 1-D convolution with stride 1.
/// Output length is length - kernel + 1.
class Conv1d final : public Layer {
 public:
  Conv1d(std::size_t length, std::size_t in_channels, std::size_t out_channels,
         std::size_t kernel);

  void initialize(Rng& rng);

  std::string_view type() const override { return "conv1d"; }
  std::size_t input_size() const override { return length_ * in_channels_; }
  std::size_t output_size() const override {
    return output_length() * out_channels_;
  }
  std::size_t output_length() const { return length_ - kernel_ + 1; }

  Vec infer(std::span<const double> input) const override;
  Vec forward(std::span<const double> input) override;
  Vec backward(std::span<const double> grad_output) override;
  std::vector<ParamBlock> params() override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Layer> clone() const override;

  /// Weight of (output channel, tap, input channel).
  double& weight(std::size_t out_ch, std::size_t tap, std::size_t in_ch) {
    return weights_[(out_ch * kernel_ + tap) * in_channels_ + in_ch];
  }
  std::span<double> bias() { return bias_; }

  static std::unique_ptr<Conv1d> from_json(const nlohmann::json& j);

 private:
  std::size_t length_, in_channels_, out_channels_, kernel_;
  Vec weights_, bias_;
  Vec grad_weights_, grad_bias_;
  Vec cached_input_;
};

/// Non-overlapping max pooling per channel. Output length is
/// floor(length / pool); a trailing remainder is discarded. Ties pick the
/// earliest position.
class MaxPool1d final : public Layer {
 public:
  MaxPool1d(std::size_t length, std::size_t channels, std::size_t pool);

  std::string_view type() const override { return "maxpool1d"; }
  std::size_t input_size() const override { return length_ * channels_; }
  std::size_t output_size() const override {
    return (length_ / pool_) * channels_;
  }
  Vec infer(std::span<const double> input) const override;
  Vec forward(std::span<const double> input) override;
  Vec backward(std::span<const double> grad_output) override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Layer> clone() const override;

 private:
  Vec pool(std::span<const double> input,
           std::vector<std::size_t>* argmax) const;

  std::size_t length_, channels_, pool_;
  std::vector<std::size_t> cached_argmax_;
};

}  // namespace tactile::learn
