#include "tactile/learn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tactile/errors.hpp"
#include "tactile/learn/lstm.hpp"

namespace tactile::learn {

using nlohmann::json;

namespace {

void check_size(std::string_view layer, std::size_t got, std::size_t want) {
  if (got != want) {
    throw ConfigError(std::string(layer) + " expects " + std::to_string(want) +
                      " values, got " + std::to_string(got));
  }
}

void fill_uniform(Vec& values, double bound, Rng& rng) {
  for (auto& v : values) v = rng.uniform(-bound, bound);
}

Vec read_vector(const json& j, std::string_view key, std::size_t expected) {
  auto v = j.at(std::string(key)).get<Vec>();
  check_size(key, v.size(), expected);
  return v;
}

}  // namespace

void Layer::zero_grad() {
  for (auto& block : params()) {
    std::fill(block.grads.begin(), block.grads.end(), 0.0);
  }
}

std::unique_ptr<Layer> layer_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "dense") return Dense::from_json(j);
  if (type == "relu") return std::make_unique<Relu>(j.at("size").get<std::size_t>());
  if (type == "conv1d") return Conv1d::from_json(j);
  if (type == "maxpool1d") {
    return std::make_unique<MaxPool1d>(j.at("length").get<std::size_t>(),
                                       j.at("channels").get<std::size_t>(),
                                       j.at("pool").get<std::size_t>());
  }
  if (type == "lstm") return Lstm::from_json(j);
  throw ConfigError("unknown layer type '" + type + "'");
}

// ---- Dense ----

Dense::Dense(std::size_t inputs, std::size_t outputs)
    : inputs_(inputs),
      outputs_(outputs),
      weights_(inputs * outputs, 0.0),
      bias_(outputs, 0.0),
      grad_weights_(inputs * outputs, 0.0),
      grad_bias_(outputs, 0.0) {
  if (inputs == 0 || outputs == 0) {
    throw ConfigError("dense layer dimensions must be positive");
  }
}

void Dense::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(inputs_));
  fill_uniform(weights_, bound, rng);
  fill_uniform(bias_, bound, rng);
}

Vec Dense::infer(std::span<const double> input) const {
  check_size("dense", input.size(), inputs_);
  Vec out(bias_);
  for (std::size_t o = 0; o < outputs_; ++o) {
    const double* w = &weights_[o * inputs_];
    double acc = 0.0;
    for (std::size_t i = 0; i < inputs_; ++i) acc += w[i] * input[i];
    out[o] += acc;
  }
  return out;
}

Vec Dense::forward(std::span<const double> input) {
  cached_input_.assign(input.begin(), input.end());
  return infer(input);
}

Vec Dense::backward(std::span<const double> grad_output) {
  check_size("dense gradient", grad_output.size(), outputs_);
  Vec grad_input(inputs_, 0.0);
  for (std::size_t o = 0; o < outputs_; ++o) {
    const double g = grad_output[o];
    grad_bias_[o] += g;
    if (g == 0.0) continue;
    double* gw = &grad_weights_[o * inputs_];
    const double* w = &weights_[o * inputs_];
    for (std::size_t i = 0; i < inputs_; ++i) {
      gw[i] += g * cached_input_[i];
      grad_input[i] += g * w[i];
    }
  }
  return grad_input;
}

std::vector<ParamBlock> Dense::params() {
  return {{weights_, grad_weights_}, {bias_, grad_bias_}};
}

json Dense::to_json() const {
  return {{"type", "dense"},
          {"inputs", inputs_},
          {"outputs", outputs_},
          {"weights", weights_},
          {"bias", bias_}};
}

std::unique_ptr<Layer> Dense::clone() const {
  auto copy = std::make_unique<Dense>(*this);
  copy->cached_input_.clear();
  return copy;
}

std::unique_ptr<Dense> Dense::from_json(const json& j) {
  auto layer = std::make_unique<Dense>(j.at("inputs").get<std::size_t>(),
                                       j.at("outputs").get<std::size_t>());
  layer->weights_ = read_vector(j, "weights", layer->weights_.size());
  layer->bias_ = read_vector(j, "bias", layer->bias_.size());
  return layer;
}

// ---- Relu ----

Vec Relu::infer(std::span<const double> input) const {
  check_size("relu", input.size(), size_);
  Vec out(input.begin(), input.end());
  for (auto& v : out) v = v > 0.0 ? v : 0.0;
  return out;
}

Vec Relu::forward(std::span<const double> input) {
  cached_input_.assign(input.begin(), input.end());
  return infer(input);
}

Vec Relu::backward(std::span<const double> grad_output) {
  check_size("relu gradient", grad_output.size(), size_);
  Vec grad(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    grad[i] = cached_input_[i] > 0.0 ? grad_output[i] : 0.0;
  }
  return grad;
}

json Relu::to_json() const { return {{"type", "relu"}, {"size", size_}}; }

std::unique_ptr<Layer> Relu::clone() const {
  return std::make_unique<Relu>(size_);
}

// ---- Conv1d ----

Conv1d::Conv1d(std::size_t length, std::size_t in_channels,
               std::size_t out_channels, std::size_t kernel)
    : length_(length),
      in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      weights_(out_channels * kernel * in_channels, 0.0),
      bias_(out_channels, 0.0),
      grad_weights_(weights_.size(), 0.0),
      grad_bias_(out_channels, 0.0) {
  if (kernel == 0 || kernel > length || in_channels == 0 || out_channels == 0) {
    throw ConfigError("invalid conv1d geometry");
  }
}

void Conv1d::initialize(Rng& rng) {
  const double bound =
      1.0 / std::sqrt(static_cast<double>(in_channels_ * kernel_));
  fill_uniform(weights_, bound, rng);
  fill_uniform(bias_, bound, rng);
}

Vec Conv1d::infer(std::span<const double> input) const {
  check_size("conv1d", input.size(), input_size());
  const std::size_t out_len = output_length();
  Vec out(out_len * out_channels_);
  const std::size_t patch = kernel_ * in_channels_;
  for (std::size_t t = 0; t < out_len; ++t) {
    // The receptive field of output t is the contiguous block starting at
    // t * in_channels, laid out (tap, channel) like the weights.
    const double* x = &input[t * in_channels_];
    for (std::size_t o = 0; o < out_channels_; ++o) {
      const double* w = &weights_[o * patch];
      double acc = bias_[o];
      for (std::size_t p = 0; p < patch; ++p) acc += w[p] * x[p];
      out[t * out_channels_ + o] = acc;
    }
  }
  return out;
}

Vec Conv1d::forward(std::span<const double> input) {
  cached_input_.assign(input.begin(), input.end());
  return infer(input);
}

Vec Conv1d::backward(std::span<const double> grad_output) {
  check_size("conv1d gradient", grad_output.size(), output_size());
  const std::size_t out_len = output_length();
  const std::size_t patch = kernel_ * in_channels_;
  Vec grad_input(input_size(), 0.0);
  for (std::size_t t = 0; t < out_len; ++t) {
    const double* x = &cached_input_[t * in_channels_];
    double* gx = &grad_input[t * in_channels_];
    for (std::size_t o = 0; o < out_channels_; ++o) {
      const double g = grad_output[t * out_channels_ + o];
      grad_bias_[o] += g;
      if (g == 0.0) continue;
      const double* w = &weights_[o * patch];
      double* gw = &grad_weights_[o * patch];
      for (std::size_t p = 0; p < patch; ++p) {
        gw[p] += g * x[p];
        gx[p] += g * w[p];
      }
    }
  }
  return grad_input;
}

std::vector<ParamBlock> Conv1d::params() {
  return {{weights_, grad_weights_}, {bias_, grad_bias_}};
}

json Conv1d::to_json() const {
  return {{"type", "conv1d"},       {"length", length_},
          {"in_channels", in_channels_}, {"out_channels", out_channels_},
          {"kernel", kernel_},      {"weights", weights_},
          {"bias", bias_}};
}

std::unique_ptr<Layer> Conv1d::clone() const {
  auto copy = std::make_unique<Conv1d>(*this);
  copy->cached_input_.clear();
  return copy;
}

std::unique_ptr<Conv1d> Conv1d::from_json(const json& j) {
  auto layer = std::make_unique<Conv1d>(
      j.at("length").get<std::size_t>(), j.at("in_channels").get<std::size_t>(),
      j.at("out_channels").get<std::size_t>(), j.at("kernel").get<std::size_t>());
  layer->weights_ = read_vector(j, "weights", layer->weights_.size());
  layer->bias_ = read_vector(j, "bias", layer->bias_.size());
  return layer;
}

// ---- MaxPool1d ----

MaxPool1d::MaxPool1d(std::size_t length, std::size_t channels, std::size_t pool)
    : length_(length), channels_(channels), pool_(pool) {
  if (pool == 0 || pool > length || channels == 0) {
    throw ConfigError("invalid maxpool1d geometry");
  }
}

Vec MaxPool1d::pool(std::span<const double> input,
                    std::vector<std::size_t>* argmax) const {
  check_size("maxpool1d", input.size(), input_size());
  const std::size_t out_len = length_ / pool_;
  Vec out(out_len * channels_);
  if (argmax) argmax->assign(out.size(), 0);
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t c = 0; c < channels_; ++c) {
      std::size_t best = (t * pool_) * channels_ + c;
      for (std::size_t k = 1; k < pool_; ++k) {
        const std::size_t idx = (t * pool_ + k) * channels_ + c;
        if (input[idx] > input[best]) best = idx;
      }
      out[t * channels_ + c] = input[best];
      if (argmax) (*argmax)[t * channels_ + c] = best;
    }
  }
  return out;
}

Vec MaxPool1d::infer(std::span<const double> input) const {
  return pool(input, nullptr);
}

Vec MaxPool1d::forward(std::span<const double> input) {
  return pool(input, &cached_argmax_);
}

Vec MaxPool1d::backward(std::span<const double> grad_output) {
  check_size("maxpool1d gradient", grad_output.size(), output_size());
  Vec grad(input_size(), 0.0);
  for (std::size_t i = 0; i < grad_output.size(); ++i) {
    grad[cached_argmax_[i]] += grad_output[i];
  }
  return grad;
}

json MaxPool1d::to_json() const {
  return {{"type", "maxpool1d"},
          {"length", length_},
          {"channels", channels_},
          {"pool", pool_}};
}

std::unique_ptr<Layer> MaxPool1d::clone() const {
  return std::make_unique<MaxPool1d>(length_, channels_, pool_);
}

}  // namespace tactile::learn
