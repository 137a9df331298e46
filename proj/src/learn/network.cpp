#include "tactile/learn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tactile/errors.hpp"
#include "tactile/learn/lstm.hpp"

namespace tactile::learn {

using nlohmann::json;

Network::Network(const Network& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Network::add(std::unique_ptr<Layer> layer) {
  if (!layers_.empty() && layers_.back()->output_size() != layer->input_size()) {
    throw ConfigError("layer '" + std::string(layer->type()) + "' expects " +
                      std::to_string(layer->input_size()) + " inputs but " +
                      "previous layer emits " +
                      std::to_string(layers_.back()->output_size()));
  }
  layers_.push_back(std::move(layer));
}

std::size_t Network::input_size() const {
  return layers_.empty() ? 0 : layers_.front()->input_size();
}

std::size_t Network::output_size() const {
  return layers_.empty() ? 0 : layers_.back()->output_size();
}

Vec Network::infer(std::span<const double> input) const {
  Vec x(input.begin(), input.end());
  for (const auto& l : layers_) x = l->infer(x);
  return x;
}

Vec Network::forward(std::span<const double> input) {
  Vec x(input.begin(), input.end());
  for (auto& l : layers_) x = l->forward(x);
  return x;
}

Vec Network::backward(std::span<const double> grad_output) {
  Vec g(grad_output.begin(), grad_output.end());
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = (*it)->backward(g);
  }
  return g;
}

std::vector<ParamBlock> Network::params() {
  std::vector<ParamBlock> out;
  for (auto& l : layers_) {
    for (auto& p : l->params()) out.push_back(p);
  }
  return out;
}

void Network::zero_grad() {
  for (auto& l : layers_) l->zero_grad();
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (auto& p : params()) n += p.values.size();
  return n;
}

json Network::to_json() const {
  json layers = json::array();
  for (const auto& l : layers_) layers.push_back(l->to_json());
  return {{"layers", std::move(layers)}};
}

Network Network::from_json(const json& j) {
  Network net;
  for (const auto& jl : j.at("layers")) net.add(layer_from_json(jl));
  return net;
}

Network make_mlp(std::size_t inputs, std::span<const std::size_t> hidden,
                 std::size_t outputs, Rng& rng) {
  Network net;
  std::size_t width = inputs;
  for (std::size_t h : hidden) {
    auto dense = std::make_unique<Dense>(width, h);
    dense->initialize(rng);
    net.add(std::move(dense));
    net.add(std::make_unique<Relu>(h));
    width = h;
  }
  auto head = std::make_unique<Dense>(width, outputs);
  head->initialize(rng);
  net.add(std::move(head));
  return net;
}

Network make_cnn1d(std::size_t length, std::size_t outputs, Rng& rng) {
  constexpr std::size_t kKernel = 5;
  if (length < 2 * (kKernel - 1) + 6) {
    throw ConfigError("sequence too short for the 1D CNN");
  }
  Network net;
  auto conv1 = std::make_unique<Conv1d>(length, 1, 16, kKernel);
  conv1->initialize(rng);
  std::size_t len = conv1->output_length();
  net.add(std::move(conv1));
  net.add(std::make_unique<Relu>(len * 16));
  net.add(std::make_unique<MaxPool1d>(len, 16, 2));
  len /= 2;
  auto conv2 = std::make_unique<Conv1d>(len, 16, 32, kKernel);
  conv2->initialize(rng);
  len = conv2->output_length();
  net.add(std::move(conv2));
  net.add(std::make_unique<Relu>(len * 32));
  net.add(std::make_unique<MaxPool1d>(len, 32, 2));
  len /= 2;
  auto dense = std::make_unique<Dense>(len * 32, 64);
  dense->initialize(rng);
  net.add(std::move(dense));
  net.add(std::make_unique<Relu>(64));
  auto head = std::make_unique<Dense>(64, outputs);
  head->initialize(rng);
  net.add(std::move(head));
  return net;
}

Network make_lstm_classifier(std::size_t length, std::size_t hidden,
                             std::size_t outputs, Rng& rng) {
  Network net;
  auto lstm = std::make_unique<Lstm>(length, 1, hidden);
  lstm->initialize(rng);
  net.add(std::move(lstm));
  auto head = std::make_unique<Dense>(hidden, outputs);
  head->initialize(rng);
  net.add(std::move(head));
  return net;
}

Vec softmax(std::span<const double> logits) {
  Vec p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (auto& v : p) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

LossResult softmax_cross_entropy(std::span<const double> logits,
                                 std::size_t target) {
  if (target >= logits.size()) {
    throw ConfigError("target class outside logit range");
  }
  // log-sum-exp form keeps the loss finite for large logits.
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - top);
  LossResult out;
  out.loss = std::log(sum) + top - logits[target];
  out.grad = softmax(logits);
  out.grad[target] -= 1.0;
  return out;
}

}  // namespace tactile::learn
