#include "tactile/learn/gradient_check.hpp"

#include <algorithm>
#include <cmath>

namespace tactile::learn {

namespace {

constexpr double kScaleFloor = 1e-6;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Shared driver: `loss` evaluates the scalar loss for the current parameter
// values and the given input; the analytic gradients must already be in
// the parameter grad buffers and in `grad_input`.
template <class LossFn>
double compare(std::vector<ParamBlock>& params, Vec input,
               const Vec& grad_input, double epsilon, LossFn loss) {
  double worst = 0.0;
  for (auto& block : params) {
    for (std::size_t i = 0; i < block.values.size(); ++i) {
      const double saved = block.values[i];
      block.values[i] = saved + epsilon;
      const double up = loss(input);
      block.values[i] = saved - epsilon;
      const double down = loss(input);
      block.values[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      worst = std::max(worst, relative_error(block.grads[i], numeric));
    }
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double saved = input[i];
    input[i] = saved + epsilon;
    const double up = loss(input);
    input[i] = saved - epsilon;
    const double down = loss(input);
    input[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    worst = std::max(worst, relative_error(grad_input[i], numeric));
  }
  return worst;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), kScaleFloor});
  return std::abs(analytic - numeric) / scale;
}

double gradient_check(Layer& layer, std::span<const double> input,
                      std::uint64_t seed, double epsilon) {
  Rng rng(seed);
  Vec weights(layer.output_size());
  for (auto& w : weights) w = rng.uniform(-1.0, 1.0);

  layer.zero_grad();
  layer.forward(input);
  const Vec grad_input = layer.backward(weights);
  auto params = layer.params();
  return compare(params, Vec(input.begin(), input.end()), grad_input, epsilon,
                 [&](const Vec& x) { return dot(weights, layer.infer(x)); });
}

double gradient_check(Network& network, std::span<const double> input,
                      std::size_t target, double epsilon) {
  network.zero_grad();
  const auto logits = network.forward(input);
  const auto loss = softmax_cross_entropy(logits, target);
  const Vec grad_input = network.backward(loss.grad);
  auto params = network.params();
  return compare(params, Vec(input.begin(), input.end()), grad_input, epsilon,
                 [&](const Vec& x) {
                   return softmax_cross_entropy(network.infer(x), target).loss;
                 });
}

double gradient_check_softmax_ce(std::span<const double> logits,
                                 std::size_t target, double epsilon) {
  const auto analytic = softmax_cross_entropy(logits, target).grad;
  std::vector<ParamBlock> none;
  return compare(none, Vec(logits.begin(), logits.end()), analytic, epsilon,
                 [&](const Vec& z) {
                   return softmax_cross_entropy(z, target).loss;
                 });
}

}  // namespace tactile::learn
