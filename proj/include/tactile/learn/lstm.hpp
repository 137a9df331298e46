#pragma once

#include "tactile/learn/layers.hpp"

namespace tactile::learn {

/// Single-layer LSTM over a flat (steps x features) sequence. The output is
/// the hidden state after the last step. Gate order in every parameter
/// block is input, forget, cell candidate, output.
class Lstm final : public Layer {
 public:
  Lstm(std::size_t steps, std::size_t features, std::size_t hidden);

  /// Uniform in +-1/sqrt(hidden) for all parameters.
  void initialize(Rng& rng);

  std::string_view type() const override { return "lstm"; }
  std::size_t input_size() const override { return steps_ * features_; }
  std::size_t output_size() const override { return hidden_; }

  Vec infer(std::span<const double> input) const override;
  Vec forward(std::span<const double> input) override;
  Vec backward(std::span<const double> grad_output) override;
  std::vector<ParamBlock> params() override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Layer> clone() const override;

  static std::unique_ptr<Lstm> from_json(const nlohmann::json& j);

 private:
  struct Trace {
    Vec hidden;  // (steps + 1) x hidden, row 0 is the initial zero state
    Vec cell;    // (steps + 1) x hidden
    Vec gates;   // steps x 4 hidden, post-activation
  };

  Vec run(std::span<const double> input, Trace* trace) const;

  std::size_t steps_, features_, hidden_;
  Vec input_weights_;      // 4H x features
  Vec recurrent_weights_;  // 4H x H
  Vec bias_;               // 4H
  Vec grad_input_weights_, grad_recurrent_weights_, grad_bias_;
  Vec cached_input_;
  Trace trace_;
};

}  // namespace tactile::learn
