#include "tactile/learn/lstm.hpp"

#include <cmath>
#include <string>

#include "tactile/errors.hpp"

namespace tactile::learn {

using nlohmann::json;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Lstm::Lstm(std::size_t steps, std::size_t features, std::size_t hidden)
    : steps_(steps),
      features_(features),
      hidden_(hidden),
      input_weights_(4 * hidden * features, 0.0),
      recurrent_weights_(4 * hidden * hidden, 0.0),
      bias_(4 * hidden, 0.0),
      grad_input_weights_(input_weights_.size(), 0.0),
      grad_recurrent_weights_(recurrent_weights_.size(), 0.0),
      grad_bias_(bias_.size(), 0.0) {
  if (steps == 0 || features == 0 || hidden == 0) {
    throw ConfigError("lstm dimensions must be positive");
  }
}

void Lstm::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_));
  for (auto* block : {&input_weights_, &recurrent_weights_, &bias_}) {
    for (auto& v : *block) v = rng.uniform(-bound, bound);
  }
}

Vec Lstm::run(std::span<const double> input, Trace* trace) const {
  if (input.size() != input_size()) {
    throw ConfigError("lstm expects " + std::to_string(input_size()) +
                      " values, got " + std::to_string(input.size()));
  }
  const std::size_t H = hidden_;
  Vec h(H, 0.0), c(H, 0.0), z(4 * H);
  if (trace) {
    trace->hidden.assign((steps_ + 1) * H, 0.0);
    trace->cell.assign((steps_ + 1) * H, 0.0);
    trace->gates.assign(steps_ * 4 * H, 0.0);
  }
  for (std::size_t t = 0; t < steps_; ++t) {
    const double* x = &input[t * features_];
    for (std::size_t r = 0; r < 4 * H; ++r) {
      double acc = bias_[r];
      const double* wx = &input_weights_[r * features_];
      for (std::size_t k = 0; k < features_; ++k) acc += wx[k] * x[k];
      const double* wh = &recurrent_weights_[r * H];
      for (std::size_t k = 0; k < H; ++k) acc += wh[k] * h[k];
      z[r] = acc;
    }
    for (std::size_t j = 0; j < H; ++j) {
      const double ig = sigmoid(z[j]);
      const double fg = sigmoid(z[H + j]);
      const double gg = std::tanh(z[2 * H + j]);
      const double og = sigmoid(z[3 * H + j]);
      c[j] = fg * c[j] + ig * gg;
      h[j] = og * std::tanh(c[j]);
      if (trace) {
        double* g = &trace->gates[t * 4 * H];
        g[j] = ig;
        g[H + j] = fg;
        g[2 * H + j] = gg;
        g[3 * H + j] = og;
      }
    }
    if (trace) {
      std::copy(h.begin(), h.end(), trace->hidden.begin() + (t + 1) * H);
      std::copy(c.begin(), c.end(), trace->cell.begin() + (t + 1) * H);
    }
  }
  return h;
}

Vec Lstm::infer(std::span<const double> input) const {
  return run(input, nullptr);
}

Vec Lstm::forward(std::span<const double> input) {
  cached_input_.assign(input.begin(), input.end());
  return run(input, &trace_);
}

Vec Lstm::backward(std::span<const double> grad_output) {
  const std::size_t H = hidden_;
  if (grad_output.size() != H) {
    throw ConfigError("lstm gradient size mismatch");
  }
  Vec grad_input(input_size(), 0.0);
  Vec dh(grad_output.begin(), grad_output.end());
  Vec dc(H, 0.0), dz(4 * H), dh_prev(H);
  for (std::size_t step = steps_; step-- > 0;) {
    const double* g = &trace_.gates[step * 4 * H];
    const double* c_now = &trace_.cell[(step + 1) * H];
    const double* c_prev = &trace_.cell[step * H];
    const double* h_prev = &trace_.hidden[step * H];
    for (std::size_t j = 0; j < H; ++j) {
      const double ig = g[j], fg = g[H + j], gg = g[2 * H + j], og = g[3 * H + j];
      const double tc = std::tanh(c_now[j]);
      const double d_out = dh[j] * tc;
      dc[j] += dh[j] * og * (1.0 - tc * tc);
      dz[j] = dc[j] * gg * ig * (1.0 - ig);
      dz[H + j] = dc[j] * c_prev[j] * fg * (1.0 - fg);
      dz[2 * H + j] = dc[j] * ig * (1.0 - gg * gg);
      dz[3 * H + j] = d_out * og * (1.0 - og);
      dc[j] *= fg;
    }
    const double* x = &cached_input_[step * features_];
    double* dx = &grad_input[step * features_];
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const double d = dz[r];
      grad_bias_[r] += d;
      double* gwx = &grad_input_weights_[r * features_];
      const double* wx = &input_weights_[r * features_];
      for (std::size_t k = 0; k < features_; ++k) {
        gwx[k] += d * x[k];
        dx[k] += d * wx[k];
      }
      double* gwh = &grad_recurrent_weights_[r * H];
      const double* wh = &recurrent_weights_[r * H];
      for (std::size_t k = 0; k < H; ++k) {
        gwh[k] += d * h_prev[k];
        dh_prev[k] += d * wh[k];
      }
    }
    dh.swap(dh_prev);
  }
  return grad_input;
}

std::vector<ParamBlock> Lstm::params() {
  return {{input_weights_, grad_input_weights_},
          {recurrent_weights_, grad_recurrent_weights_},
          {bias_, grad_bias_}};
}

json Lstm::to_json() const {
  return {{"type", "lstm"},
          {"steps", steps_},
          {"features", features_},
          {"hidden", hidden_},
          {"input_weights", input_weights_},
          {"recurrent_weights", recurrent_weights_},
          {"bias", bias_}};
}

std::unique_ptr<Layer> Lstm::clone() const {
  auto copy = std::make_unique<Lstm>(*this);
  copy->cached_input_.clear();
  copy->trace_ = {};
  return copy;
}

std::unique_ptr<Lstm> Lstm::from_json(const json& j) {
  auto layer = std::make_unique<Lstm>(j.at("steps").get<std::size_t>(),
                                      j.at("features").get<std::size_t>(),
                                      j.at("hidden").get<std::size_t>());
  auto load = [&](const char* key, Vec& dst) {
    auto v = j.at(key).get<Vec>();
    if (v.size() != dst.size()) {
      throw ConfigError(std::string("lstm ") + key + " has wrong size");
    }
    dst = std::move(v);
  };
  load("input_weights", layer->input_weights_);
  load("recurrent_weights", layer->recurrent_weights_);
  load("bias", layer->bias_);
  return layer;
}

}  // namespace tactile::learn
