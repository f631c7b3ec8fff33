#include "embedclust/optim.hpp"

#include <cmath>

#include "embedclust/error.hpp"

namespace embedclust {

RmspropState RmspropState::create(const RmspropConfig& cfg,
                                  const Network& net) {
  if (cfg.learning_rate <= 0.0) {
    throw ValidationError("rmsprop: learning_rate must be positive");
  }
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) {
    throw ValidationError("rmsprop: rho must be in (0,1)");
  }
  if (cfg.epsilon <= 0.0) {
    throw ValidationError("rmsprop: epsilon must be positive");
  }
  RmspropState state;
  state.learning_rate = cfg.learning_rate;
  state.rho = cfg.rho;
  state.epsilon = cfg.epsilon;
  for (const LayerSpec& spec : net.layers) {
    state.weight_acc.emplace_back(spec.output_dim, spec.input_dim);
    state.bias_acc.emplace_back(spec.output_dim, 0.0);
  }
  return state;
}

void step(RmspropState& state, Network& params, const Gradients& grads) {
  if (state.weight_acc.size() != params.layers.size() ||
      grads.weights.size() != params.layers.size()) {
    throw ValidationError("rmsprop step: layer count mismatch");
  }

  auto update = [&](double& acc, double& w, double g, std::size_t layer) {
    if (!std::isfinite(g)) {
      throw NumericError("rmsprop step: non-finite gradient in layer " +
                         std::to_string(layer));
    }
    acc = state.rho * acc + (1.0 - state.rho) * g * g;
    w -= state.learning_rate * g / (std::sqrt(acc) + state.epsilon);
  };

  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Matrix& w = params.weights[l];
    Matrix& acc = state.weight_acc[l];
    const Matrix& g = grads.weights[l];
    if (w.rows != g.rows || w.cols != g.cols || acc.rows != w.rows ||
        acc.cols != w.cols) {
      throw ValidationError("rmsprop step: shape mismatch in layer " +
                            std::to_string(l));
    }
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      update(acc.data[i], w.data[i], g.data[i], l);
    }

    std::vector<double>& b = params.biases[l];
    std::vector<double>& bacc = state.bias_acc[l];
    const std::vector<double>& bg = grads.biases[l];
    if (b.size() != bg.size() || bacc.size() != b.size()) {
      throw ValidationError("rmsprop step: bias shape mismatch in layer " +
                            std::to_string(l));
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      update(bacc[i], b[i], bg[i], l);
    }
  }
}

}  // namespace embedclust
