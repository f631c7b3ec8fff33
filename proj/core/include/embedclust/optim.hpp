#pragma once

#include "embedclust/network.hpp"

namespace embedclust {

struct RmspropConfig {
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-8;
};

// Per-parameter squared-gradient moving averages; shapes mirror the network.
struct RmspropState {
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-8;
  std::vector<Matrix> weight_acc;
  std::vector<std::vector<double>> bias_acc;

  static RmspropState create(const RmspropConfig& cfg, const Network& net);
};

// One update: acc <- rho*acc + (1-rho)*g^2, w <- w - lr*g/(sqrt(acc)+eps),
// applied in place to every weight and bias.
void step(RmspropState& state, Network& params, const Gradients& grads);

}  // namespace embedclust
