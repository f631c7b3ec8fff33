#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embedclust/linalg.hpp"
#include "embedclust/rng.hpp"

namespace embedclust {

enum class Activation { linear, relu, sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct LayerSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  Activation activation = Activation::linear;
  double l2_coefficient = 0.0;
};

// Fully connected stack; weights[i] is output_dim x input_dim.
struct Network {
  std::vector<LayerSpec> layers;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t input_dim() const { return layers.front().input_dim; }
  std::size_t output_dim() const { return layers.back().output_dim; }
  std::size_t parameter_count() const;
};

// Shapes mirror the owning network.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const Network& net);
  void add(const Gradients& other);
  void scale(double factor);
};

// Everything backward needs: the layer inputs and both sides of each
// activation. post.back() is the network output.
struct ForwardTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;

  const std::vector<double>& output() const { return post.back(); }
};

// Glorot-uniform weights, zero biases. Specs must chain:
// layer i output_dim == layer i+1 input_dim.
Network init(const std::vector<LayerSpec>& specs, Rng& rng);

ForwardTrace forward(const Network& net, std::span<const double> x);

// Gradients of the loss whose output cotangent is dl_dz, plus (when
// include_l2 is set) the 2*lambda*w term of each regularized layer.
// Biases are never regularized.
Gradients backward(const Network& net, const ForwardTrace& trace,
                   std::span<const double> dl_dz, bool include_l2 = true);

// Adds 2*lambda*w to existing gradients; used when the penalty must enter
// once per update rather than once per backward call.
void add_l2_gradients(const Network& net, Gradients& grads);

// Sum over layers of lambda * sum(w^2).
double l2_penalty(const Network& net);

// JSON document {layers, weights, biases}; load(save(net)) is bit-exact.
std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace embedclust
