#include "embedclust/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "embedclust/error.hpp"

namespace embedclust {

namespace {

using nlohmann::json;

void check_chain(const std::vector<LayerSpec>& specs) {
  if (specs.empty()) {
    throw ValidationError("network: at least one layer required");
  }
  for (const LayerSpec& spec : specs) {
    if (spec.input_dim == 0 || spec.output_dim == 0) {
      throw ValidationError("network: layer dimensions must be positive");
    }
    if (spec.l2_coefficient < 0.0) {
      throw ValidationError("network: l2 coefficient must be nonnegative");
    }
  }
  for (std::size_t i = 0; i + 1 < specs.size(); ++i) {
    if (specs[i].output_dim != specs[i + 1].input_dim) {
      throw ValidationError(
          "network: layer " + std::to_string(i) + " outputs " +
          std::to_string(specs[i].output_dim) + " but layer " +
          std::to_string(i + 1) + " expects " +
          std::to_string(specs[i + 1].input_dim));
    }
  }
}

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::linear:
      return x;
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

// Derivative in terms of pre-activation and the already-computed output.
double activation_derivative(Activation a, double pre, double post) {
  switch (a) {
    case Activation::linear:
      return 1.0;
    case Activation::relu:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid:
      return post * (1.0 - post);
  }
  return 1.0;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::linear:
      return "linear";
    case Activation::relu:
      return "relu";
    case Activation::sigmoid:
      return "sigmoid";
  }
  return "linear";
}

Activation activation_from_string(const std::string& name) {
  if (name == "linear") return Activation::linear;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ValidationError("unknown activation: '" + name + "'");
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    n += weights[i].data.size() + biases[i].size();
  }
  return n;
}

Gradients Gradients::zeros_like(const Network& net) {
  Gradients g;
  g.weights.reserve(net.layers.size());
  g.biases.reserve(net.layers.size());
  for (const LayerSpec& spec : net.layers) {
    g.weights.emplace_back(spec.output_dim, spec.input_dim);
    g.biases.emplace_back(spec.output_dim, 0.0);
  }
  return g;
}

void Gradients::add(const Gradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].data.size(); ++i) {
      weights[l].data[i] += other.weights[l].data[i];
    }
    for (std::size_t i = 0; i < biases[l].size(); ++i) {
      biases[l][i] += other.biases[l][i];
    }
  }
}

void Gradients::scale(double factor) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double& w : weights[l].data) {
      w *= factor;
    }
    for (double& b : biases[l]) {
      b *= factor;
    }
  }
}

Network init(const std::vector<LayerSpec>& specs, Rng& rng) {
  check_chain(specs);
  Network net;
  net.layers = specs;
  for (const LayerSpec& spec : specs) {
    Matrix w(spec.output_dim, spec.input_dim);
    const double a =
        std::sqrt(6.0 / static_cast<double>(spec.input_dim + spec.output_dim));
    for (double& value : w.data) {
      value = rng.uniform(-a, a);
    }
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(spec.output_dim, 0.0);
  }
  return net;
}

ForwardTrace forward(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw ShapeError("forward: input length " + std::to_string(x.size()) +
                     ", network expects " + std::to_string(net.input_dim()));
  }
  ForwardTrace trace;
  trace.input.assign(x.begin(), x.end());
  trace.pre.reserve(net.layers.size());
  trace.post.reserve(net.layers.size());

  const std::vector<double>* current = &trace.input;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const LayerSpec& spec = net.layers[l];
    const Matrix& w = net.weights[l];
    std::vector<double> pre(spec.output_dim);
    for (std::size_t i = 0; i < spec.output_dim; ++i) {
      double acc = net.biases[l][i];
      const double* wrow = w.data.data() + i * spec.input_dim;
      for (std::size_t j = 0; j < spec.input_dim; ++j) {
        acc += wrow[j] * (*current)[j];
      }
      pre[i] = acc;
    }
    std::vector<double> post(spec.output_dim);
    for (std::size_t i = 0; i < spec.output_dim; ++i) {
      post[i] = apply_activation(spec.activation, pre[i]);
    }
    trace.pre.push_back(std::move(pre));
    trace.post.push_back(std::move(post));
    current = &trace.post.back();
  }
  return trace;
}

Gradients backward(const Network& net, const ForwardTrace& trace,
                   std::span<const double> dl_dz, bool include_l2) {
  if (trace.pre.size() != net.layers.size() ||
      trace.input.size() != net.input_dim()) {
    throw ValidationError("backward: trace does not match network");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (trace.pre[l].size() != net.layers[l].output_dim) {
      throw ValidationError("backward: trace does not match network at layer " +
                            std::to_string(l));
    }
  }
  if (dl_dz.size() != net.output_dim()) {
    throw ShapeError("backward: cotangent length " +
                     std::to_string(dl_dz.size()) + ", network outputs " +
                     std::to_string(net.output_dim()));
  }

  Gradients grads = Gradients::zeros_like(net);
  std::vector<double> delta(dl_dz.begin(), dl_dz.end());

  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const LayerSpec& spec = net.layers[li];
    const Matrix& w = net.weights[li];
    const std::vector<double>& input =
        (li == 0) ? trace.input : trace.post[li - 1];

    // delta through the activation.
    for (std::size_t i = 0; i < spec.output_dim; ++i) {
      delta[i] *= activation_derivative(spec.activation, trace.pre[li][i],
                                        trace.post[li][i]);
    }

    Matrix& gw = grads.weights[li];
    for (std::size_t i = 0; i < spec.output_dim; ++i) {
      double* grow = gw.data.data() + i * spec.input_dim;
      for (std::size_t j = 0; j < spec.input_dim; ++j) {
        grow[j] = delta[i] * input[j];
      }
      grads.biases[li][i] = delta[i];
    }

    if (li > 0) {
      std::vector<double> next(spec.input_dim, 0.0);
      for (std::size_t i = 0; i < spec.output_dim; ++i) {
        const double* wrow = w.data.data() + i * spec.input_dim;
        for (std::size_t j = 0; j < spec.input_dim; ++j) {
          next[j] += wrow[j] * delta[i];
        }
      }
      delta = std::move(next);
    }
  }

  if (include_l2) {
    add_l2_gradients(net, grads);
  }
  return grads;
}

void add_l2_gradients(const Network& net, Gradients& grads) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const double lambda = net.layers[l].l2_coefficient;
    if (lambda == 0.0) {
      continue;
    }
    for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
      grads.weights[l].data[i] += 2.0 * lambda * net.weights[l].data[i];
    }
  }
}

double l2_penalty(const Network& net) {
  double acc = 0.0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const double lambda = net.layers[l].l2_coefficient;
    if (lambda == 0.0) {
      continue;
    }
    double sq = 0.0;
    for (double w : net.weights[l].data) {
      sq += w * w;
    }
    acc += lambda * sq;
  }
  return acc;
}

std::string network_to_json(const Network& net) {
  json doc;
  doc["layers"] = json::array();
  doc["weights"] = json::array();
  doc["biases"] = json::array();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const LayerSpec& spec = net.layers[l];
    doc["layers"].push_back({{"in", spec.input_dim},
                             {"out", spec.output_dim},
                             {"activation", to_string(spec.activation)},
                             {"l2", spec.l2_coefficient}});
    json rows = json::array();
    for (std::size_t i = 0; i < spec.output_dim; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < spec.input_dim; ++j) {
        row.push_back(net.weights[l](i, j));
      }
      rows.push_back(std::move(row));
    }
    doc["weights"].push_back(std::move(rows));
    doc["biases"].push_back(net.biases[l]);
  }
  return doc.dump(2);
}

Network network_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
  try {
    Network net;
    for (const json& layer : doc.at("layers")) {
      LayerSpec spec;
      spec.input_dim = layer.at("in").get<std::size_t>();
      spec.output_dim = layer.at("out").get<std::size_t>();
      spec.activation =
          activation_from_string(layer.at("activation").get<std::string>());
      spec.l2_coefficient = layer.at("l2").get<double>();
      net.layers.push_back(spec);
    }
    check_chain(net.layers);
    const json& weights = doc.at("weights");
    const json& biases = doc.at("biases");
    if (weights.size() != net.layers.size() ||
        biases.size() != net.layers.size()) {
      throw ValidationError("network json: layer count mismatch");
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      const LayerSpec& spec = net.layers[l];
      Matrix w(spec.output_dim, spec.input_dim);
      if (weights[l].size() != spec.output_dim) {
        throw ValidationError("network json: weight shape mismatch at layer " +
                              std::to_string(l));
      }
      for (std::size_t i = 0; i < spec.output_dim; ++i) {
        const json& row = weights[l][i];
        if (row.size() != spec.input_dim) {
          throw ValidationError(
              "network json: weight shape mismatch at layer " +
              std::to_string(l));
        }
        for (std::size_t j = 0; j < spec.input_dim; ++j) {
          w(i, j) = row[j].get<double>();
        }
      }
      net.weights.push_back(std::move(w));
      std::vector<double> b = biases[l].get<std::vector<double>>();
      if (b.size() != spec.output_dim) {
        throw ValidationError("network json: bias length mismatch at layer " +
                              std::to_string(l));
      }
      net.biases.push_back(std::move(b));
    }
    return net;
  } catch (const json::exception& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write network file: " + path);
  }
  out << network_to_json(net) << '\n';
  if (!out) {
    throw IoError("failed writing network file: " + path);
  }
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open network file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return network_from_json(buffer.str());
}

}  // namespace embedclust
