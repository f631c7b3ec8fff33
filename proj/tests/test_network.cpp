#include <doctest.h>

#include <cmath>
#include <vector>

#include "embedclust/error.hpp"
#include "embedclust/linalg.hpp"
#include "embedclust/network.hpp"
#include "embedclust/rng.hpp"

using namespace embedclust;

namespace {

Network single_layer(std::size_t in, std::size_t out, Activation act,
                     double l2 = 0.0) {
  Network net;
  net.layers = {{in, out, act, l2}};
  net.weights = {Matrix(out, in)};
  net.biases = {std::vector<double>(out, 0.0)};
  return net;
}

std::vector<double> random_vector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) {
    x = rng.uniform(-1.0, 1.0);
  }
  return v;
}

// Scalar probe loss: fixed cotangent dotted with the network output, plus the
// L2 penalty. Its exact parameter gradient is what backward(include_l2=true)
// returns for that cotangent.
double probe_loss(const Network& net, const std::vector<double>& x,
                  const std::vector<double>& cotangent) {
  const ForwardTrace trace = forward(net, x);
  return dot(trace.output(), cotangent) + l2_penalty(net);
}

double fd_vs_analytic(Network net, const std::vector<double>& x,
                      const std::vector<double>& cotangent, double h) {
  const ForwardTrace trace = forward(net, x);
  const Gradients analytic = backward(net, trace, cotangent, true);

  double worst = 0.0;
  auto compare = [&](double analytic_g, double& param) {
    const double keep = param;
    param = keep + h;
    const double up = probe_loss(net, x, cotangent);
    param = keep - h;
    const double down = probe_loss(net, x, cotangent);
    param = keep;
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max({1e-6, std::abs(fd), std::abs(analytic_g)});
    worst = std::max(worst, std::abs(fd - analytic_g) / scale);
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
      compare(analytic.weights[l].data[i], net.weights[l].data[i]);
    }
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
      compare(analytic.biases[l][i], net.biases[l][i]);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("init: shapes, zero biases, Glorot range") {
  Rng rng(1);
  const Network net = init({{4, 2, Activation::linear, 0.0}}, rng);
  REQUIRE(net.weights.size() == 1);
  CHECK(net.weights[0].rows == 2);
  CHECK(net.weights[0].cols == 4);
  CHECK(net.biases[0] == std::vector<double>(2, 0.0));
  const double bound = std::sqrt(6.0 / 6.0);
  for (double w : net.weights[0].data) {
    CHECK(std::abs(w) <= bound);
  }
}

TEST_CASE("init: compatible and incompatible chains") {
  Rng rng(2);
  CHECK_NOTHROW(init({{4, 3, Activation::relu, 0.0},
                      {3, 2, Activation::linear, 0.0}},
                     rng));
  CHECK_THROWS_AS(init({{4, 3, Activation::relu, 0.0},
                        {5, 2, Activation::linear, 0.0}},
                       rng),
                  ValidationError);
}

TEST_CASE("forward: identity weights reproduce the input") {
  Network net = single_layer(3, 3, Activation::linear);
  net.weights[0] = Matrix::identity(3);
  const std::vector<double> x = {0.5, -1.0, 2.0};
  CHECK(forward(net, x).output() == x);
}

TEST_CASE("forward: relu clips negatives") {
  Network net = single_layer(2, 2, Activation::relu);
  net.weights[0] = Matrix::identity(2);
  const std::vector<double> x = {-1.0, 2.0};
  CHECK(forward(net, x).output() == std::vector<double>({0.0, 2.0}));
}

TEST_CASE("forward: sigmoid of zero pre-activation is one half") {
  const Network net = single_layer(2, 3, Activation::sigmoid);
  const std::vector<double> x = {4.0, -4.0};  // zero weights, zero biases
  CHECK(forward(net, x).output() == std::vector<double>(3, 0.5));
}

TEST_CASE("forward: length mismatch") {
  const Network net = single_layer(3, 2, Activation::linear);
  CHECK_THROWS_AS(forward(net, std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("forward: deterministic, bit-identical outputs") {
  Rng rng(3);
  const Network net = init({{5, 4, Activation::sigmoid, 0.0},
                            {4, 2, Activation::relu, 0.0}},
                           rng);
  const std::vector<double> x = random_vector(5, rng);
  CHECK(forward(net, x).output() == forward(net, x).output());
}

TEST_CASE("backward: linear layer chain rule with L2 term") {
  Rng rng(4);
  Network net = single_layer(3, 2, Activation::linear, 0.1);
  for (double& w : net.weights[0].data) {
    w = rng.uniform(-1.0, 1.0);
  }
  const std::vector<double> x = {1.0, -2.0, 0.5};
  const std::vector<double> e1 = {1.0, 0.0};
  const ForwardTrace trace = forward(net, x);
  const Gradients g = backward(net, trace, e1, true);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(g.weights[0](0, j) ==
          doctest::Approx(x[j] + 0.2 * net.weights[0](0, j)));
    CHECK(g.weights[0](1, j) ==
          doctest::Approx(0.2 * net.weights[0](1, j)));
  }
  CHECK(g.biases[0] == std::vector<double>({1.0, 0.0}));
}

TEST_CASE("backward: dead relu blocks the data gradient") {
  Network net = single_layer(2, 1, Activation::relu);
  net.weights[0](0, 0) = 1.0;
  net.weights[0](0, 1) = 1.0;
  const std::vector<double> x = {-3.0, 1.0};  // pre-activation -2
  const ForwardTrace trace = forward(net, x);
  const Gradients g = backward(net, trace, std::vector<double>{1.0}, true);
  CHECK(g.weights[0](0, 0) == 0.0);
  CHECK(g.weights[0](0, 1) == 0.0);
  CHECK(g.biases[0][0] == 0.0);
}

TEST_CASE("backward: random nets match central finite differences") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t depth = 1 + rng.uniform_index(3);
    std::vector<LayerSpec> specs;
    std::size_t in = 2 + rng.uniform_index(15);
    for (std::size_t l = 0; l < depth; ++l) {
      const std::size_t out = 2 + rng.uniform_index(15);
      const Activation act = static_cast<Activation>(rng.uniform_index(3));
      const double l2 = rng.uniform_index(2) == 0 ? 0.0 : 1e-3;
      specs.push_back({in, out, act, l2});
      in = out;
    }
    Network net = init(specs, rng);
    const std::vector<double> x = random_vector(net.input_dim(), rng);
    const std::vector<double> cot = random_vector(net.output_dim(), rng);
    CHECK(fd_vs_analytic(net, x, cot, 1e-5) < 1e-4);
  }
}

TEST_CASE("l2_penalty value and gradient") {
  Network net = single_layer(2, 2, Activation::linear, 0.5);
  net.weights[0](0, 0) = 1.0;
  net.weights[0](0, 1) = 2.0;
  net.weights[0](1, 0) = -1.0;
  CHECK(l2_penalty(net) == doctest::Approx(0.5 * (1 + 4 + 1)));

  Gradients g = Gradients::zeros_like(net);
  add_l2_gradients(net, g);
  CHECK(g.weights[0](0, 1) == doctest::Approx(2.0 * 0.5 * 2.0));
  CHECK(g.biases[0][0] == 0.0);  // biases never regularized
}

TEST_CASE("backward: mismatched trace rejected") {
  Rng rng(6);
  const Network a = init({{3, 2, Activation::linear, 0.0}}, rng);
  const Network b = init({{4, 2, Activation::linear, 0.0}}, rng);
  const ForwardTrace trace = forward(a, std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(backward(b, trace, std::vector<double>{1.0, 0.0}),
                  ValidationError);
}

TEST_CASE("network json: exact round-trip") {
  Rng rng(7);
  const Network net = init({{5, 4, Activation::linear, 1e-4},
                            {4, 3, Activation::relu, 0.0},
                            {3, 2, Activation::sigmoid, 2e-5}},
                           rng);
  const Network back = network_from_json(network_to_json(net));
  REQUIRE(back.layers.size() == net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(back.layers[l].input_dim == net.layers[l].input_dim);
    CHECK(back.layers[l].output_dim == net.layers[l].output_dim);
    CHECK(back.layers[l].activation == net.layers[l].activation);
    CHECK(back.layers[l].l2_coefficient == net.layers[l].l2_coefficient);
    CHECK(back.weights[l] == net.weights[l]);  // bitwise
    CHECK(back.biases[l] == net.biases[l]);
  }
}

TEST_CASE("network json: malformed input") {
  CHECK_THROWS_AS(network_from_json("not json"), ParseError);
  CHECK_THROWS_AS(network_from_json("{}"), ParseError);
}
