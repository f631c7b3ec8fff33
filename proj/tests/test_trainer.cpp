#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "embedclust/error.hpp"
#include "embedclust/trainer.hpp"

using namespace embedclust;

namespace {

// Two well-separated classes along the first coordinate.
Dataset two_point_classes(std::size_t d, std::size_t per_class) {
  Dataset ds;
  ds.dimension = d;
  ds.class_names = {"near", "far"};
  Rng rng(99);
  for (std::size_t s = 0; s < per_class; ++s) {
    Sample a;
    a.class_id = 0;
    a.class_name = "near";
    a.features.assign(d, 0.0);
    a.features[0] = 0.02 * rng.normal();
    ds.samples.push_back(a);

    Sample b;
    b.class_id = 1;
    b.class_name = "far";
    b.features.assign(d, 0.0);
    b.features[0] = 1.0 + 0.02 * rng.normal();
    ds.samples.push_back(b);
  }
  return ds;
}

// Scalar training loss of one pair including the L2 penalty, for finite
// differences over every parameter.
double pair_total_loss(const Network& net, const ContrastiveConfig& cfg,
                       const LabeledPair& pair, const Dataset& ds) {
  const ForwardTrace t1 = forward(net, ds.samples[pair.first_index].features);
  const ForwardTrace t2 = forward(net, ds.samples[pair.second_index].features);
  return contrastive_loss(cfg, pair.y, t1.output(), t2.output()).loss +
         l2_penalty(net);
}

}  // namespace

TEST_CASE("train config: validation") {
  const Dataset ds = two_point_classes(2, 4);
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(ds.size()), ValidationError);

  cfg.epochs = 1;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(ds.size()), ValidationError);

  cfg.batch_size = 64;
  cfg.pairs_per_epoch = 32;
  CHECK_THROWS_AS(cfg.validate(ds.size()), ValidationError);

  cfg.pairs_per_epoch = 64;
  CHECK_NOTHROW(cfg.validate(ds.size()));
}

TEST_CASE("shared-weight gradients match finite differences") {
  Rng rng(17);
  const Dataset ds = two_point_classes(3, 3);
  for (int trial = 0; trial < 10; ++trial) {
    Network net = init({{3, 5, Activation::linear, 1e-3},
                        {5, 4, Activation::relu, 0.0}},
                       rng);
    const int y = trial % 2;
    // Pick a pair consistent with y (indices alternate near/far).
    const LabeledPair pair = y == 1 ? LabeledPair{0, 2, 1}
                                    : LabeledPair{0, 1, 0};
    const ContrastiveConfig cfg{1.0, DistanceKind::euclidean};

    // Skip configurations that land too close to the hinge for FD.
    const ForwardTrace t1 = forward(net, ds.samples[pair.first_index].features);
    const ForwardTrace t2 =
        forward(net, ds.samples[pair.second_index].features);
    const double d = distance(cfg.distance, t1.output(), t2.output());
    if (d < 1e-3 || std::abs(d - cfg.margin) < 1e-3) {
      continue;
    }

    PairGradient analytic = pair_gradient(net, cfg, pair, ds);
    add_l2_gradients(net, analytic.grads);

    const double h = 1e-5;
    double worst = 0.0;
    auto probe = [&](double expected, double& param) {
      const double keep = param;
      param = keep + h;
      const double up = pair_total_loss(net, cfg, pair, ds);
      param = keep - h;
      const double down = pair_total_loss(net, cfg, pair, ds);
      param = keep;
      const double fd = (up - down) / (2.0 * h);
      const double scale = std::max({1e-6, std::abs(fd), std::abs(expected)});
      worst = std::max(worst, std::abs(fd - expected) / scale);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
        probe(analytic.grads.weights[l].data[i], net.weights[l].data[i]);
      }
      for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
        probe(analytic.grads.biases[l][i], net.biases[l][i]);
      }
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("train: mean epoch loss decreases on separable classes") {
  const Dataset ds = two_point_classes(2, 6);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 4;
  cfg.pairs_per_epoch = 60;
  cfg.seed = 5;
  Rng rng(3);
  Network net = init({{2, 2, Activation::linear, 0.0}}, rng);
  const TrainLog log = train(net, ds, cfg);
  REQUIRE(log.mean_loss.size() == 50);
  CHECK(log.mean_loss.back() < log.mean_loss.front());
}

TEST_CASE("train: last partial batch is processed at its actual size") {
  const Dataset ds = two_point_classes(2, 5);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 10;
  cfg.pairs_per_epoch = 25;  // 10 + 10 + 5
  cfg.seed = 31;
  Rng rng(6);
  Network net = init({{2, 2, Activation::linear, 0.0}}, rng);
  const TrainLog log = train(net, ds, cfg);
  CHECK(log.mean_loss.size() == 3);
  for (double loss : log.mean_loss) {
    CHECK(std::isfinite(loss));
  }
}

TEST_CASE("train: fixed seed gives a bit-identical loss log") {
  const Dataset ds = two_point_classes(2, 5);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 5;
  cfg.pairs_per_epoch = 25;
  cfg.seed = 21;

  auto run = [&] {
    Rng rng(8);
    Network net = init({{2, 3, Activation::linear, 1e-4},
                        {3, 2, Activation::relu, 0.0}},
                       rng);
    return train(net, ds, cfg).mean_loss;
  };
  CHECK(run() == run());
}

TEST_CASE("train: epochs draw different pair sets") {
  // Observable through the loss log: with frozen parameters (lr ~ 0 is not
  // possible, so use one-epoch runs seeded identically) the pair stream must
  // differ between epoch 1 and epoch 2. Sample directly instead.
  const Dataset ds = two_point_classes(2, 8);
  Rng rng(derive_seed(42, "pairs"));
  const auto epoch1 = sample_pairs(ds, 100, 0.5, rng);
  const auto epoch2 = sample_pairs(ds, 100, 0.5, rng);
  bool differ = false;
  for (std::size_t i = 0; i < epoch1.size(); ++i) {
    if (epoch1[i].first_index != epoch2[i].first_index ||
        epoch1[i].second_index != epoch2[i].second_index) {
      differ = true;
      break;
    }
  }
  CHECK(differ);
}

TEST_CASE("train: aborts with coordinates on non-finite loss") {
  Dataset ds = two_point_classes(2, 4);
  ds.samples[0].features[0] = 1e308;  // overflow the distance
  ds.samples[2].features[0] = -1e308;
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 2;
  cfg.pairs_per_epoch = 20;
  cfg.seed = 4;
  Rng rng(9);
  Network net = init({{2, 2, Activation::linear, 0.0}}, rng);
  CHECK_THROWS_WITH_AS(train(net, ds, cfg), doctest::Contains("epoch"),
                       NumericError);
}

TEST_CASE("embed_all: identity network reproduces features") {
  Dataset ds = two_point_classes(3, 2);
  Network net;
  net.layers = {{3, 3, Activation::linear, 0.0}};
  net.weights = {Matrix::identity(3)};
  net.biases = {std::vector<double>(3, 0.0)};
  const Matrix out = embed_all(net, ds);
  REQUIRE(out.rows == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(out(i, j) == ds.samples[i].features[j]);
    }
  }
}

TEST_CASE("embed_all: empty dataset gives a 0 x k matrix") {
  Dataset empty;
  empty.dimension = 3;
  Rng rng(10);
  const Network net = init({{3, 2, Activation::relu, 0.0}}, rng);
  const Matrix out = embed_all(net, empty);
  CHECK(out.rows == 0);
  CHECK(out.cols == 2);
}

TEST_CASE("embed_all: rows equal per-sample forward calls") {
  const Dataset ds = two_point_classes(4, 3);
  Rng rng(11);
  const Network net = init({{4, 3, Activation::sigmoid, 0.0},
                            {3, 2, Activation::linear, 0.0}},
                           rng);
  const Matrix out = embed_all(net, ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const ForwardTrace trace = forward(net, ds.samples[i].features);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(out(i, j) == trace.output()[j]);
    }
  }
}

TEST_CASE("embed_all: dimension mismatch") {
  Rng rng(12);
  const Network net = init({{4, 2, Activation::linear, 0.0}}, rng);
  const Dataset ds = two_point_classes(3, 2);
  CHECK_THROWS_AS(embed_all(net, ds), ShapeError);
}

TEST_CASE("train log csv format") {
  TrainLog log;
  log.mean_loss = {0.5, 0.25};
  log.seconds = {0.125, 0.25};
  const auto path =
      std::filesystem::temp_directory_path() / "ec_trainlog.csv";
  save_csv(log, path.string());
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == "epoch,mean_loss,seconds\n0,0.5,0.125\n1,0.25,0.25\n");
}
