// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line with its runtime. Run via ctest or directly.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "embedclust/baselines.hpp"
#include "embedclust/cluster.hpp"
#include "embedclust/error.hpp"
#include "embedclust/experiment.hpp"
#include "embedclust/loss.hpp"
#include "embedclust/metrics.hpp"
#include "embedclust/network.hpp"
#include "embedclust/rng.hpp"
#include "embedclust/synthetic.hpp"
#include "embedclust/trainer.hpp"

using namespace embedclust;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report_line(int id, const char* name, bool ok, double seconds) {
  std::printf("[acceptance] criterion %d (%s): %s (%.1f s)\n", id, name,
              ok ? "PASS" : "FAIL", seconds);
  std::fflush(stdout);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// The transfer benchmark: 8 classes, 200 samples each, latent 4, ambient 32,
// warped; 5 known classes, 3 unknown.
fs::path benchmark_csv(std::uint64_t data_seed) {
  SyntheticConfig synth;
  synth.n_classes = 8;
  synth.per_class = 200;
  synth.latent_dim = 4;
  synth.ambient_dim = 32;
  synth.warp = Warp::random_relu_mix;
  synth.seed = data_seed;

  const fs::path dir = fs::temp_directory_path() / "ec_acceptance";
  fs::create_directories(dir);
  const fs::path path =
      dir / ("benchmark_" + std::to_string(data_seed) + ".csv");
  save_csv(generate_synthetic(synth), path.string());
  return path;
}

ExperimentConfig benchmark_config(std::uint64_t seed, Method method,
                                  const std::string& tag) {
  ExperimentConfig cfg;
  cfg.dataset_path = benchmark_csv(seed).string();
  cfg.split.known_classes = {"class0", "class1", "class2", "class3", "class4"};
  cfg.split.unknown_classes = {"class5", "class6", "class7"};
  cfg.method = method;
  cfg.seed = seed;
  cfg.direct.embedding_dim = 16;
  cfg.pca.n_components = 16;
  cfg.autoencoder.bottleneck_dim = 16;
  cfg.out_dir = (fs::temp_directory_path() / "ec_acceptance" /
                 (tag + "_" + to_string(method) + "_" + std::to_string(seed)))
                    .string();
  return cfg;
}

const std::vector<std::uint64_t> kBenchmarkSeeds = {11, 22, 33, 44, 55};

// Gradient of the full pair pipeline (contrastive loss of two shared-weight
// branches plus L2) versus central finite differences over every parameter.
double full_pipeline_fd_error(Network& net, const ContrastiveConfig& cfg,
                              int y, const std::vector<double>& x1,
                              const std::vector<double>& x2, double h) {
  Dataset ds;
  ds.dimension = x1.size();
  ds.class_names = {"p", "q"};
  ds.samples = {{x1, 0, "p"}, {x2, y == 1 ? 0 : 1, y == 1 ? "p" : "q"}};
  const LabeledPair pair{0, 1, y};

  PairGradient analytic = pair_gradient(net, cfg, pair, ds);
  add_l2_gradients(net, analytic.grads);

  auto total_loss = [&] {
    const ForwardTrace t1 = forward(net, x1);
    const ForwardTrace t2 = forward(net, x2);
    return contrastive_loss(cfg, y, t1.output(), t2.output()).loss +
           l2_penalty(net);
  };

  double worst = 0.0;
  auto probe = [&](double expected, double& param) {
    const double keep = param;
    param = keep + h;
    const double up = total_loss();
    param = keep - h;
    const double down = total_loss();
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
  return worst;
}

}  // namespace

TEST_CASE("criterion 1: gradient correctness") {
  Stopwatch timer;
  bool ok = true;
  Rng rng(20240901);
  int configs_checked = 0;
  int attempts = 0;
  while (configs_checked < 50 && attempts < 500) {
    ++attempts;
    const std::size_t depth = 1 + rng.uniform_index(3);
    std::vector<LayerSpec> specs;
    std::size_t in = 2 + rng.uniform_index(15);
    const std::size_t input_dim = in;
    for (std::size_t l = 0; l < depth; ++l) {
      const std::size_t out = 2 + rng.uniform_index(15);
      const Activation act = static_cast<Activation>(rng.uniform_index(3));
      specs.push_back({in, out, act, rng.uniform_index(2) == 0 ? 0.0 : 1e-3});
      in = out;
    }
    Network net = init(specs, rng);

    ContrastiveConfig cfg;
    cfg.margin = 1.0;
    cfg.distance = rng.uniform_index(2) == 0 ? DistanceKind::euclidean
                                             : DistanceKind::cosine;
    const int y = static_cast<int>(rng.uniform_index(2));

    std::vector<double> x1(input_dim);
    std::vector<double> x2(input_dim);
    for (std::size_t i = 0; i < input_dim; ++i) {
      x1[i] = rng.uniform(-1.0, 1.0);
      x2[i] = rng.uniform(-1.0, 1.0);
    }

    // Finite differences are meaningless within h of the hinge, a zero
    // distance, or a zero embedding under cosine; redraw those configs.
    const ForwardTrace t1 = forward(net, x1);
    const ForwardTrace t2 = forward(net, x2);
    if (cfg.distance == DistanceKind::cosine &&
        (norm(t1.output()) < 1e-3 || norm(t2.output()) < 1e-3)) {
      continue;
    }
    const double d = distance(cfg.distance, t1.output(), t2.output());
    if (d < 1e-3 || std::abs(d - cfg.margin) < 1e-3) {
      continue;
    }

    const double err = full_pipeline_fd_error(net, cfg, y, x1, x2, 1e-5);
    if (!(err < 1e-4)) {
      ok = false;
      MESSAGE("config ", configs_checked, " max rel err ", err);
    }
    ++configs_checked;
  }
  ok = ok && configs_checked == 50;
  const double secs = timer.seconds();
  ok = ok && secs < 30.0;
  report_line(1, "gradient correctness", ok, secs);
  CHECK(configs_checked == 50);
  CHECK(secs < 30.0);
  CHECK(ok);
}

TEST_CASE("criterion 2: metric oracle equivalence") {
  Stopwatch timer;
  bool ok = true;
  Rng rng(20240902);

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.uniform_index(19);
    std::vector<int> a(m);
    std::vector<int> b(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = static_cast<int>(rng.uniform_index(1 + rng.uniform_index(6)));
      b[i] = static_cast<int>(rng.uniform_index(1 + rng.uniform_index(6)));
    }
    const PairCounts counts = brute_force_pair_counts(a, b);
    const double all = static_cast<double>(m * (m - 1) / 2);
    const double ri_oracle =
        static_cast<double>(counts.same_same + counts.diff_diff) / all;
    ok = ok && std::abs(rand_index(a, b) - ri_oracle) <= 1e-12;

    const ContingencyTable table = ContingencyTable::from_labels(a, b);
    double s_rows = 0.0;
    double s_cols = 0.0;
    for (std::int64_t s : table.row_sums) {
      s_rows += static_cast<double>(s * (s - 1) / 2);
    }
    for (std::int64_t s : table.col_sums) {
      s_cols += static_cast<double>(s * (s - 1) / 2);
    }
    const double expected = s_rows * s_cols / all;
    const double denom = 0.5 * (s_rows + s_cols) - expected;
    const double ari_oracle =
        denom == 0.0
            ? 0.0
            : (static_cast<double>(counts.same_same) - expected) / denom;
    ok = ok && std::abs(ari(a, b) - ari_oracle) <= 1e-12;

    // NMI invariance under a label permutation of either side.
    std::vector<int> b_permuted(m);
    for (std::size_t i = 0; i < m; ++i) {
      b_permuted[i] = 1000 - b[i];
    }
    ok = ok && std::abs(nmi(a, b) - nmi(a, b_permuted)) <= 1e-12;
  }

  ok = ok && nmi({0, 0, 1, 1}, {0, 1, 0, 1}) == 0.0;
  ok = ok && nmi({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0;

  const double secs = timer.seconds();
  ok = ok && secs < 5.0;
  report_line(2, "metric oracle equivalence", ok, secs);
  CHECK(secs < 5.0);
  CHECK(ok);
}

TEST_CASE("criterion 3: k-means soundness") {
  Stopwatch timer;
  bool ok = true;
  Rng rng(20240903);

  // Lloyd monotonicity over random instances.
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t n = 20 + rng.uniform_index(60);
    const std::size_t dim = 1 + rng.uniform_index(5);
    const std::size_t k = 2 + rng.uniform_index(5);
    Matrix points(n, dim);
    for (double& v : points.data) {
      v = rng.uniform(-5.0, 5.0);
    }
    Rng krng(rng.next_u64());
    const ClusterResult result = kmeans(points, k, 1, 200, 0.0, krng);
    for (std::size_t i = 1; i < result.inertia_history.size(); ++i) {
      if (result.inertia_history[i] >
          result.inertia_history[i - 1] + 1e-12) {
        ok = false;
        MESSAGE("inertia rose at instance ", instance, " iteration ", i);
      }
    }
  }

  // Separated-pairs example with exact centroids.
  {
    Matrix points(4, 1);
    points(0, 0) = 0.0;
    points(1, 0) = 1.0;
    points(2, 0) = 10.0;
    points(3, 0) = 11.0;
    Rng krng(7);
    const ClusterResult result = kmeans(points, 2, 10, 300, 1e-6, krng);
    std::vector<double> centers = {result.centroids(0, 0),
                                   result.centroids(1, 0)};
    std::sort(centers.begin(), centers.end());
    ok = ok && std::abs(centers[0] - 0.5) < 1e-12;
    ok = ok && std::abs(centers[1] - 10.5) < 1e-12;
    ok = ok && std::abs(result.inertia - 1.0) < 1e-12;
  }

  // Empty-cluster repair under adversarial duplicates: must never throw.
  {
    Matrix points(12, 2);
    for (std::size_t i = 0; i < 6; ++i) {
      points(i, 0) = 1.0;
      points(i, 1) = 1.0;
    }
    for (std::size_t i = 6; i < 12; ++i) {
      points(i, 0) = -1.0;
      points(i, 1) = 2.0;
    }
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      Rng krng(seed);
      try {
        const ClusterResult result = kmeans(points, 9, 2, 50, 1e-9, krng);
        for (std::size_t a : result.assignments) {
          ok = ok && a < 9;
        }
      } catch (const std::exception& e) {
        ok = false;
        MESSAGE("kmeans threw on adversarial seed ", seed, ": ", e.what());
        break;
      }
    }
  }

  const double secs = timer.seconds();
  ok = ok && secs < 30.0;
  report_line(3, "k-means soundness", ok, secs);
  CHECK(secs < 30.0);
  CHECK(ok);
}

TEST_CASE("criterion 4: method ordering at desk scale") {
  Stopwatch timer;
  double nmi_direct = 0.0;
  double ari_direct = 0.0;
  double nmi_raw = 0.0;
  double ari_raw = 0.0;
  double nmi_pca = 0.0;

  for (std::uint64_t seed : kBenchmarkSeeds) {
    const EvaluationReport direct =
        run_experiment(benchmark_config(seed, Method::direct, "c4"));
    const EvaluationReport raw =
        run_experiment(benchmark_config(seed, Method::raw, "c4"));
    const EvaluationReport pca =
        run_experiment(benchmark_config(seed, Method::pca, "c4"));
    nmi_direct += direct.nmi;
    ari_direct += direct.ari;
    nmi_raw += raw.nmi;
    ari_raw += raw.ari;
    nmi_pca += pca.nmi;
  }
  const double n = static_cast<double>(kBenchmarkSeeds.size());
  nmi_direct /= n;
  ari_direct /= n;
  nmi_raw /= n;
  ari_raw /= n;
  nmi_pca /= n;

  MESSAGE("mean NMI direct=", nmi_direct, " raw=", nmi_raw, " pca=", nmi_pca);
  MESSAGE("mean ARI direct=", ari_direct, " raw=", ari_raw);

  bool ok = true;
  ok = ok && nmi_direct >= nmi_raw + 0.05;
  ok = ok && ari_direct >= ari_raw + 0.05;
  ok = ok && nmi_direct >= nmi_pca;
  const double secs = timer.seconds();
  ok = ok && secs < 300.0;
  report_line(4, "method ordering at desk scale", ok, secs);
  CHECK(nmi_direct >= nmi_raw + 0.05);
  CHECK(ari_direct >= ari_raw + 0.05);
  CHECK(nmi_direct >= nmi_pca);
  CHECK(secs < 300.0);
}

TEST_CASE("criterion 5: embedding-size effect") {
  Stopwatch timer;
  double nmi_k2 = 0.0;
  double nmi_k16 = 0.0;
  for (std::uint64_t seed : kBenchmarkSeeds) {
    ExperimentConfig cfg = benchmark_config(seed, Method::direct, "c5");
    const auto entries = sweep_embedding_dim(cfg, {2, 16});
    REQUIRE(entries.size() == 2);
    REQUIRE(entries[0].ok);
    REQUIRE(entries[1].ok);
    nmi_k2 += entries[0].report.nmi;
    nmi_k16 += entries[1].report.nmi;
  }
  nmi_k2 /= static_cast<double>(kBenchmarkSeeds.size());
  nmi_k16 /= static_cast<double>(kBenchmarkSeeds.size());
  MESSAGE("seed-averaged NMI: k=2 ", nmi_k2, ", k=16 ", nmi_k16);

  bool ok = nmi_k16 >= nmi_k2;
  const double secs = timer.seconds();
  ok = ok && secs < 600.0;
  report_line(5, "embedding-size effect", ok, secs);
  CHECK(nmi_k16 >= nmi_k2);
  CHECK(secs < 600.0);
}

TEST_CASE("criterion 6: training progress") {
  Stopwatch timer;
  bool ok = true;
  for (std::uint64_t seed : kBenchmarkSeeds) {
    const Dataset ds = load_csv(benchmark_csv(seed).string());
    const ExperimentConfig cfg = benchmark_config(seed, Method::direct, "c6");
    const auto [known, unknown] = split(ds, cfg.split);

    DirectEmbedderConfig dc;
    dc.hidden_dim = cfg.direct.hidden_dim;
    dc.embedding_dim = cfg.direct.embedding_dim;
    dc.train.seed = derive_seed(seed, "direct");
    DirectEmbedder direct(dc);
    direct.fit(known);
    const TrainLog* direct_log = direct.train_log();
    if (direct_log->mean_loss.back() >= direct_log->mean_loss.front()) {
      ok = false;
      MESSAGE("direct loss did not improve for seed ", seed);
    }

    AutoencoderConfig ac = cfg.autoencoder;
    ac.seed = derive_seed(seed, "autoencoder");
    const AutoencoderEmbedder ae = autoencoder_fit(known, ac);
    const TrainLog* ae_log = ae.train_log();
    if (ae_log->mean_loss.back() >= ae_log->mean_loss.front()) {
      ok = false;
      MESSAGE("autoencoder loss did not improve for seed ", seed);
    }
  }
  const double secs = timer.seconds();
  report_line(6, "training progress", ok, secs);
  CHECK(ok);
}

TEST_CASE("criterion 7: experiment determinism") {
  Stopwatch timer;
  ExperimentConfig cfg = benchmark_config(kBenchmarkSeeds[0], Method::direct,
                                          "c7");
  cfg.direct.epochs = 10;  // determinism is epoch-count independent

  run_experiment(cfg);
  const fs::path dir(cfg.out_dir);
  const std::string report1 = slurp(dir / "report.json");
  const std::string assignments1 = slurp(dir / "assignments.csv");
  const std::string embeddings1 = slurp(dir / "embeddings.csv");

  run_experiment(cfg);
  const std::string assignments2 = slurp(dir / "assignments.csv");
  const std::string embeddings2 = slurp(dir / "embeddings.csv");

  EvaluationReport a = report_from_json(report1);
  EvaluationReport b = report_from_json(slurp(dir / "report.json"));
  a.wall_seconds = 0.0;
  b.wall_seconds = 0.0;

  const bool ok = assignments1 == assignments2 &&
                  embeddings1 == embeddings2 &&
                  report_to_json(a) == report_to_json(b);
  const double secs = timer.seconds();
  report_line(7, "experiment determinism", ok, secs);
  CHECK(assignments1 == assignments2);
  CHECK(embeddings1 == embeddings2);
  CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("criterion 8: contrastive loss contract") {
  Stopwatch timer;
  bool ok = true;
  const ContrastiveConfig cfg{1.0, DistanceKind::euclidean};

  // y=0, d >= m: exactly zero loss and gradients.
  {
    const std::vector<double> z1 = {0.0, 0.0};
    for (const std::vector<double>& z2 :
         {std::vector<double>{0.6, 0.8}, std::vector<double>{3.0, 4.0}}) {
      const ContrastiveResult r = contrastive_loss(cfg, 0, z1, z2);
      ok = ok && r.loss == 0.0;
      for (double g : r.dz1) {
        ok = ok && g == 0.0;
      }
      for (double g : r.dz2) {
        ok = ok && g == 0.0;
      }
    }
  }
  // y=1, identical embeddings: exactly zero loss.
  {
    const std::vector<double> z = {0.3, -0.7, 1.1};
    ok = ok && contrastive_loss(cfg, 1, z, z).loss == 0.0;
  }
  // y=0, identical embeddings: exactly the margin.
  {
    const std::vector<double> z = {0.3, -0.7, 1.1};
    ok = ok && contrastive_loss(cfg, 0, z, z).loss == cfg.margin;
  }

  const double secs = timer.seconds();
  report_line(8, "contrastive loss contract", ok, secs);
  CHECK(ok);
}
