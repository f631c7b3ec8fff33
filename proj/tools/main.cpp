// embedclust command line: synthetic data generation, embedding training,
// clustering and evaluation, plus the end-to-end experiment pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embedclust/baselines.hpp"
#include "embedclust/cluster.hpp"
#include "embedclust/dataset.hpp"
#include "embedclust/error.hpp"
#include "embedclust/experiment.hpp"
#include "embedclust/format.hpp"
#include "embedclust/metrics.hpp"
#include "embedclust/synthetic.hpp"
#include "embedclust/trainer.hpp"

namespace fs = std::filesystem;
using namespace embedclust;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t pos = csv.find(',', start);
    if (pos == std::string::npos) {
      if (start < csv.size()) {
        out.push_back(csv.substr(start));
      }
      break;
    }
    if (pos > start) {
      out.push_back(csv.substr(start, pos - start));
    }
    start = pos + 1;
  }
  return out;
}

// Options shared by experiment-shaped subcommands. Flags override keys of
// the --config JSON.
struct ExperimentArgs {
  std::string config_path;
  std::string dataset;
  std::string method;
  std::string known;
  std::string unknown;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t k_clusters = 0;
  bool k_set = false;
  std::size_t embedding_dim = 0;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config JSON file");
  cmd->add_option("--dataset", args.dataset, "dataset CSV path");
  cmd->add_option("--method", args.method,
                  "direct | raw | pca | autoencoder");
  cmd->add_option("--known", args.known, "comma-separated known class names");
  cmd->add_option("--unknown", args.unknown,
                  "comma-separated unknown class names");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--seed", args.seed, "master seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--k", args.k_clusters, "number of clusters")
      ->each([&args](const std::string&) { args.k_set = true; });
  cmd->add_option("--embedding-dim", args.embedding_dim,
                  "embedding size for the direct method");
}

ExperimentConfig resolve_config(const ExperimentArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    cfg = experiment_config_from_json(read_file(args.config_path));
  }
  if (!args.dataset.empty()) {
    cfg.dataset_path = args.dataset;
  }
  if (!args.method.empty()) {
    cfg.method = method_from_string(args.method);
  }
  if (!args.known.empty()) {
    cfg.split.known_classes = split_list(args.known);
  }
  if (!args.unknown.empty()) {
    cfg.split.unknown_classes = split_list(args.unknown);
  }
  if (!args.out.empty()) {
    cfg.out_dir = args.out;
  }
  if (args.seed_set) {
    cfg.seed = args.seed;
  }
  if (args.k_set) {
    cfg.k_clusters = args.k_clusters;
  }
  if (args.embedding_dim > 0) {
    cfg.direct.embedding_dim = args.embedding_dim;
    cfg.pca.n_components = args.embedding_dim;
    cfg.autoencoder.bottleneck_dim = args.embedding_dim;
  }
  return cfg;
}

void print_report(const EvaluationReport& report) {
  std::printf("method=%s nmi=%.6f ri=%.6f ari=%.6f k=%zu dim=%zu seed=%llu\n",
              report.method.c_str(), report.nmi, report.ri, report.ari,
              report.k_used, report.embedding_dim,
              static_cast<unsigned long long>(report.seed));
}

int cmd_synth(const SyntheticConfig& synth, const std::string& out_dir) {
  const Dataset ds = generate_synthetic(synth);
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / "dataset.csv").string();
  save_csv(ds, path);
  std::printf("wrote %s (%zu samples, %zu classes, dim %zu)\n", path.c_str(),
              ds.size(), ds.n_classes(), ds.dimension);
  return 0;
}

int cmd_train(const ExperimentArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  if (cfg.out_dir.empty()) {
    throw ValidationError("train: --out is required");
  }
  if (cfg.method != Method::direct && cfg.method != Method::autoencoder &&
      cfg.method != Method::pca && cfg.method != Method::raw) {
    throw ValidationError("train: unknown method");
  }
  const Dataset ds = load_csv(cfg.dataset_path);
  const auto [known, unknown] = split(ds, cfg.split);

  const std::unique_ptr<Embedder> embedder = make_embedder(cfg, known);
  fs::create_directories(cfg.out_dir);
  const std::string model_path =
      (fs::path(cfg.out_dir) / "model.json").string();
  save_embedder(*embedder, model_path);
  if (const TrainLog* log = embedder->train_log()) {
    save_csv(*log, (fs::path(cfg.out_dir) / "trainlog.csv").string());
  }
  std::printf("wrote %s (method %s, embedding dim %zu)\n", model_path.c_str(),
              embedder->name().c_str(), embedder->embedding_dim());
  return 0;
}

int cmd_embed(const std::string& model_path, const std::string& dataset_path,
              const std::string& out_dir) {
  const std::unique_ptr<Embedder> embedder = load_embedder(model_path);
  const Dataset ds = load_csv(dataset_path);
  const Matrix embedded = embedder->transform(ds);
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / "embeddings.csv").string();
  save_csv(with_features(ds, embedded), path);
  std::printf("wrote %s (%zu x %zu)\n", path.c_str(), embedded.rows,
              embedded.cols);
  return 0;
}

int cmd_cluster(const std::string& embeddings_path, std::size_t k,
                const KmeansConfig& kmcfg, std::uint64_t seed,
                const std::string& out_dir) {
  const Dataset ds = load_csv(embeddings_path);
  if (k == 0) {
    k = ds.n_classes();
  }
  Rng rng(derive_seed(seed, "kmeans"));
  const ClusterResult result = kmeans(ds.feature_matrix(), k, kmcfg.restarts,
                                      kmcfg.max_iter, kmcfg.tol, rng);
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / "assignments.csv").string();
  save_csv(result, path);
  std::printf("wrote %s (k=%zu inertia=%s iterations=%zu)\n", path.c_str(), k,
              format_double(result.inertia).c_str(), result.iterations_run);
  return 0;
}

int cmd_evaluate(const std::string& assignments_path,
                 const std::string& truth_path, const std::string& out_dir) {
  const std::vector<std::size_t> assignments =
      load_assignments_csv(assignments_path);
  const Dataset truth = load_csv(truth_path);
  if (assignments.size() != truth.size()) {
    throw ValidationError("evaluate: " + std::to_string(assignments.size()) +
                          " assignments for " + std::to_string(truth.size()) +
                          " truth samples");
  }
  std::vector<int> predicted;
  predicted.reserve(assignments.size());
  for (std::size_t a : assignments) {
    predicted.push_back(static_cast<int>(a));
  }
  const std::vector<int> labels = truth.labels();
  const double v_nmi = nmi(labels, predicted);
  const double v_ri = rand_index(labels, predicted);
  const double v_ari = ari(labels, predicted);
  std::printf("nmi=%.6f ri=%.6f ari=%.6f\n", v_nmi, v_ri, v_ari);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "evaluation.json",
                      std::ios::binary);
    out << "{\n  \"nmi\": " << format_double(v_nmi)
        << ",\n  \"ri\": " << format_double(v_ri)
        << ",\n  \"ari\": " << format_double(v_ari) << "\n}\n";
  }
  return 0;
}

int cmd_experiment(const ExperimentArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  const EvaluationReport report = run_experiment(cfg);
  print_report(report);
  return 0;
}

int cmd_sweep(const ExperimentArgs& args, const std::string& dims_csv) {
  const ExperimentConfig cfg = resolve_config(args);
  std::vector<std::size_t> dims;
  for (const std::string& tok : split_list(dims_csv)) {
    dims.push_back(static_cast<std::size_t>(std::stoul(tok)));
  }
  const std::vector<SweepEntry> entries = sweep_embedding_dim(cfg, dims);
  for (const SweepEntry& entry : entries) {
    if (entry.ok) {
      std::printf("k=%zu nmi=%.6f ari=%.6f\n", entry.k, entry.report.nmi,
                  entry.report.ari);
    } else {
      std::fprintf(stderr, "k=%zu failed: %s\n", entry.k,
                   entry.error.c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discriminative embeddings for transfer clustering"};
  app.require_subcommand(1);

  // synth
  SyntheticConfig synth;
  std::string synth_warp = "random_relu_mix";
  std::string synth_out = ".";
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a labeled synthetic dataset CSV");
  synth_cmd->add_option("--classes", synth.n_classes, "number of classes");
  synth_cmd->add_option("--per-class", synth.per_class, "samples per class");
  synth_cmd->add_option("--latent-dim", synth.latent_dim, "latent dimension");
  synth_cmd->add_option("--ambient-dim", synth.ambient_dim,
                        "ambient (feature) dimension");
  synth_cmd->add_option("--warp", synth_warp, "none | random_relu_mix");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--center-radius", synth.center_radius,
                        "latent class-center radius");
  synth_cmd->add_option("--noise-sigma", synth.noise_sigma,
                        "latent isotropic noise");
  synth_cmd->add_option("--gain-spread", synth.gain_log10_spread,
                        "log10 spread of the warp's latent direction gains");
  synth_cmd->add_option("--hinge-shift", synth.hinge_offset_shift,
                        "positive bias of the warp's relu hinges, in offset sigmas");
  synth_cmd->add_option("--out", synth_out, "output directory");

  // train
  ExperimentArgs train_args;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "fit an embedding method on the known classes");
  add_experiment_options(train_cmd, train_args);

  // embed
  std::string embed_model;
  std::string embed_dataset;
  std::string embed_out = ".";
  CLI::App* embed_cmd =
      app.add_subcommand("embed", "project a dataset through a saved model");
  embed_cmd->add_option("--model", embed_model, "model JSON file")
      ->required();
  embed_cmd->add_option("--dataset", embed_dataset, "dataset CSV")->required();
  embed_cmd->add_option("--out", embed_out, "output directory");

  // cluster
  std::string cluster_embeddings;
  std::size_t cluster_k = 0;
  KmeansConfig cluster_cfg;
  std::uint64_t cluster_seed = 0;
  std::string cluster_out = ".";
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "k-means over an embeddings CSV");
  cluster_cmd
      ->add_option("--embeddings", cluster_embeddings, "embeddings CSV")
      ->required();
  cluster_cmd->add_option("--k", cluster_k,
                          "clusters (default: classes in the file)");
  cluster_cmd->add_option("--restarts", cluster_cfg.restarts, "restarts");
  cluster_cmd->add_option("--max-iter", cluster_cfg.max_iter,
                          "iteration cap per restart");
  cluster_cmd->add_option("--tol", cluster_cfg.tol, "centroid-shift tolerance");
  cluster_cmd->add_option("--seed", cluster_seed, "seed");
  cluster_cmd->add_option("--out", cluster_out, "output directory");

  // evaluate
  std::string eval_assignments;
  std::string eval_truth;
  std::string eval_out;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "score assignments against true labels (NMI, RI, ARI)");
  eval_cmd->add_option("--assignments", eval_assignments, "assignments CSV")
      ->required();
  eval_cmd->add_option("--truth", eval_truth, "dataset CSV with true labels")
      ->required();
  eval_cmd->add_option("--out", eval_out, "optional output directory");

  // experiment
  ExperimentArgs exp_args;
  CLI::App* exp_cmd = app.add_subcommand(
      "experiment", "full pipeline: split, fit, embed, cluster, score");
  add_experiment_options(exp_cmd, exp_args);

  // sweep
  ExperimentArgs sweep_args;
  std::string sweep_dims = "2,4,8,16";
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "repeat the direct-method experiment over embedding sizes");
  add_experiment_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--dims", sweep_dims,
                        "comma-separated embedding sizes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      synth.warp = warp_from_string(synth_warp);
      return cmd_synth(synth, synth_out);
    }
    if (train_cmd->parsed()) {
      return cmd_train(train_args);
    }
    if (embed_cmd->parsed()) {
      return cmd_embed(embed_model, embed_dataset, embed_out);
    }
    if (cluster_cmd->parsed()) {
      return cmd_cluster(cluster_embeddings, cluster_k, cluster_cfg,
                         cluster_seed, cluster_out);
    }
    if (eval_cmd->parsed()) {
      return cmd_evaluate(eval_assignments, eval_truth, eval_out);
    }
    if (exp_cmd->parsed()) {
      return cmd_experiment(exp_args);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_args, sweep_dims);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
