#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embedclust/baselines.hpp"
#include "embedclust/cluster.hpp"
#include "embedclust/dataset.hpp"
#include "embedclust/loss.hpp"
#include "embedclust/optim.hpp"

namespace embedclust {

enum class Method { direct, raw, pca, autoencoder };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct KmeansConfig {
  std::size_t restarts = 10;
  std::size_t max_iter = 300;
  double tol = 1e-6;
};

// Hyperparameters of the contrastive embedding as they appear in config
// files; converted to a DirectEmbedderConfig when the experiment runs.
struct DirectConfig {
  std::size_t hidden_dim = 64;
  std::size_t embedding_dim = 16;
  double l2_coefficient = 1e-4;
  double margin = 1.0;
  DistanceKind distance = DistanceKind::euclidean;
  std::size_t epochs = 50;
  std::size_t batch_size = 20;
  std::size_t pairs_per_epoch = 0;  // 0: ten pairs per known sample
  double positive_fraction = 0.5;
  RmspropConfig optimizer;
};

struct PcaConfig {
  std::size_t n_components = 16;
};

struct ExperimentConfig {
  std::string dataset_path;
  SplitSpec split;
  Method method = Method::direct;
  DirectConfig direct;
  PcaConfig pca;
  AutoencoderConfig autoencoder;  // its seed field is derived from `seed`
  KmeansConfig kmeans;
  std::size_t k_clusters = 0;  // 0: number of unknown classes
  std::uint64_t seed = 0;
  std::string out_dir;
};

struct EvaluationReport {
  std::string method;
  double nmi = 0.0;
  double ri = 0.0;
  double ari = 0.0;
  std::size_t k_used = 0;
  std::size_t embedding_dim = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::string config_echo;  // config as JSON, without the output directory
};

// Full pipeline: load, split, fit on known classes, embed the unknowns,
// k-means, score against the true unknown labels. Writes report.json,
// assignments.csv, embeddings.csv, embeddings_2d.csv and (for trained
// methods) trainlog.csv under cfg.out_dir; partial outputs are removed if a
// stage fails, and the failing stage is named in the error. Deterministic
// under cfg.seed.
EvaluationReport run_experiment(const ExperimentConfig& cfg);

// Builds a fitted embedder for cfg.method, sub-seeded from cfg.seed.
std::unique_ptr<Embedder> make_embedder(const ExperimentConfig& cfg,
                                        const Dataset& known);

struct SweepEntry {
  std::size_t k = 0;
  bool ok = false;
  std::string error;
  EvaluationReport report;
};

// One direct-method experiment per requested embedding size, all sharing
// cfg.seed; per-size failures are recorded and the sweep continues. Writes
// <out_dir>/sweep.csv (`k,nmi,ari`) with the successful entries.
std::vector<SweepEntry> sweep_embedding_dim(const ExperimentConfig& cfg,
                                            const std::vector<std::size_t>& dims);

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

}  // namespace embedclust
