#pragma once

#include <memory>
#include <string>
#include <vector>

#include "embedclust/dataset.hpp"
#include "embedclust/linalg.hpp"
#include "embedclust/network.hpp"
#include "embedclust/optim.hpp"
#include "embedclust/trainer.hpp"

namespace embedclust {

// Common surface for every embedding method: fit on the known domain, then
// project arbitrary samples. transform never mutates the model.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual void fit(const Dataset& known) = 0;
  virtual Matrix transform(const Dataset& samples) const = 0;
  virtual std::size_t embedding_dim() const = 0;
  virtual std::string name() const = 0;
  virtual std::string to_json() const = 0;
  // Per-epoch loss curve for methods that train; nullptr otherwise.
  virtual const TrainLog* train_log() const { return nullptr; }
};

// ---------------------------------------------------------------------------
// PCA

struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // n_components x d, orthonormal rows, variance-descending
  std::vector<double> explained_variance_ratio;
};

// Centers on the row mean and keeps the top eigenvectors of the 1/(n-1)
// covariance. Requires n_components <= min(d, rows - 1).
PcaModel pca_fit(const Matrix& x, std::size_t n_components);
Matrix pca_transform(const PcaModel& model, const Matrix& x);

// ---------------------------------------------------------------------------
// Embedders

class RawEmbedder final : public Embedder {
 public:
  void fit(const Dataset& known) override;
  Matrix transform(const Dataset& samples) const override;
  std::size_t embedding_dim() const override { return dimension_; }
  std::string name() const override { return "raw"; }
  std::string to_json() const override;

 private:
  friend std::unique_ptr<Embedder> embedder_from_json(const std::string&);
  std::size_t dimension_ = 0;
};

class PcaEmbedder final : public Embedder {
 public:
  explicit PcaEmbedder(std::size_t n_components)
      : n_components_(n_components) {}
  void fit(const Dataset& known) override;
  Matrix transform(const Dataset& samples) const override;
  std::size_t embedding_dim() const override { return n_components_; }
  std::string name() const override { return "pca"; }
  std::string to_json() const override;
  const PcaModel& model() const { return model_; }

 private:
  friend std::unique_ptr<Embedder> embedder_from_json(const std::string&);
  std::size_t n_components_;
  PcaModel model_;
};

struct AutoencoderConfig {
  std::size_t hidden_dim = 64;
  std::size_t bottleneck_dim = 16;
  std::size_t epochs = 50;
  std::size_t batch_size = 20;
  RmspropConfig optimizer;
  std::uint64_t seed = 0;
};

// Sigmoid stack d -> hidden -> bottleneck -> hidden -> d trained with
// binary cross entropy on min-max scaled features; the embedding is the
// bottleneck activation.
class AutoencoderEmbedder final : public Embedder {
 public:
  explicit AutoencoderEmbedder(AutoencoderConfig cfg) : cfg_(cfg) {}
  void fit(const Dataset& known) override;
  Matrix transform(const Dataset& samples) const override;
  std::size_t embedding_dim() const override { return cfg_.bottleneck_dim; }
  std::string name() const override { return "autoencoder"; }
  std::string to_json() const override;
  const TrainLog* train_log() const override { return &log_; }

  // Per-feature [0,1] scaling learned at fit; constant features map to 0.
  Matrix scale_features(const Matrix& x) const;
  Matrix unscale_features(const Matrix& x) const;

 private:
  friend std::unique_ptr<Embedder> embedder_from_json(const std::string&);
  AutoencoderConfig cfg_;
  Network net_;
  Network encoder_;
  std::vector<double> feature_min_;
  std::vector<double> feature_max_;
  TrainLog log_;
};

AutoencoderEmbedder autoencoder_fit(const Dataset& known,
                                    const AutoencoderConfig& cfg);

struct DirectEmbedderConfig {
  std::size_t hidden_dim = 64;
  std::size_t embedding_dim = 16;
  double hidden_l2 = 1e-4;
  TrainConfig train;  // train.seed drives initialization and pair sampling
};

// The trained contrastive embedding behind the shared Embedder surface.
class DirectEmbedder final : public Embedder {
 public:
  explicit DirectEmbedder(DirectEmbedderConfig cfg) : cfg_(std::move(cfg)) {}
  void fit(const Dataset& known) override;
  Matrix transform(const Dataset& samples) const override;
  std::size_t embedding_dim() const override { return cfg_.embedding_dim; }
  std::string name() const override { return "direct"; }
  std::string to_json() const override;
  const TrainLog* train_log() const override { return &log_; }
  const Network& network() const { return net_; }

 private:
  friend std::unique_ptr<Embedder> embedder_from_json(const std::string&);
  DirectEmbedderConfig cfg_;
  Network net_;
  TrainLog log_;
};

// Round-trips any fitted embedder through its JSON form (tagged by "kind").
std::unique_ptr<Embedder> embedder_from_json(const std::string& text);
void save_embedder(const Embedder& embedder, const std::string& path);
std::unique_ptr<Embedder> load_embedder(const std::string& path);

}  // namespace embedclust
