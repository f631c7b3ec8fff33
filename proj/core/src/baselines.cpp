#include "embedclust/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "embedclust/error.hpp"
#include "embedclust/loss.hpp"

namespace embedclust {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows[0].size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) {
      throw ParseError("embedder json: ragged matrix");
    }
    for (std::size_t j = 0; j < c; ++j) {
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// PCA

PcaModel pca_fit(const Matrix& x, std::size_t n_components) {
  if (x.rows < 2) {
    throw ValidationError("pca_fit: need at least 2 samples, have " +
                          std::to_string(x.rows));
  }
  const std::size_t d = x.cols;
  const std::size_t budget = std::min(d, x.rows - 1);
  if (n_components < 1 || n_components > budget) {
    throw ValidationError("pca_fit: n_components " +
                          std::to_string(n_components) +
                          " outside [1, " + std::to_string(budget) + "]");
  }

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      model.mean[j] += x(i, j);
    }
  }
  for (double& v : model.mean) {
    v /= static_cast<double>(x.rows);
  }

  // 1/(n-1) covariance, built symmetric by construction.
  Matrix cov(d, d);
  const double scale = 1.0 / static_cast<double>(x.rows - 1);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < x.rows; ++i) {
        acc += (x(i, a) - model.mean[a]) * (x(i, b) - model.mean[b]);
      }
      cov(a, b) = acc * scale;
      cov(b, a) = cov(a, b);
    }
  }

  const EigenResult eig = sym_eig(cov);
  const double total =
      std::accumulate(eig.eigenvalues.begin(), eig.eigenvalues.end(), 0.0);

  model.components = Matrix(n_components, d);
  model.explained_variance_ratio.resize(n_components);
  for (std::size_t c = 0; c < n_components; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      model.components(c, j) = eig.eigenvectors(j, c);
    }
    const double lambda = std::max(eig.eigenvalues[c], 0.0);
    model.explained_variance_ratio[c] = total > 0.0 ? lambda / total : 0.0;
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
  const std::size_t d = model.mean.size();
  if (x.cols != d) {
    throw ShapeError("pca_transform: input width " + std::to_string(x.cols) +
                     ", model expects " + std::to_string(d));
  }
  const std::size_t k = model.components.rows;
  Matrix out(x.rows, k);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        acc += (x(i, j) - model.mean[j]) * model.components(c, j);
      }
      out(i, c) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Raw

void RawEmbedder::fit(const Dataset& known) { dimension_ = known.dimension; }

Matrix RawEmbedder::transform(const Dataset& samples) const {
  if (samples.dimension != dimension_) {
    throw ShapeError("raw transform: dataset dimension " +
                     std::to_string(samples.dimension) + ", fitted on " +
                     std::to_string(dimension_));
  }
  return samples.feature_matrix();
}

std::string RawEmbedder::to_json() const {
  json doc;
  doc["kind"] = "raw";
  doc["dimension"] = dimension_;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// PCA embedder

void PcaEmbedder::fit(const Dataset& known) {
  model_ = pca_fit(known.feature_matrix(), n_components_);
}

Matrix PcaEmbedder::transform(const Dataset& samples) const {
  return pca_transform(model_, samples.feature_matrix());
}

std::string PcaEmbedder::to_json() const {
  json doc;
  doc["kind"] = "pca";
  doc["mean"] = model_.mean;
  doc["components"] = matrix_to_json(model_.components);
  doc["explained_variance_ratio"] = model_.explained_variance_ratio;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Autoencoder

Matrix AutoencoderEmbedder::scale_features(const Matrix& x) const {
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double span = feature_max_[j] - feature_min_[j];
      out(i, j) = span > 0.0 ? (x(i, j) - feature_min_[j]) / span : 0.0;
    }
  }
  return out;
}

Matrix AutoencoderEmbedder::unscale_features(const Matrix& x) const {
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double span = feature_max_[j] - feature_min_[j];
      out(i, j) = feature_min_[j] + x(i, j) * span;
    }
  }
  return out;
}

void AutoencoderEmbedder::fit(const Dataset& known) {
  if (known.size() < 1) {
    throw ValidationError("autoencoder fit: empty dataset");
  }
  if (cfg_.hidden_dim < 1 || cfg_.bottleneck_dim < 1 || cfg_.epochs < 1 ||
      cfg_.batch_size < 1) {
    throw ValidationError("autoencoder fit: sizes must be positive");
  }
  const std::size_t d = known.dimension;

  const Matrix features = known.feature_matrix();
  feature_min_.assign(d, std::numeric_limits<double>::infinity());
  feature_max_.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < features.rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      feature_min_[j] = std::min(feature_min_[j], features(i, j));
      feature_max_[j] = std::max(feature_max_[j], features(i, j));
    }
  }
  const Matrix scaled = scale_features(features);

  const std::vector<LayerSpec> specs = {
      {d, cfg_.hidden_dim, Activation::sigmoid, 0.0},
      {cfg_.hidden_dim, cfg_.bottleneck_dim, Activation::sigmoid, 0.0},
      {cfg_.bottleneck_dim, cfg_.hidden_dim, Activation::sigmoid, 0.0},
      {cfg_.hidden_dim, d, Activation::sigmoid, 0.0},
  };
  Rng init_rng(derive_seed(cfg_.seed, "init"));
  net_ = init(specs, init_rng);
  RmspropState opt = RmspropState::create(cfg_.optimizer, net_);
  Rng order_rng(derive_seed(cfg_.seed, "order"));

  log_ = TrainLog{};
  std::vector<std::size_t> order(scaled.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    order_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += cfg_.batch_size) {
      const std::size_t end =
          std::min(begin + cfg_.batch_size, order.size());
      Gradients acc = Gradients::zeros_like(net_);
      for (std::size_t p = begin; p < end; ++p) {
        const auto row = scaled.row(order[p]);
        const ForwardTrace trace = forward(net_, row);
        // Keep predictions strictly inside (0,1) against sigmoid underflow.
        std::vector<double> pred(trace.output());
        for (double& v : pred) {
          v = std::clamp(v, 1e-12, 1.0 - 1e-12);
        }
        const BceResult bce = bce_loss(row, pred);
        epoch_loss += bce.loss;
        acc.add(backward(net_, trace, bce.dprediction, false));
      }
      acc.scale(1.0 / static_cast<double>(end - begin));
      step(opt, net_, acc);
    }

    log_.mean_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    log_.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count());
  }

  encoder_ = Network{};
  encoder_.layers = {net_.layers[0], net_.layers[1]};
  encoder_.weights = {net_.weights[0], net_.weights[1]};
  encoder_.biases = {net_.biases[0], net_.biases[1]};
}

Matrix AutoencoderEmbedder::transform(const Dataset& samples) const {
  if (encoder_.layers.empty()) {
    throw ValidationError("autoencoder transform: not fitted");
  }
  return embed_matrix(encoder_, scale_features(samples.feature_matrix()));
}

std::string AutoencoderEmbedder::to_json() const {
  json doc;
  doc["kind"] = "autoencoder";
  doc["hidden_dim"] = cfg_.hidden_dim;
  doc["bottleneck_dim"] = cfg_.bottleneck_dim;
  doc["network"] = json::parse(network_to_json(net_));
  doc["feature_min"] = feature_min_;
  doc["feature_max"] = feature_max_;
  return doc.dump(2);
}

AutoencoderEmbedder autoencoder_fit(const Dataset& known,
                                    const AutoencoderConfig& cfg) {
  AutoencoderEmbedder embedder(cfg);
  embedder.fit(known);
  return embedder;
}

// ---------------------------------------------------------------------------
// Direct

void DirectEmbedder::fit(const Dataset& known) {
  if (cfg_.hidden_dim < 1 || cfg_.embedding_dim < 1) {
    throw ValidationError("direct fit: dimensions must be positive");
  }
  const std::vector<LayerSpec> specs = {
      {known.dimension, cfg_.hidden_dim, Activation::linear, cfg_.hidden_l2},
      {cfg_.hidden_dim, cfg_.embedding_dim, Activation::relu, 0.0},
  };
  Rng init_rng(derive_seed(cfg_.train.seed, "init"));
  net_ = init(specs, init_rng);
  log_ = train(net_, known, cfg_.train);
}

Matrix DirectEmbedder::transform(const Dataset& samples) const {
  if (net_.layers.empty()) {
    throw ValidationError("direct transform: not fitted");
  }
  return embed_all(net_, samples);
}

std::string DirectEmbedder::to_json() const {
  json doc;
  doc["kind"] = "direct";
  doc["network"] = json::parse(network_to_json(net_));
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Serialization round-trip

std::unique_ptr<Embedder> embedder_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("embedder json: ") + e.what());
  }
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "raw") {
      auto out = std::make_unique<RawEmbedder>();
      out->dimension_ = doc.at("dimension").get<std::size_t>();
      return out;
    }
    if (kind == "pca") {
      PcaModel model;
      model.mean = doc.at("mean").get<std::vector<double>>();
      model.components = matrix_from_json(doc.at("components"));
      model.explained_variance_ratio =
          doc.at("explained_variance_ratio").get<std::vector<double>>();
      auto out = std::make_unique<PcaEmbedder>(model.components.rows);
      out->model_ = std::move(model);
      return out;
    }
    if (kind == "autoencoder") {
      AutoencoderConfig cfg;
      cfg.hidden_dim = doc.at("hidden_dim").get<std::size_t>();
      cfg.bottleneck_dim = doc.at("bottleneck_dim").get<std::size_t>();
      auto out = std::make_unique<AutoencoderEmbedder>(cfg);
      out->net_ = network_from_json(doc.at("network").dump());
      out->feature_min_ = doc.at("feature_min").get<std::vector<double>>();
      out->feature_max_ = doc.at("feature_max").get<std::vector<double>>();
      out->encoder_ = Network{};
      out->encoder_.layers = {out->net_.layers[0], out->net_.layers[1]};
      out->encoder_.weights = {out->net_.weights[0], out->net_.weights[1]};
      out->encoder_.biases = {out->net_.biases[0], out->net_.biases[1]};
      return out;
    }
    if (kind == "direct") {
      const Network net = network_from_json(doc.at("network").dump());
      DirectEmbedderConfig cfg;
      cfg.hidden_dim = net.layers.front().output_dim;
      cfg.embedding_dim = net.output_dim();
      cfg.hidden_l2 = net.layers.front().l2_coefficient;
      auto out = std::make_unique<DirectEmbedder>(cfg);
      out->net_ = net;
      return out;
    }
    throw ValidationError("embedder json: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("embedder json: ") + e.what());
  }
}

void save_embedder(const Embedder& embedder, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write model file: " + path);
  }
  out << embedder.to_json() << '\n';
  if (!out) {
    throw IoError("failed writing model file: " + path);
  }
}

std::unique_ptr<Embedder> load_embedder(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open model file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return embedder_from_json(buffer.str());
}

}  // namespace embedclust
