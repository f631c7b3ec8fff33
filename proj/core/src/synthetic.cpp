#include "embedclust/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "embedclust/error.hpp"

namespace embedclust {

std::string to_string(Warp warp) {
  return warp == Warp::none ? "none" : "random_relu_mix";
}

Warp warp_from_string(const std::string& name) {
  if (name == "none") return Warp::none;
  if (name == "random_relu_mix") return Warp::random_relu_mix;
  throw ValidationError("unknown warp: '" + name + "'");
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_classes < 2) {
    throw ValidationError("generate_synthetic: need at least 2 classes");
  }
  if (cfg.per_class < 1) {
    throw ValidationError("generate_synthetic: per_class must be positive");
  }
  if (cfg.latent_dim < 1) {
    throw ValidationError("generate_synthetic: latent_dim must be positive");
  }
  if (cfg.ambient_dim < cfg.latent_dim) {
    throw ValidationError("generate_synthetic: ambient_dim " +
                          std::to_string(cfg.ambient_dim) +
                          " smaller than latent_dim " +
                          std::to_string(cfg.latent_dim));
  }

  // Class centers on the radius sphere. The first latent_dim+1 are regular
  // simplex vertices: they span every latent direction, so each direction
  // separates some pair of low-numbered classes. Later centers are
  // renormalized 70/30 mixtures of vertex pairs, inside the positive span of
  // the early centers and each dominated by one parent vertex; once the pair
  // cycle is exhausted they fall back to random directions.
  Rng center_rng(derive_seed(cfg.seed, "centers"));
  const double d = static_cast<double>(cfg.latent_dim);
  const std::size_t n_vertices = cfg.latent_dim + 1;
  Matrix simplex(n_vertices, cfg.latent_dim);
  {
    const double diag = std::sqrt(1.0 + 1.0 / d);
    const double offset = -(std::sqrt(d + 1.0) + 1.0) / (d * std::sqrt(d));
    for (std::size_t i = 0; i < cfg.latent_dim; ++i) {
      for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
        simplex(i, j) = offset;
      }
      simplex(i, i) += diag;
    }
    for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
      simplex(cfg.latent_dim, j) = 1.0 / std::sqrt(d);
    }
  }
  Matrix centers(cfg.n_classes, cfg.latent_dim);
  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    auto row = centers.row(c);
    if (c < n_vertices) {
      for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
        row[j] = cfg.center_radius * simplex(c, j);
      }
    } else if (c < 2 * n_vertices) {
      const std::size_t p = c - n_vertices;
      const std::size_t a = (2 * p) % n_vertices;
      const std::size_t b = (2 * p + 1) % n_vertices;
      double sq = 0.0;
      for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
        row[j] = 0.7 * simplex(a, j) + 0.3 * simplex(b, j);
        sq += row[j] * row[j];
      }
      const double n = std::sqrt(sq);
      for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
        row[j] = row[j] / n * cfg.center_radius;
      }
    } else {
      double sq = 0.0;
      for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
        row[j] = center_rng.normal();
        sq += row[j] * row[j];
      }
      const double n = std::sqrt(sq);
      for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
        row[j] = n > 0.0 ? row[j] / n * cfg.center_radius : cfg.center_radius;
      }
    }
  }

  // Fixed warp parameters, independent of the sample stream. The latent
  // directions get a deterministic log-ladder of gains before an iid random
  // mix: with many more ambient than latent dimensions the mix is close to
  // an isometry, so ambient Euclidean distance behaves like the gain-skewed
  // latent metric. The dominant directions drown out the rest for any fixed
  // metric, while a learned affine reweighting can undo the skew.
  Matrix mix;
  std::vector<double> offset;
  std::vector<double> latent_gain;
  if (cfg.warp == Warp::random_relu_mix) {
    Rng warp_rng(derive_seed(cfg.seed, "warp"));
    latent_gain.resize(cfg.latent_dim);
    double mean_sq_gain = 0.0;
    for (std::size_t i = 0; i < cfg.latent_dim; ++i) {
      const double t = cfg.latent_dim > 1
                           ? 2.0 * static_cast<double>(i) /
                                     static_cast<double>(cfg.latent_dim - 1) -
                                 1.0
                           : 0.0;
      latent_gain[i] = std::pow(10.0, cfg.gain_log10_spread * t);
      mean_sq_gain += latent_gain[i] * latent_gain[i];
    }
    mean_sq_gain /= static_cast<double>(cfg.latent_dim);

    mix = Matrix(cfg.ambient_dim, cfg.latent_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.latent_dim));
    for (double& v : mix.data) {
      v = warp_rng.normal() * scale;
    }
    // Normalize pre-activations to unit spread across classes, then bias the
    // hinges positive: most units stay active over the data, so class
    // geometry survives into ambient space, while the tails still fold.
    // k-means is scale-invariant, so the normalization only conditions the
    // features, it does not change the clustering problem.
    const double pre_sigma = cfg.center_radius * std::sqrt(mean_sq_gain) /
                             std::sqrt(static_cast<double>(cfg.latent_dim));
    for (double& v : mix.data) {
      v /= pre_sigma;
    }
    offset.resize(cfg.ambient_dim);
    for (double& v : offset) {
      v = warp_rng.normal() + cfg.hinge_offset_shift;
    }
  }

  Rng noise_rng(derive_seed(cfg.seed, "noise"));
  Dataset ds;
  ds.dimension = cfg.ambient_dim;
  ds.samples.reserve(cfg.n_classes * cfg.per_class);
  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    ds.class_names.push_back("class" + std::to_string(c));
  }

  std::vector<double> latent(cfg.latent_dim);
  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    for (std::size_t s = 0; s < cfg.per_class; ++s) {
      for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
        latent[j] = centers(c, j) + cfg.noise_sigma * noise_rng.normal();
      }
      Sample sample;
      sample.class_id = static_cast<int>(c);
      sample.class_name = ds.class_names[c];
      sample.features.assign(cfg.ambient_dim, 0.0);
      if (cfg.warp == Warp::none) {
        std::copy(latent.begin(), latent.end(), sample.features.begin());
      } else {
        for (std::size_t a = 0; a < cfg.ambient_dim; ++a) {
          double pre = offset[a];
          for (std::size_t j = 0; j < cfg.latent_dim; ++j) {
            pre += mix(a, j) * latent_gain[j] * latent[j];
          }
          sample.features[a] = pre > 0.0 ? pre : 0.0;
        }
      }
      ds.samples.push_back(std::move(sample));
    }
  }
  return ds;
}

}  // namespace embedclust
