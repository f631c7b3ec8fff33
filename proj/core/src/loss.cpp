#include "embedclust/loss.hpp"

#include <cmath>

#include "embedclust/error.hpp"
#include "embedclust/linalg.hpp"

namespace embedclust {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b,
                   const char* who) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(who) + ": length mismatch, " +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

// Distance and its gradients w.r.t. both arguments in one pass.
struct DistanceGrad {
  double value = 0.0;
  std::vector<double> da;
  std::vector<double> db;
};

DistanceGrad euclidean_with_grad(std::span<const double> a,
                                 std::span<const double> b) {
  DistanceGrad out;
  out.da.assign(a.size(), 0.0);
  out.db.assign(a.size(), 0.0);
  out.value = std::sqrt(squared_distance(a, b));
  if (out.value > 0.0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double g = (a[i] - b[i]) / out.value;
      out.da[i] = g;
      out.db[i] = -g;
    }
  }
  return out;
}

DistanceGrad cosine_with_grad(std::span<const double> a,
                              std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw DomainError("cosine distance: zero vector");
  }
  const double s = dot(a, b);
  const double c = s / (na * nb);
  DistanceGrad out;
  out.value = 1.0 - c;
  out.da.resize(a.size());
  out.db.resize(a.size());
  // d(1 - cos)/da = cos * a / ||a||^2 - b / (||a|| ||b||), symmetrically for b.
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.da[i] = c * a[i] / (na * na) - b[i] / (na * nb);
    out.db[i] = c * b[i] / (nb * nb) - a[i] / (na * nb);
  }
  return out;
}

DistanceGrad distance_with_grad(DistanceKind kind, std::span<const double> a,
                                std::span<const double> b) {
  check_lengths(a, b, "distance");
  return kind == DistanceKind::euclidean ? euclidean_with_grad(a, b)
                                         : cosine_with_grad(a, b);
}

}  // namespace

std::string to_string(DistanceKind kind) {
  return kind == DistanceKind::euclidean ? "euclidean" : "cosine";
}

DistanceKind distance_kind_from_string(const std::string& name) {
  if (name == "euclidean") return DistanceKind::euclidean;
  if (name == "cosine") return DistanceKind::cosine;
  throw ValidationError("unknown distance: '" + name + "'");
}

double distance(DistanceKind kind, std::span<const double> a,
                std::span<const double> b) {
  check_lengths(a, b, "distance");
  if (kind == DistanceKind::euclidean) {
    return std::sqrt(squared_distance(a, b));
  }
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw DomainError("cosine distance: zero vector");
  }
  return 1.0 - dot(a, b) / (na * nb);
}

ContrastiveResult contrastive_loss(const ContrastiveConfig& cfg, int y,
                                   std::span<const double> z1,
                                   std::span<const double> z2) {
  if (cfg.margin <= 0.0) {
    throw ValidationError("contrastive_loss: margin must be positive");
  }
  if (y != 0 && y != 1) {
    throw ValidationError("contrastive_loss: y must be 0 or 1");
  }
  const DistanceGrad d = distance_with_grad(cfg.distance, z1, z2);

  ContrastiveResult out;
  if (y == 1) {
    out.loss = d.value;
    out.dz1 = d.da;
    out.dz2 = d.db;
    return out;
  }
  const double hinge = cfg.margin - d.value;
  if (hinge > 0.0) {
    out.loss = hinge;
    out.dz1.resize(z1.size());
    out.dz2.resize(z2.size());
    for (std::size_t i = 0; i < z1.size(); ++i) {
      out.dz1[i] = -d.da[i];
      out.dz2[i] = -d.db[i];
    }
  } else {
    out.loss = 0.0;
    out.dz1.assign(z1.size(), 0.0);
    out.dz2.assign(z2.size(), 0.0);
  }
  return out;
}

BceResult bce_loss(std::span<const double> target,
                   std::span<const double> prediction) {
  check_lengths(target, prediction, "bce_loss");
  if (target.empty()) {
    throw ValidationError("bce_loss: empty vectors");
  }
  const double n = static_cast<double>(target.size());
  BceResult out;
  out.dprediction.resize(target.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double t = target[i];
    const double p = prediction[i];
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("bce_loss: prediction " + std::to_string(p) +
                        " outside (0,1)");
    }
    if (t < 0.0 || t > 1.0) {
      throw DomainError("bce_loss: target " + std::to_string(t) +
                        " outside [0,1]");
    }
    acc -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    out.dprediction[i] = (-t / p + (1.0 - t) / (1.0 - p)) / n;
  }
  out.loss = acc / n;
  return out;
}

}  // namespace embedclust
