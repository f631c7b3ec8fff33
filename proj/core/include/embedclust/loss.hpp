#pragma once

#include <span>
#include <string>
#include <vector>

namespace embedclust {

enum class DistanceKind { euclidean, cosine };

std::string to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& name);

struct ContrastiveConfig {
  double margin = 1.0;
  DistanceKind distance = DistanceKind::euclidean;
};

// euclidean: ||a - b||; cosine: 1 - a.b/(||a|| ||b||). Cosine requires both
// vectors nonzero.
double distance(DistanceKind kind, std::span<const double> a,
                std::span<const double> b);

struct ContrastiveResult {
  double loss = 0.0;
  std::vector<double> dz1;
  std::vector<double> dz2;
};

// Pairwise objective: y*d + (1-y)*max(0, m - d). Gradients are exact
// subgradients, with 0 chosen at the hinge kink and at d = 0.
ContrastiveResult contrastive_loss(const ContrastiveConfig& cfg, int y,
                                   std::span<const double> z1,
                                   std::span<const double> z2);

struct BceResult {
  double loss = 0.0;
  std::vector<double> dprediction;
};

// Mean over dimensions of -[t ln p + (1-t) ln(1-p)]. Predictions must lie
// strictly inside (0, 1); targets in [0, 1].
BceResult bce_loss(std::span<const double> target,
                   std::span<const double> prediction);

}  // namespace embedclust
