#pragma once

#include <cstdint>
#include <string>

#include "embedclust/dataset.hpp"

namespace embedclust {

enum class Warp { none, random_relu_mix };

std::string to_string(Warp warp);
Warp warp_from_string(const std::string& name);

// Labeled Gaussian blobs in a low-dimensional latent space, optionally pushed
// through a fixed random one-hidden-layer nonlinearity into ambient space.
// Class centers sit on the radius sphere: regular simplex vertices first,
// then renormalized 70/30 mixtures of vertex pairs, then random directions.
// With warp=random_relu_mix each ambient coordinate is relu(w_a . (g * z) +
// b_a): an iid random mix of the latent coordinates after a deterministic
// log-ladder of per-direction gains spanning 10^+-gain_log10_spread, with
// positively biased hinges. The gain skew dominates ambient Euclidean
// distances and the hinge tails fold them, scattering classes for any fixed
// metric while leaving them recoverable by a learned reweighting. warp=none
// zero-pads the latent coordinates into ambient space.
struct SyntheticConfig {
  std::size_t n_classes = 8;
  std::size_t per_class = 200;
  std::size_t latent_dim = 4;
  std::size_t ambient_dim = 32;
  Warp warp = Warp::random_relu_mix;
  std::uint64_t seed = 0;
  double center_radius = 5.0;
  double noise_sigma = 1.0;
  double gain_log10_spread = 0.75;
  double hinge_offset_shift = 3.0;
};

Dataset generate_synthetic(const SyntheticConfig& cfg);

}  // namespace embedclust
