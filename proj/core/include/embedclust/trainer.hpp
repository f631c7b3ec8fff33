#pragma once

#include <cstdint>

#include "embedclust/dataset.hpp"
#include "embedclust/loss.hpp"
#include "embedclust/network.hpp"
#include "embedclust/optim.hpp"

namespace embedclust {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 20;
  std::size_t pairs_per_epoch = 0;  // 0 means 10x the training-set size
  double positive_fraction = 0.5;
  ContrastiveConfig contrastive;
  RmspropConfig optimizer;
  std::uint64_t seed = 0;

  std::size_t resolved_pairs_per_epoch(std::size_t n_samples) const;
  void validate(std::size_t n_samples) const;
};

struct TrainLog {
  std::vector<double> mean_loss;  // one entry per epoch
  std::vector<double> seconds;
};

// CSV: epoch,mean_loss,seconds
void save_csv(const TrainLog& log, const std::string& path);

// Single backward pass of one training pair through both shared-weight
// branches: data-term gradients only, both branches summed. The L2 term is
// added separately, once per optimizer step.
struct PairGradient {
  double loss = 0.0;
  Gradients grads;
};
PairGradient pair_gradient(const Network& net, const ContrastiveConfig& cfg,
                           const LabeledPair& pair, const Dataset& ds);

// Pairwise training: each epoch draws a fresh pair set, batches it, averages
// the per-pair gradients, adds the L2 gradient once per batch and applies one
// optimizer step per batch. Deterministic under cfg.seed. Mutates net.
TrainLog train(Network& net, const Dataset& known, const TrainConfig& cfg);

// Row m is the network output for sample m; dataset order preserved.
Matrix embed_all(const Network& net, const Dataset& ds);

// Same, but over raw feature rows.
Matrix embed_matrix(const Network& net, const Matrix& rows);

}  // namespace embedclust
