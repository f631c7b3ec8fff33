#include "embedclust/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "embedclust/error.hpp"
#include "embedclust/format.hpp"

namespace embedclust {

std::size_t TrainConfig::resolved_pairs_per_epoch(std::size_t n_samples) const {
  return pairs_per_epoch > 0 ? pairs_per_epoch : 10 * n_samples;
}

void TrainConfig::validate(std::size_t n_samples) const {
  if (epochs < 1) {
    throw ValidationError("train: epochs must be >= 1");
  }
  if (batch_size < 1) {
    throw ValidationError("train: batch_size must be >= 1");
  }
  if (positive_fraction < 0.0 || positive_fraction > 1.0) {
    throw ValidationError("train: positive_fraction must be in [0,1]");
  }
  if (resolved_pairs_per_epoch(n_samples) < batch_size) {
    throw ValidationError("train: pairs_per_epoch must be >= batch_size");
  }
}

void save_csv(const TrainLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write train log: " + path);
  }
  out << "epoch,mean_loss,seconds\n";
  for (std::size_t e = 0; e < log.mean_loss.size(); ++e) {
    out << e << ',' << format_double(log.mean_loss[e]) << ','
        << format_double(log.seconds[e]) << '\n';
  }
  if (!out) {
    throw IoError("failed writing train log: " + path);
  }
}

PairGradient pair_gradient(const Network& net, const ContrastiveConfig& cfg,
                           const LabeledPair& pair, const Dataset& ds) {
  const ForwardTrace t1 = forward(net, ds.samples[pair.first_index].features);
  const ForwardTrace t2 = forward(net, ds.samples[pair.second_index].features);
  const ContrastiveResult loss =
      contrastive_loss(cfg, pair.y, t1.output(), t2.output());

  PairGradient out;
  out.loss = loss.loss;
  out.grads = backward(net, t1, loss.dz1, /*include_l2=*/false);
  out.grads.add(backward(net, t2, loss.dz2, /*include_l2=*/false));
  return out;
}

TrainLog train(Network& net, const Dataset& known, const TrainConfig& cfg) {
  cfg.validate(known.size());
  if (known.dimension != net.input_dim()) {
    throw ShapeError("train: dataset dimension " +
                     std::to_string(known.dimension) +
                     ", network expects " + std::to_string(net.input_dim()));
  }
  if (known.n_classes() < 2) {
    throw ValidationError("train: need at least 2 classes");
  }

  const std::size_t n_pairs = cfg.resolved_pairs_per_epoch(known.size());
  Rng pair_rng(derive_seed(cfg.seed, "pairs"));
  RmspropState opt = RmspropState::create(cfg.optimizer, net);

  TrainLog log;
  log.mean_loss.reserve(cfg.epochs);
  log.seconds.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<LabeledPair> pairs =
        sample_pairs(known, n_pairs, cfg.positive_fraction, pair_rng);

    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < pairs.size();
         begin += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(begin + cfg.batch_size, pairs.size());
      const std::size_t batch = end - begin;

      Gradients acc = Gradients::zeros_like(net);
      double batch_loss = 0.0;
      for (std::size_t p = begin; p < end; ++p) {
        PairGradient pg = pair_gradient(net, cfg.contrastive, pairs[p], known);
        batch_loss += pg.loss;
        acc.add(pg.grads);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("train: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      epoch_loss += batch_loss;
      acc.scale(1.0 / static_cast<double>(batch));
      add_l2_gradients(net, acc);
      step(opt, net, acc);
    }

    log.mean_loss.push_back(epoch_loss / static_cast<double>(pairs.size()));
    log.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count());
  }
  return log;
}

Matrix embed_all(const Network& net, const Dataset& ds) {
  if (ds.dimension != net.input_dim()) {
    throw ShapeError("embed_all: dataset dimension " +
                     std::to_string(ds.dimension) + ", network expects " +
                     std::to_string(net.input_dim()));
  }
  Matrix out(ds.size(), net.output_dim());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const ForwardTrace trace = forward(net, ds.samples[i].features);
    std::copy(trace.output().begin(), trace.output().end(),
              out.row(i).begin());
  }
  return out;
}

Matrix embed_matrix(const Network& net, const Matrix& rows) {
  if (rows.cols != net.input_dim()) {
    throw ShapeError("embed_matrix: input width " + std::to_string(rows.cols) +
                     ", network expects " + std::to_string(net.input_dim()));
  }
  Matrix out(rows.rows, net.output_dim());
  for (std::size_t i = 0; i < rows.rows; ++i) {
    const ForwardTrace trace = forward(net, rows.row(i));
    std::copy(trace.output().begin(), trace.output().end(),
              out.row(i).begin());
  }
  return out;
}

}  // namespace embedclust
