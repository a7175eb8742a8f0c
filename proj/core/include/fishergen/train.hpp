#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "fishergen/adam.hpp"
#include "fishergen/checkpoint.hpp"
#include "fishergen/config.hpp"
#include "fishergen/data.hpp"
#include "fishergen/loss.hpp"
#include "fishergen/model.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

/// One line of the metrics stream. Loss terms are epoch sums over batches
/// divided by the training set size (per-datum values). train_mse is the mean
/// per-sample MSE of the sampled reconstructions seen during the epoch.
struct EpochMetrics {
  std::uint64_t epoch = 0;  // 1-based
  double loss_total = 0.0;
  double loss_recon = 0.0;
  double loss_latent = 0.0;
  double loss_noise_logdet = 0.0;
  double loss_noise_prior = 0.0;
  double train_mse = 0.0;
  double seconds = 0.0;
};

/// JSON object with exactly the keys epoch, loss_total, loss_recon,
/// loss_latent, loss_noise_logdet, loss_noise_prior, train_mse, seconds.
std::string to_json_line(const EpochMetrics& metrics);
/// Same record without the wall-clock `seconds` field.
std::string to_json_line_without_time(const EpochMetrics& metrics);

struct TrainingState {
  GenerativeModel model;
  AdamState adam;
  std::uint64_t epoch = 0;  // completed epochs
  CounterRng rng;
};

/// Fresh model for `data_dim` inputs, weights drawn from CounterRng(seed).
TrainingState initialize_training(const RunConfig& config, std::size_t data_dim);

TrainingState state_from_checkpoint(const Checkpoint& checkpoint);
Checkpoint to_checkpoint(const RunConfig& config, const TrainingState& state);

struct TrainHooks {
  std::function<void(const CgReport&)> on_cg;
};

/// One pass over `train` in the (seed, epoch) batch order: per batch sample,
/// evaluate the objective and take one Adam step. Throws NumericalError on
/// divergence.
EpochMetrics train_epoch(TrainingState& state, const Dataset& train, const RunConfig& config,
                         const TrainHooks& hooks = {});

}  // namespace fishergen
