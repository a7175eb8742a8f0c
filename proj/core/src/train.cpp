#include "fishergen/train.hpp"

#include <chrono>
#include <nlohmann/json.hpp>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {

nlohmann::ordered_json metrics_json(const EpochMetrics& m) {
  nlohmann::ordered_json j;
  j["epoch"] = m.epoch;
  j["loss_total"] = m.loss_total;
  j["loss_recon"] = m.loss_recon;
  j["loss_latent"] = m.loss_latent;
  j["loss_noise_logdet"] = m.loss_noise_logdet;
  j["loss_noise_prior"] = m.loss_noise_prior;
  j["train_mse"] = m.train_mse;
  return j;
}

}  // namespace

std::string to_json_line(const EpochMetrics& metrics) {
  nlohmann::ordered_json j = metrics_json(metrics);
  j["seconds"] = metrics.seconds;
  return j.dump();
}

std::string to_json_line_without_time(const EpochMetrics& metrics) {
  return metrics_json(metrics).dump();
}

TrainingState initialize_training(const RunConfig& config, std::size_t data_dim) {
  config.validate();
  CounterRng rng(config.seed);
  GenerativeModel model =
      build_architecture(config.latent_dim, data_dim, config.variant, config.architecture());
  initialize_weights(model, rng);
  return TrainingState{std::move(model), AdamState{}, 0, rng};
}

TrainingState state_from_checkpoint(const Checkpoint& checkpoint) {
  return TrainingState{checkpoint.model, checkpoint.adam, checkpoint.epoch,
                       CounterRng(checkpoint.rng)};
}

Checkpoint to_checkpoint(const RunConfig& config, const TrainingState& state) {
  return Checkpoint{config, state.model, state.adam, state.epoch, state.rng.state()};
}

EpochMetrics train_epoch(TrainingState& state, const Dataset& train, const RunConfig& config,
                         const TrainHooks& hooks) {
  const auto start = std::chrono::steady_clock::now();
  if (train.dim() != state.model.data_dim()) {
    throw ShapeError("train_epoch: data dimension " + std::to_string(train.dim()) +
                     " differs from model data dimension " +
                     std::to_string(state.model.data_dim()));
  }
  const std::size_t p = train.size();
  const AdamHyper hyper{config.learning_rate};
  SamplingOptions sampling;
  sampling.cg = CgSettings{config.cg_tol, config.resolved_cg_max_iter()};
  sampling.on_cg = hooks.on_cg;

  EpochMetrics m;
  double mse_sum = 0.0;
  for (const auto& indices : batch_iter(p, config.batch_size, config.seed, state.epoch)) {
    const DenseArray batch = train.gather(indices);
    ObjectiveResult obj = backprop_objective(state.model, batch, p, state.rng, sampling);
    bool finite = true;
    obj.grads.for_each_value([&](double& g) { finite = finite && std::isfinite(g); });
    if (!finite) throw NumericalError("training diverged: non-finite gradient");
    adam_step(state.model.params(), obj.grads, state.adam, hyper);
    if (!std::isfinite(state.model.xi_n()) || state.model.xi_n() > 700.0) {
      throw NumericalError("training diverged: xi_n = " + std::to_string(state.model.xi_n()));
    }
    m.loss_total += obj.loss.total;
    m.loss_recon += obj.loss.recon_term;
    m.loss_latent += obj.loss.latent_term;
    m.loss_noise_logdet += obj.loss.noise_logdet_term;
    m.loss_noise_prior += obj.loss.noise_prior_term;
    for (double e : obj.loss.per_sample_mse) mse_sum += e;
  }
  const double inv_p = p ? 1.0 / static_cast<double>(p) : 0.0;
  m.loss_total *= inv_p;
  m.loss_recon *= inv_p;
  m.loss_latent *= inv_p;
  m.loss_noise_logdet *= inv_p;
  m.loss_noise_prior *= inv_p;
  m.train_mse = mse_sum * inv_p;
  ++state.epoch;
  m.epoch = state.epoch;
  m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

}  // namespace fishergen
