#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fishergen/array.hpp"
#include "fishergen/metric.hpp"
#include "fishergen/mlp.hpp"
#include "fishergen/model.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

/// Objective value split into its additive terms. Constants are dropped, so
/// totals can be negative once xi_n < 0.
///
/// FisherNet: latent = Σ‖z*‖²/2, recon = Σ exp(−xi)‖d − f(z*)‖²/2,
/// noise_logdet = b·k·xi/2, noise_prior = (b/p)·xi²/2.
/// Baseline VAE: latent = Σ (‖mu‖² + Σexp(logvar) − Σlogvar)/2,
/// recon = Σ‖d − f(z)‖²/2, both noise terms zero.
struct LossBreakdown {
  double total = 0.0;
  double latent_term = 0.0;
  double recon_term = 0.0;
  double noise_logdet_term = 0.0;
  double noise_prior_term = 0.0;
  /// (1/k)‖d_i − f(z_i)‖² per batch row.
  std::vector<double> per_sample_mse;
};

/// FisherNet objective for one batch with one sampled latent per row.
/// `p_total` is the dataset size used to weight the xi_n prior by b/p.
LossBreakdown fisher_kl(const GenerativeModel& model, const DenseArray& batch,
                        const DenseArray& z_stars, std::size_t p_total);

/// Standard ELBO with unit noise; z = mu + exp(logvar/2) ⊙ eps.
LossBreakdown vae_elbo(const GenerativeModel& model, const DenseArray& batch,
                       const DenseArray& mu, const DenseArray& logvar, const DenseArray& eps);

struct ObjectiveResult {
  LossBreakdown loss;
  /// Same layout as model.params(); xi_n slot holds d/dxi_n.
  ParamStore grads;
};

/// fisher_kl at z* = g_phi(d) + offset and its gradient. Offsets are treated
/// as constants: gradients reach mu only through the additive mean and the
/// decoder evaluation.
ObjectiveResult fisher_objective(const GenerativeModel& model, const DenseArray& batch,
                                 const DenseArray& offsets, std::size_t p_total);

/// vae_elbo with mu/logvar from the encoder and reparametrized noise eps.
ObjectiveResult vae_objective(const GenerativeModel& model, const DenseArray& batch,
                              const DenseArray& eps);

struct SamplingOptions {
  CgSettings cg;
  /// Called once per datum after its CG solve (FisherNet only).
  std::function<void(const CgReport&)> on_cg;
};

/// Draw the per-datum noise from `rng` in row order and evaluate the variant's
/// objective. FisherNet: one metric sample per row; baseline: one eps per row.
/// Throws NumericalError for non-converged CG solves or non-finite results.
ObjectiveResult backprop_objective(const GenerativeModel& model, const DenseArray& batch,
                                   std::size_t p_total, CounterRng& rng,
                                   const SamplingOptions& options = {});

/// Per-row FisherNet offsets r_i = M(mu_i)⁻¹(Jᵀn* + eta*), drawn in row order.
DenseArray draw_fisher_offsets(const GenerativeModel& model, const DenseArray& mu,
                               CounterRng& rng, const SamplingOptions& options);

}  // namespace fishergen
