#include "fishergen/loss.hpp"

#include <cmath>
#include <string>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {

void check_batch(const GenerativeModel& model, const DenseArray& batch) {
  if (batch.rank() != 2 || batch.cols() != model.data_dim()) {
    throw ShapeError("loss: batch must be [b, " + std::to_string(model.data_dim()) + "], got " +
                     batch.shape_string());
  }
}

void check_latent(const GenerativeModel& model, const DenseArray& batch, const DenseArray& z,
                  const char* what) {
  if (z.rank() != 2 || z.rows() != batch.rows() || z.cols() != model.latent_dim()) {
    throw ShapeError(std::string("loss: ") + what + " must be [b, " +
                     std::to_string(model.latent_dim()) + "], got " + z.shape_string());
  }
}

void check_finite(const LossBreakdown& loss) {
  if (!std::isfinite(loss.total)) throw NumericalError("loss: non-finite objective");
}

// Residual d − f(z) row by row, filling per-sample MSE; returns Σ‖d − f‖².
double residuals(const DenseArray& batch, const DenseArray& recon, DenseArray& resid,
                 std::vector<double>& per_sample_mse) {
  resid = DenseArray(batch.shape());
  per_sample_mse.assign(batch.rows(), 0.0);
  const double k = static_cast<double>(batch.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    auto d = batch.row(i);
    auto f = recon.row(i);
    auto r = resid.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      r[j] = d[j] - f[j];
      s += r[j] * r[j];
    }
    per_sample_mse[i] = s / k;
    total += s;
  }
  return total;
}

struct FisherPieces {
  LossBreakdown loss;
  DenseArray resid;
  Tape decoder_tape;
};

FisherPieces fisher_pieces(const GenerativeModel& model, const DenseArray& batch,
                           const DenseArray& z_stars, std::size_t p_total) {
  check_batch(model, batch);
  check_latent(model, batch, z_stars, "z_stars");
  const std::size_t b = batch.rows();
  if (p_total < b || p_total == 0) throw ShapeError("fisher_kl: p_total must be >= batch size");
  FisherPieces out;
  const double xi = model.xi_n();
  const double inv_sigma2 = 1.0 / noise_covariance_scalar(model);
  ForwardResult dec = forward(model.decoder_spec(), model.decoder_layers(), z_stars);
  const double sq = residuals(batch, dec.output, out.resid, out.loss.per_sample_mse);
  LossBreakdown& loss = out.loss;
  loss.latent_term = 0.5 * dot(z_stars.flat(), z_stars.flat());
  loss.recon_term = 0.5 * inv_sigma2 * sq;
  loss.noise_logdet_term =
      0.5 * static_cast<double>(b) * static_cast<double>(model.data_dim()) * xi;
  loss.noise_prior_term = 0.5 * (static_cast<double>(b) / static_cast<double>(p_total)) * xi * xi;
  loss.total = loss.latent_term + loss.recon_term + loss.noise_logdet_term + loss.noise_prior_term;
  check_finite(loss);
  out.decoder_tape = std::move(dec.tape);
  return out;
}

}  // namespace

LossBreakdown fisher_kl(const GenerativeModel& model, const DenseArray& batch,
                        const DenseArray& z_stars, std::size_t p_total) {
  return fisher_pieces(model, batch, z_stars, p_total).loss;
}

LossBreakdown vae_elbo(const GenerativeModel& model, const DenseArray& batch,
                       const DenseArray& mu, const DenseArray& logvar, const DenseArray& eps) {
  check_batch(model, batch);
  check_latent(model, batch, mu, "mu");
  check_latent(model, batch, logvar, "logvar");
  check_latent(model, batch, eps, "eps");
  DenseArray z(mu.shape());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = mu[i] + std::exp(0.5 * logvar[i]) * eps[i];
  const DenseArray recon = decode(model, z);
  LossBreakdown loss;
  DenseArray resid;
  const double sq = residuals(batch, recon, resid, loss.per_sample_mse);
  double latent = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    latent += mu[i] * mu[i] + std::exp(logvar[i]) - logvar[i];
  }
  loss.latent_term = 0.5 * latent;
  loss.recon_term = 0.5 * sq;
  loss.total = loss.latent_term + loss.recon_term;
  check_finite(loss);
  return loss;
}

ObjectiveResult fisher_objective(const GenerativeModel& model, const DenseArray& batch,
                                 const DenseArray& offsets, std::size_t p_total) {
  check_batch(model, batch);
  check_latent(model, batch, offsets, "offsets");
  if (model.variant() != Variant::FisherNet) {
    throw ShapeError("fisher_objective: model is not a FisherNet");
  }
  ObjectiveResult result;
  result.grads = model.params().zeros_like();

  ForwardResult enc = forward(model.encoder_spec(), model.encoder_layers(), batch);
  DenseArray z_stars = enc.output;
  for (std::size_t i = 0; i < z_stars.size(); ++i) z_stars[i] += offsets[i];

  FisherPieces pieces = fisher_pieces(model, batch, z_stars, p_total);
  const double xi = model.xi_n();
  const double inv_sigma2 = 1.0 / noise_covariance_scalar(model);

  // d total / d f(z*) = −sigma⁻² (d − f)
  DenseArray cot = pieces.resid;
  for (double& x : cot.values()) x *= -inv_sigma2;
  DenseArray grad_z;
  vjp_accumulate(model.decoder_spec(), model.decoder_layers(), pieces.decoder_tape, cot,
                 model.decoder_slice(result.grads), &grad_z);
  for (std::size_t i = 0; i < grad_z.size(); ++i) grad_z[i] += z_stars[i];
  vjp_accumulate(model.encoder_spec(), model.encoder_layers(), enc.tape, grad_z,
                 model.encoder_slice(result.grads), nullptr);

  const double b = static_cast<double>(batch.rows());
  const double k = static_cast<double>(model.data_dim());
  result.grads.xi_n = -pieces.loss.recon_term + 0.5 * b * k + (b / static_cast<double>(p_total)) * xi;
  result.loss = std::move(pieces.loss);
  return result;
}

ObjectiveResult vae_objective(const GenerativeModel& model, const DenseArray& batch,
                              const DenseArray& eps) {
  check_batch(model, batch);
  check_latent(model, batch, eps, "eps");
  if (model.variant() != Variant::BaselineVAE) {
    throw ShapeError("vae_objective: model is not a baseline VAE");
  }
  ObjectiveResult result;
  result.grads = model.params().zeros_like();
  const std::size_t latent = model.latent_dim();
  const std::size_t b = batch.rows();

  ForwardResult enc = forward(model.encoder_spec(), model.encoder_layers(), batch);
  DenseArray z({b, latent});
  DenseArray scale({b, latent});
  for (std::size_t i = 0; i < b; ++i) {
    auto head = enc.output.row(i);
    for (std::size_t j = 0; j < latent; ++j) {
      scale(i, j) = std::exp(0.5 * head[latent + j]);
      z(i, j) = head[j] + scale(i, j) * eps(i, j);
    }
  }
  ForwardResult dec = forward(model.decoder_spec(), model.decoder_layers(), z);
  LossBreakdown& loss = result.loss;
  DenseArray resid;
  const double sq = residuals(batch, dec.output, resid, loss.per_sample_mse);
  double latent_sum = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    auto head = enc.output.row(i);
    for (std::size_t j = 0; j < latent; ++j) {
      const double m = head[j];
      const double lv = head[latent + j];
      latent_sum += m * m + std::exp(lv) - lv;
    }
  }
  loss.latent_term = 0.5 * latent_sum;
  loss.recon_term = 0.5 * sq;
  loss.total = loss.latent_term + loss.recon_term;
  check_finite(loss);

  DenseArray cot = resid;
  for (double& x : cot.values()) x = -x;
  DenseArray grad_z;
  vjp_accumulate(model.decoder_spec(), model.decoder_layers(), dec.tape, cot,
                 model.decoder_slice(result.grads), &grad_z);
  DenseArray grad_head(enc.output.shape());
  for (std::size_t i = 0; i < b; ++i) {
    auto head = enc.output.row(i);
    for (std::size_t j = 0; j < latent; ++j) {
      const double lv = head[latent + j];
      grad_head(i, j) = head[j] + grad_z(i, j);
      grad_head(i, latent + j) =
          0.5 * (std::exp(lv) - 1.0) + 0.5 * grad_z(i, j) * eps(i, j) * scale(i, j);
    }
  }
  vjp_accumulate(model.encoder_spec(), model.encoder_layers(), enc.tape, grad_head,
                 model.encoder_slice(result.grads), nullptr);
  return result;
}

DenseArray draw_fisher_offsets(const GenerativeModel& model, const DenseArray& mu,
                               CounterRng& rng, const SamplingOptions& options) {
  const std::size_t latent = model.latent_dim();
  DenseArray offsets({mu.rows(), latent});
  const double sigma2 = noise_covariance_scalar(model);
  for (std::size_t i = 0; i < mu.rows(); ++i) {
    MetricOperator op(model.decoder_spec(), model.decoder_layers(),
                      DenseArray::vector(mu.row(i)), sigma2);
    LatentSample s = draw_latent_sample(op, rng, options.cg);
    if (options.on_cg) options.on_cg(s.report);
    if (!s.report.converged) {
      throw NumericalError("latent sampler: CG did not converge (relative residual " +
                           std::to_string(s.report.final_relative_residual) + " after " +
                           std::to_string(s.report.iterations) + " iterations)");
    }
    auto dst = offsets.row(i);
    for (std::size_t j = 0; j < latent; ++j) dst[j] = s.offset[j];
  }
  return offsets;
}

ObjectiveResult backprop_objective(const GenerativeModel& model, const DenseArray& batch,
                                   std::size_t p_total, CounterRng& rng,
                                   const SamplingOptions& options) {
  check_batch(model, batch);
  const std::size_t latent = model.latent_dim();
  if (model.variant() == Variant::FisherNet) {
    const Encoding enc = encode(model, batch);
    const DenseArray offsets = draw_fisher_offsets(model, enc.mu, rng, options);
    return fisher_objective(model, batch, offsets, p_total);
  }
  DenseArray eps({batch.rows(), latent});
  for (double& x : eps.values()) x = rng.normal();
  return vae_objective(model, batch, eps);
}

}  // namespace fishergen
