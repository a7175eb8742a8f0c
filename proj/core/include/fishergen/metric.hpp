#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fishergen/array.hpp"
#include "fishergen/mlp.hpp"
#include "fishergen/model.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

struct CgSettings {
  double tolerance = 1e-6;
  /// 0 selects 5 · dimension.
  std::size_t max_iter = 0;
};

struct CgReport {
  std::size_t iterations = 0;
  /// ‖A x − b‖ / ‖b‖, recomputed from x rather than the recursion.
  double final_relative_residual = 0.0;
  bool converged = false;
};

struct CgSolution {
  std::vector<double> x;
  CgReport report;
};

/// y = A x for a symmetric positive definite A.
using MatVec = std::function<void(std::span<const double> x, std::span<double> y)>;

/// Unpreconditioned conjugate gradients from a zero initial guess.
/// Throws NumericalError when pᵀAp <= 0 (operator not SPD).
CgSolution cg_solve(const MatVec& matvec, std::span<const double> b, const CgSettings& settings);

/// v ↦ M(mu) v = Jᵀ (J v) / sigma² + v, with J the decoder Jacobian at mu.
///
/// Matrix-free: one dual-number JVP and one reverse pass per product. The
/// operator keeps references to the decoder spec and layers, which must
/// outlive it.
class MetricOperator {
 public:
  MetricOperator(const MlpSpec& decoder, LayerSpan layers, DenseArray mu, double sigma2);
  /// Anchored on a model's decoder with sigma² = exp(xi_n).
  MetricOperator(const GenerativeModel& model, DenseArray mu);

  std::size_t latent_dim() const { return mu_.size(); }
  std::size_t data_dim() const { return decoder_->output_width(); }
  const DenseArray& mu() const { return mu_; }
  double sigma2() const { return sigma2_; }

  void apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> v) const;

  /// Jᵀ n for a data-space vector n.
  std::vector<double> adjoint_jacobian(std::span<const double> n) const;

  MatVec as_matvec() const;

 private:
  const MlpSpec* decoder_;
  LayerSpan layers_;
  DenseArray mu_;
  double sigma2_;
  Tape tape_;
};

struct LatentSample {
  /// z* = mu + r.
  DenseArray z;
  /// r = M⁻¹ (Jᵀ n* + eta*); zero-mean with covariance M⁻¹.
  DenseArray offset;
  CgReport report;
};

/// Deterministic part of the sampler for given partial samples: n* in data
/// space (already carrying covariance sigma⁻²) and eta* in latent space.
LatentSample latent_sample_from_noise(const MetricOperator& op, std::span<const double> n_star,
                                      std::span<const double> eta_star,
                                      const CgSettings& settings);

/// Draw z* ~ N(mu, M(mu)⁻¹). Consumes data_dim normals for n* then latent_dim
/// normals for eta*. Non-convergence is reported, not thrown.
LatentSample draw_latent_sample(const MetricOperator& op, CounterRng& rng,
                                const CgSettings& settings);

}  // namespace fishergen
