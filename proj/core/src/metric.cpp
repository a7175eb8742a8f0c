#include "fishergen/metric.hpp"

#include <cmath>
#include <string>

#include "fishergen/errors.hpp"

namespace fishergen {

CgSolution cg_solve(const MatVec& matvec, std::span<const double> b, const CgSettings& settings) {
  if (!(settings.tolerance > 0.0)) throw NumericalError("cg_solve: tolerance must be positive");
  const std::size_t n = b.size();
  const std::size_t max_iter = settings.max_iter == 0 ? 5 * n : settings.max_iter;
  CgSolution sol;
  sol.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (!std::isfinite(b_norm)) throw NumericalError("cg_solve: right-hand side not finite");
  if (b_norm == 0.0) {
    sol.report.converged = true;
    return sol;
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> p = r;
  std::vector<double> ap(n);
  double rr = dot(r, r);
  std::size_t it = 0;

  auto true_residual = [&]() {
    matvec(sol.x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    rr = dot(r, r);
    return std::sqrt(rr) / b_norm;
  };

  double rel = 1.0;
  while (it < max_iter) {
    matvec(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw NumericalError("cg_solve: breakdown, pᵀAp = " + std::to_string(pap) +
                           " (operator not positive definite)");
    }
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      sol.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++it;
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) / b_norm <= settings.tolerance) {
      rel = true_residual();
      if (rel <= settings.tolerance) break;
      // Recursion drifted from the true residual: restart from it.
      p = r;
      continue;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (it == max_iter) rel = true_residual();
  sol.report.iterations = it;
  sol.report.final_relative_residual = rel;
  sol.report.converged = rel <= settings.tolerance;
  return sol;
}

MetricOperator::MetricOperator(const MlpSpec& decoder, LayerSpan layers, DenseArray mu,
                               double sigma2)
    : decoder_(&decoder), layers_(layers), mu_(std::move(mu)), sigma2_(sigma2) {
  if (mu_.rank() != 1 || mu_.size() != decoder.input_width()) {
    throw ShapeError("MetricOperator: anchor must be a single latent vector of width " +
                     std::to_string(decoder.input_width()));
  }
  if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_)) {
    throw NumericalError("MetricOperator: noise variance must be positive and finite");
  }
  tape_ = forward(decoder, layers, mu_).tape;
}

MetricOperator::MetricOperator(const GenerativeModel& model, DenseArray mu)
    : MetricOperator(model.decoder_spec(), model.decoder_layers(), std::move(mu),
                     noise_covariance_scalar(model)) {}

void MetricOperator::apply(std::span<const double> v, std::span<double> out) const {
  if (v.size() != latent_dim() || out.size() != latent_dim()) {
    throw ShapeError("MetricOperator::apply: vector width mismatch");
  }
  DenseArray jv = jvp(*decoder_, layers_, mu_, DenseArray::vector(v));
  const double inv = 1.0 / sigma2_;
  for (double& x : jv.values()) x *= inv;
  const DenseArray back = vjp_input(*decoder_, layers_, tape_, jv);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = back[i] + v[i];
  for (double x : out) {
    if (!std::isfinite(x)) throw NumericalError("MetricOperator::apply: non-finite product");
  }
}

std::vector<double> MetricOperator::apply(std::span<const double> v) const {
  std::vector<double> out(v.size());
  apply(v, out);
  return out;
}

std::vector<double> MetricOperator::adjoint_jacobian(std::span<const double> n) const {
  if (n.size() != data_dim()) throw ShapeError("MetricOperator: data-space vector width mismatch");
  const DenseArray back = vjp_input(*decoder_, layers_, tape_, DenseArray::vector(n));
  return back.values();
}

MatVec MetricOperator::as_matvec() const {
  return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

LatentSample latent_sample_from_noise(const MetricOperator& op, std::span<const double> n_star,
                                      std::span<const double> eta_star,
                                      const CgSettings& settings) {
  if (eta_star.size() != op.latent_dim()) throw ShapeError("latent sample: eta* width mismatch");
  std::vector<double> rhs = op.adjoint_jacobian(n_star);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += eta_star[i];
  CgSolution sol = cg_solve(op.as_matvec(), rhs, settings);
  LatentSample s;
  s.offset = DenseArray({op.latent_dim()}, sol.x);
  s.z = op.mu();
  for (std::size_t i = 0; i < s.z.size(); ++i) s.z[i] += sol.x[i];
  s.report = sol.report;
  return s;
}

LatentSample draw_latent_sample(const MetricOperator& op, CounterRng& rng,
                                const CgSettings& settings) {
  const double inv_sigma = 1.0 / std::sqrt(op.sigma2());
  std::vector<double> n_star(op.data_dim());
  for (double& x : n_star) x = inv_sigma * rng.normal();
  std::vector<double> eta_star(op.latent_dim());
  for (double& x : eta_star) x = rng.normal();
  return latent_sample_from_noise(op, n_star, eta_star, settings);
}

}  // namespace fishergen
