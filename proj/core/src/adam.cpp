#include "fishergen/adam.hpp"

#include <cmath>

#include "fishergen/errors.hpp"

namespace fishergen {

void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state,
               const AdamHyper& hyper) {
  const std::size_t n = params.flat_size();
  if (grads.flat_size() != n) throw ShapeError("adam_step: gradient layout differs from params");
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
  }
  if (state.m.size() != n || state.v.size() != n) {
    throw ShapeError("adam_step: optimizer state size differs from params");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(hyper.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper.beta2, t);

  // grads is const; walk it through its flat image.
  const std::vector<double> g = grads.flatten();
  std::size_t i = 0;
  params.for_each_value([&](double& p) {
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g[i];
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    p -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    ++i;
  });
}

}  // namespace fishergen
