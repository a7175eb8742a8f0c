#pragma once

#include <cstdint>
#include <vector>

#include "fishergen/mlp.hpp"

namespace fishergen {

struct AdamHyper {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates in ParamStore flat order.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// One bias-corrected Adam update, in place. Empty moment vectors are
/// zero-initialized to the parameter count on the first call.
void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state,
               const AdamHyper& hyper);

}  // namespace fishergen
