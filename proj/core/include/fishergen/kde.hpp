#pragma once

#include <cstddef>

#include "fishergen/array.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

/// Isotropic Gaussian kernel density over a set of latent points.
struct KdeModel {
  DenseArray support;  // [p, L]
  double bandwidth = 0.1;
};

enum class BandwidthRule { Scott };

/// Scott's rule: h = p^(−1/(L+4)) · mean over dimensions of the per-dimension
/// standard deviation. A single support point, or zero spread, falls back to
/// h = 0.1.
KdeModel kde_fit(const DenseArray& means, BandwidthRule rule = BandwidthRule::Scott);
/// Fixed bandwidth; h must be positive.
KdeModel kde_fit(const DenseArray& means, double bandwidth);

/// n draws: a uniformly chosen support point plus h · N(0, I).
DenseArray kde_sample(const KdeModel& model, std::size_t n, CounterRng& rng);

}  // namespace fishergen
