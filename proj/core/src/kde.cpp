#include "fishergen/kde.hpp"

#include <cmath>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {
constexpr double kFallbackBandwidth = 0.1;
}

KdeModel kde_fit(const DenseArray& means, BandwidthRule /*rule*/) {
  if (means.rank() != 2 || means.rows() == 0) throw ShapeError("kde_fit: need [p, L] support points");
  const std::size_t p = means.rows();
  const std::size_t dim = means.cols();
  KdeModel model{means, kFallbackBandwidth};
  if (p < 2) return model;
  double mean_std = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < p; ++i) m += means(i, j);
    m /= static_cast<double>(p);
    double v = 0.0;
    for (std::size_t i = 0; i < p; ++i) v += (means(i, j) - m) * (means(i, j) - m);
    mean_std += std::sqrt(v / static_cast<double>(p - 1));
  }
  mean_std /= static_cast<double>(dim);
  const double h =
      std::pow(static_cast<double>(p), -1.0 / (static_cast<double>(dim) + 4.0)) * mean_std;
  if (h > 0.0 && std::isfinite(h)) model.bandwidth = h;
  return model;
}

KdeModel kde_fit(const DenseArray& means, double bandwidth) {
  if (means.rank() != 2 || means.rows() == 0) throw ShapeError("kde_fit: need [p, L] support points");
  if (!(bandwidth > 0.0)) throw ShapeError("kde_fit: bandwidth must be positive");
  return KdeModel{means, bandwidth};
}

DenseArray kde_sample(const KdeModel& model, std::size_t n, CounterRng& rng) {
  const std::size_t dim = model.support.cols();
  DenseArray out({n, dim});
  for (std::size_t i = 0; i < n; ++i) {
    auto src = model.support.row(rng.below(model.support.rows()));
    auto dst = out.row(i);
    for (std::size_t j = 0; j < dim; ++j) dst[j] = src[j] + model.bandwidth * rng.normal();
  }
  return out;
}

}  // namespace fishergen
