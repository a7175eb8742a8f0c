#include "fishergen/eval.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fishergen/errors.hpp"

namespace fishergen {

MseResult mse(const DenseArray& data, const DenseArray& reconstructions) {
  if (data.shape() != reconstructions.shape()) {
    throw ShapeError("mse: shapes " + data.shape_string() + " and " +
                     reconstructions.shape_string() + " differ");
  }
  MseResult out;
  const std::size_t rows = data.size() == 0 ? 0 : data.rows();
  out.per_datum.resize(rows);
  const double k = static_cast<double>(data.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    auto d = data.row(i);
    auto r = reconstructions.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double e = d[j] - r[j];
      s += e * e;
    }
    out.per_datum[i] = s / k;
    sum += out.per_datum[i];
  }
  out.mean = rows == 0 ? 0.0 : sum / static_cast<double>(rows);
  return out;
}

DenseArray reconstruct_means(const GenerativeModel& model, const DenseArray& data) {
  return decode(model, encode(model, data).mu);
}

DenseArray metric_matrix(const MetricOperator& op) {
  const std::size_t n = op.latent_dim();
  DenseArray m({n, n});
  std::vector<double> e(n, 0.0);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
  }
  return m;
}

std::vector<LatentRecord> latent_records(const GenerativeModel& model, const DenseArray& data,
                                         const std::vector<int>& labels, bool with_eigen) {
  if (data.rows() != labels.size()) throw ShapeError("latent_records: label count mismatch");
  const Encoding enc = encode(model, data);
  const std::size_t latent = model.latent_dim();
  std::vector<LatentRecord> records(data.rows());
  const double sigma2 = with_eigen ? noise_covariance_scalar(model) : 1.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    LatentRecord& rec = records[i];
    rec.index = i;
    rec.label = labels[i];
    rec.mu.assign(enc.mu.row(i).begin(), enc.mu.row(i).end());
    if (!with_eigen) continue;
    EigenDecomposition e;
    if (model.variant() == Variant::FisherNet) {
      MetricOperator op(model.decoder_spec(), model.decoder_layers(),
                        DenseArray::vector(enc.mu.row(i)), sigma2);
      e = eig_sym(metric_matrix(op));
    } else {
      DenseArray precision({latent, latent}, 0.0);
      for (std::size_t j = 0; j < latent; ++j) precision(j, j) = std::exp(-enc.logvar(i, j));
      e = eig_sym(precision);
    }
    rec.eigvals = e.values;
    rec.eigvecs = e.vectors;
  }
  return records;
}

std::vector<std::array<double, 2>> uncertainty_ellipse(const LatentRecord& record,
                                                       double n_sigma, std::size_t points) {
  if (record.mu.size() != 2) {
    throw ShapeError("uncertainty_ellipse: latent dimension is " +
                     std::to_string(record.mu.size()) + ", ellipses need 2");
  }
  if (!record.eigvals || !record.eigvecs) {
    throw ShapeError("uncertainty_ellipse: record has no eigenpairs");
  }
  const auto& lambda = *record.eigvals;
  const DenseArray& vec = *record.eigvecs;
  const double a0 = n_sigma / std::sqrt(lambda[0]);
  const double a1 = n_sigma / std::sqrt(lambda[1]);
  std::vector<std::array<double, 2>> out(points);
  for (std::size_t t = 0; t < points; ++t) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(points);
    const double c = a0 * std::cos(angle);
    const double s = a1 * std::sin(angle);
    out[t] = {record.mu[0] + c * vec(0, 0) + s * vec(1, 0),
              record.mu[1] + c * vec(0, 1) + s * vec(1, 1)};
  }
  return out;
}

double polygon_area(const std::vector<std::array<double, 2>>& polygon) {
  double s = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& p = polygon[i];
    const auto& q = polygon[(i + 1) % polygon.size()];
    s += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(s);
}

}  // namespace fishergen
