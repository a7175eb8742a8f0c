#include "fishergen/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {

constexpr std::size_t kMaxJacobiDim = 64;
constexpr std::size_t kMaxSweeps = 100;

double off_diagonal_norm(const DenseArray& a) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

EigenDecomposition sorted(std::vector<double> values, const DenseArray& columns) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = DenseArray({n, columns.rows()});
  for (std::size_t r = 0; r < n; ++r) {
    out.values[r] = values[order[r]];
    for (std::size_t i = 0; i < columns.rows(); ++i) out.vectors(r, i) = columns(i, order[r]);
  }
  return out;
}

// Modified Gram-Schmidt on the columns of q [n, m].
void orthonormalize_columns(DenseArray& q) {
  const std::size_t n = q.rows();
  const std::size_t m = q.cols();
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < j; ++p) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += q(i, p) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= d * q(i, p);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-300) {
      // Collapsed direction: replace with a coordinate axis and retry.
      for (std::size_t i = 0; i < n; ++i) q(i, j) = (i == j % n) ? 1.0 : 0.0;
      --j;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
}

}  // namespace

EigenDecomposition eig_sym(const DenseArray& input) {
  if (input.rank() != 2 || input.rows() != input.cols()) {
    throw ShapeError("eig_sym: matrix must be square, got " + input.shape_string());
  }
  const std::size_t n = input.rows();
  if (n > kMaxJacobiDim) throw ShapeError("eig_sym: dimension above 64");
  double max_abs = 0.0;
  for (double x : input.values()) max_abs = std::max(max_abs, std::abs(x));
  const double sym_tol = 1e-9 * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(input(i, j) - input(j, i)) > sym_tol) {
        throw ShapeError("eig_sym: matrix is not symmetric");
      }
    }
  }

  DenseArray a = input;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  }
  DenseArray v = DenseArray::identity(n);
  const double target = 1e-12 * std::max(1.0, frobenius(a));
  std::size_t sweep = 0;
  while (off_diagonal_norm(a) > target && sweep < kMaxSweeps) {
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_diagonal_norm(a) > target) throw NumericalError("eig_sym: Jacobi did not converge");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  EigenDecomposition out = sorted(std::move(values), v);
  out.sweeps = sweep;
  return out;
}

EigenDecomposition top_eigenpairs(const DenseArray& a, std::size_t count, std::size_t max_iter,
                                  double tol) {
  if (a.rank() != 2 || a.rows() != a.cols()) throw ShapeError("top_eigenpairs: square matrix required");
  const std::size_t n = a.rows();
  if (count == 0 || count > n) throw ShapeError("top_eigenpairs: count must be in [1, n]");
  if (n <= kMaxJacobiDim) {
    EigenDecomposition full = eig_sym(a);
    EigenDecomposition out;
    out.values.assign(full.values.begin(), full.values.begin() + static_cast<std::ptrdiff_t>(count));
    out.vectors = DenseArray({count, n});
    for (std::size_t r = 0; r < count; ++r) {
      std::copy(full.vectors.row(r).begin(), full.vectors.row(r).end(), out.vectors.row(r).begin());
    }
    out.sweeps = full.sweeps;
    return out;
  }
  // Deterministic start: spread coordinate axes plus a small ramp.
  DenseArray q({n, count}, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      q(i, j) = ((i * 7 + j * 13) % 17 == 0 ? 1.0 : 0.0) + 1e-3 * std::sin(1.0 + i * (j + 1));
    }
  }
  orthonormalize_columns(q);
  std::vector<double> previous(count, 0.0);
  EigenDecomposition ritz;
  for (std::size_t it = 0; it < max_iter; ++it) {
    DenseArray z = matmul(a, q);
    orthonormalize_columns(z);
    q = std::move(z);
    const DenseArray projected = matmul(transpose(q), matmul(a, q));
    ritz = eig_sym(projected);
    double change = 0.0;
    double scale = 1e-300;
    for (std::size_t j = 0; j < count; ++j) {
      change = std::max(change, std::abs(ritz.values[j] - previous[j]));
      scale = std::max(scale, std::abs(ritz.values[j]));
    }
    previous = ritz.values;
    ritz.sweeps = it + 1;
    if (it > 0 && change <= tol * scale) break;
  }
  EigenDecomposition out;
  out.values = ritz.values;
  out.sweeps = ritz.sweeps;
  out.vectors = DenseArray({count, n});
  // Ritz vectors: q · y_r
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < count; ++j) s += q(i, j) * ritz.vectors(r, j);
      out.vectors(r, i) = s;
    }
  }
  return out;
}

DenseArray sqrt_psd(const DenseArray& a) {
  const EigenDecomposition e = eig_sym(a);
  const std::size_t n = a.rows();
  DenseArray out({n, n}, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double s = std::sqrt(std::max(e.values[r], 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out(i, j) += s * e.vectors(r, i) * e.vectors(r, j);
    }
  }
  return out;
}

DenseArray matmul(const DenseArray& a, const DenseArray& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw ShapeError("matmul: incompatible shapes " + a.shape_string() + " x " + b.shape_string());
  }
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  DenseArray out({n, m}, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      const double* brow = b.values().data() + p * m;
      double* orow = out.values().data() + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  return out;
}

DenseArray transpose(const DenseArray& a) {
  if (a.rank() != 2) throw ShapeError("transpose: rank-2 array required");
  DenseArray out({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

double trace(const DenseArray& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

double frobenius(const DenseArray& a) { return norm2(a.flat()); }

void mean_and_covariance(const DenseArray& x, std::vector<double>& mean, DenseArray& cov) {
  const std::size_t n = x.rows();
  const std::size_t f = x.cols();
  if (n < 2) throw ShapeError("mean_and_covariance: need at least two rows");
  mean.assign(f, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    for (std::size_t j = 0; j < f; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  cov = DenseArray({f, f}, 0.0);
  std::vector<double> c(f);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    for (std::size_t j = 0; j < f; ++j) c[j] = row[j] - mean[j];
    for (std::size_t i = 0; i < f; ++i) {
      const double ci = c[i];
      if (ci == 0.0) continue;
      double* crow = cov.values().data() + i * f;
      for (std::size_t j = i; j < f; ++j) crow[j] += ci * c[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = i; j < f; ++j) {
      cov(i, j) *= inv;
      cov(j, i) = cov(i, j);
    }
  }
}

}  // namespace fishergen
