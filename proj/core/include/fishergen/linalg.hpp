#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fishergen/array.hpp"

namespace fishergen {

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
/// `vectors.row(i)` is the unit eigenvector for `values[i]`.
struct EigenDecomposition {
  std::vector<double> values;
  DenseArray vectors;
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// 1e-12 · max(1, ‖A‖_F). Throws ShapeError unless A is square, at most
/// 64 x 64, and symmetric to 1e-9 · max(1, max|A_ij|).
EigenDecomposition eig_sym(const DenseArray& a);

/// Top `count` eigenpairs of a symmetric positive semi-definite matrix by
/// orthogonal subspace iteration with a Rayleigh-Ritz step (eig_sym on the
/// projected count x count matrix). Works for any size.
EigenDecomposition top_eigenpairs(const DenseArray& a, std::size_t count,
                                  std::size_t max_iter = 500, double tol = 1e-10);

/// Symmetric square root of a PSD matrix; negative eigenvalues clamp to 0.
DenseArray sqrt_psd(const DenseArray& a);

/// a · b for rank-2 operands.
DenseArray matmul(const DenseArray& a, const DenseArray& b);
DenseArray transpose(const DenseArray& a);
double trace(const DenseArray& a);
double frobenius(const DenseArray& a);

/// Column means [f] and unbiased covariance [f, f] of rows of x.
void mean_and_covariance(const DenseArray& x, std::vector<double>& mean, DenseArray& cov);

}  // namespace fishergen
