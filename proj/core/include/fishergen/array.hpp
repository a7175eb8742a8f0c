#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fishergen {

/// Row-major dense array of doubles.
///
/// Most of the library only uses rank 1 (a vector) and rank 2 (a stack of
/// row vectors, one per datum). A rank-1 array of width n behaves as a single
/// row of a 1 x n matrix for rows()/cols()/row().
class DenseArray {
 public:
  DenseArray() = default;
  explicit DenseArray(std::vector<std::size_t> shape, double fill = 0.0);
  DenseArray(std::vector<std::size_t> shape, std::vector<double> data);

  static DenseArray vector(std::initializer_list<double> values);
  static DenseArray vector(std::span<const double> values);
  static DenseArray matrix(std::size_t rows, std::size_t cols,
                           std::initializer_list<double> values);
  static DenseArray zeros(std::size_t rows, std::size_t cols);
  static DenseArray identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  /// Leading dimension for rank 2, 1 for rank 1.
  std::size_t rows() const;
  /// Trailing dimension.
  std::size_t cols() const;

  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols() + j]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const DenseArray&, const DenseArray&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace fishergen
