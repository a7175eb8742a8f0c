#include "fishergen/array.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}
}  // namespace

DenseArray::DenseArray(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

DenseArray::DenseArray(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != product(shape_)) {
    throw ShapeError("DenseArray: data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string());
  }
}

DenseArray DenseArray::vector(std::initializer_list<double> values) {
  return DenseArray({values.size()}, std::vector<double>(values));
}

DenseArray DenseArray::vector(std::span<const double> values) {
  return DenseArray({values.size()}, std::vector<double>(values.begin(), values.end()));
}

DenseArray DenseArray::matrix(std::size_t rows, std::size_t cols,
                              std::initializer_list<double> values) {
  return DenseArray({rows, cols}, std::vector<double>(values));
}

DenseArray DenseArray::zeros(std::size_t rows, std::size_t cols) {
  return DenseArray({rows, cols}, 0.0);
}

DenseArray DenseArray::identity(std::size_t n) {
  DenseArray a({n, n}, 0.0);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
  return a;
}

std::size_t DenseArray::rows() const {
  if (shape_.size() == 2) return shape_[0];
  return 1;
}

std::size_t DenseArray::cols() const {
  if (shape_.empty()) return 0;
  return shape_.back();
}

std::span<double> DenseArray::row(std::size_t i) {
  const std::size_t c = cols();
  return std::span<double>(data_).subspan(i * c, c);
}

std::span<const double> DenseArray::row(std::size_t i) const {
  const std::size_t c = cols();
  return std::span<const double>(data_).subspan(i * c, c);
}

bool DenseArray::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string DenseArray::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace fishergen
