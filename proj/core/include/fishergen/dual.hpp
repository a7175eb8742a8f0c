#pragma once

namespace fishergen {

/// First-order dual number a + b·ε with ε² = 0.
///
/// Only the operations a dense affine/ReLU chain needs are provided.
struct Dual {
  double value = 0.0;
  double tangent = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v, double t = 0.0) : value(v), tangent(t) {}

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    tangent += o.tangent;
    return *this;
  }
  friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend constexpr Dual operator-(const Dual& a, const Dual& b) {
    return {a.value - b.value, a.tangent - b.tangent};
  }
  friend constexpr Dual operator*(double s, const Dual& a) { return {s * a.value, s * a.tangent}; }
  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.value * b.value, a.tangent * b.value + a.value * b.tangent};
  }
};

constexpr double relu(double x) { return x > 0.0 ? x : 0.0; }

// Derivative at exactly 0 is 0.
constexpr Dual relu(const Dual& x) { return x.value > 0.0 ? x : Dual{0.0, 0.0}; }

}  // namespace fishergen
