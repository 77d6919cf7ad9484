#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "polyvisc/tensors.hpp"

namespace polyvisc::ts {

using tensors::SymTensor3;
using tensors::Tensor3;

/// Rotation from a random unit quaternion.
inline Tensor3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double w = n(rng), x = n(rng), y = n(rng), z = n(rng);
  const double s = 1.0 / std::sqrt(w * w + x * x + y * y + z * z);
  w *= s, x *= s, y *= s, z *= s;
  return Tensor3({1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
                  2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
                  2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)});
}

/// Q diag(a, b, c) Q^T, multiplied out by hand so it does not rely on the
/// library's congruence.
inline SymTensor3 rotated_diag(const Tensor3& q, double a, double b, double c) {
  const double d[3] = {a, b, c};
  double m[3][3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m[i][j] += q(i, k) * d[k] * q(j, k);
  return SymTensor3({m[0][0], m[1][1], m[2][2], m[0][1], m[1][2], m[0][2]});
}

/// SPD with log10 condition number uniform in [0, maxLogCond].
inline SymTensor3 random_spd(std::mt19937_64& rng, double maxLogCond = 6.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double top = std::pow(10.0, maxLogCond * u(rng));
  const double scale = std::pow(10.0, 4.0 * u(rng) - 2.0);
  const double mid = std::pow(top, u(rng));
  return rotated_diag(random_rotation(rng), scale * top, scale * mid, scale);
}

/// SPD with unit determinant and moderate stretches.
inline SymTensor3 random_unimodular_spd(std::mt19937_64& rng, double spread = 0.3) {
  std::uniform_real_distribution<double> u(-spread, spread);
  const double a = u(rng), b = u(rng);
  return rotated_diag(random_rotation(rng), std::exp(a), std::exp(b), std::exp(-a - b));
}

inline SymTensor3 random_sym(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return SymTensor3({u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)});
}

/// Frobenius norm of a symmetric tensor from its components.
inline double fro(const SymTensor3& a) {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + 2 * (a[3] * a[3] + a[4] * a[4] + a[5] * a[5]));
}

/// Plain 3x3 product for reference computations.
inline Tensor3 matmul(const Tensor3& a, const Tensor3& b) {
  std::array<double, 9> c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[3 * i + j] += a(i, k) * b(k, j);
  return Tensor3(c);
}

inline Tensor3 full(const SymTensor3& a) {
  return Tensor3({a[0], a[3], a[5], a[3], a[1], a[4], a[5], a[4], a[2]});
}

inline double fro(const Tensor3& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

/// Root of f on [lo, hi] by plain bisection; f(lo), f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace polyvisc::ts
