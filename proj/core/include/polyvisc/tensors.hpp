#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace polyvisc::tensors {

class SymTensor3;

/// General 3x3 tensor, row-major.
class Tensor3 {
 public:
  constexpr Tensor3() = default;
  constexpr explicit Tensor3(const std::array<double, 9>& rowMajor) : c_(rowMajor) {}

  static constexpr Tensor3 zero() { return Tensor3{}; }
  static constexpr Tensor3 identity() { return diag(1.0, 1.0, 1.0); }
  static constexpr Tensor3 diag(double a, double b, double c) {
    return Tensor3({a, 0, 0, 0, b, 0, 0, 0, c});
  }

  constexpr double operator()(std::size_t i, std::size_t j) const { return c_[3 * i + j]; }
  constexpr double& operator()(std::size_t i, std::size_t j) { return c_[3 * i + j]; }
  constexpr const std::array<double, 9>& data() const { return c_; }

  Tensor3 transpose() const;
  double trace() const { return c_[0] + c_[4] + c_[8]; }
  double det() const;
  Tensor3 inverse() const;
  /// (A + A^T)/2
  SymTensor3 sym() const;

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(double s);

 private:
  std::array<double, 9> c_{};
};

/// Symmetric 3x3 tensor stored as (xx, yy, zz, xy, yz, xz).
class SymTensor3 {
 public:
  enum Index : std::size_t { XX = 0, YY = 1, ZZ = 2, XY = 3, YZ = 4, XZ = 5 };

  constexpr SymTensor3() = default;
  constexpr explicit SymTensor3(const std::array<double, 6>& voigt) : c_(voigt) {}

  static constexpr SymTensor3 zero() { return SymTensor3{}; }
  static constexpr SymTensor3 identity() { return diag(1.0, 1.0, 1.0); }
  static constexpr SymTensor3 diag(double a, double b, double c) {
    return SymTensor3({a, b, c, 0, 0, 0});
  }
  /// Symmetric part of a general tensor.
  static SymTensor3 from_symmetric_part(const Tensor3& a) { return a.sym(); }

  constexpr double operator[](std::size_t k) const { return c_[k]; }
  constexpr double& operator[](std::size_t k) { return c_[k]; }
  double operator()(std::size_t i, std::size_t j) const { return c_[index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) { return c_[index(i, j)]; }
  constexpr const std::array<double, 6>& data() const { return c_; }

  static constexpr std::size_t index(std::size_t i, std::size_t j) {
    constexpr std::size_t map[3][3] = {{XX, XY, XZ}, {XY, YY, YZ}, {XZ, YZ, ZZ}};
    return map[i][j];
  }

  double trace() const { return c_[XX] + c_[YY] + c_[ZZ]; }
  double det() const;
  /// Explicit cofactor inverse; throws DomainError if singular.
  SymTensor3 inverse() const;
  Tensor3 full() const;
  /// Frobenius norm.
  double norm() const { return std::sqrt(dot(*this)); }
  /// Double contraction A:B.
  double dot(const SymTensor3& o) const;
  bool is_finite() const;

  SymTensor3& operator+=(const SymTensor3& o);
  SymTensor3& operator-=(const SymTensor3& o);
  SymTensor3& operator*=(double s);

 private:
  std::array<double, 6> c_{};
};

SymTensor3 operator+(SymTensor3 a, const SymTensor3& b);
SymTensor3 operator-(SymTensor3 a, const SymTensor3& b);
SymTensor3 operator*(double s, SymTensor3 a);
SymTensor3 operator*(SymTensor3 a, double s);
Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double s, Tensor3 a);

Tensor3 operator*(const Tensor3& a, const Tensor3& b);
Tensor3 operator*(const SymTensor3& a, const SymTensor3& b);
Tensor3 operator*(const Tensor3& a, const SymTensor3& b);
Tensor3 operator*(const SymTensor3& a, const Tensor3& b);

/// A A^T
SymTensor3 gram(const Tensor3& a);
/// S A S^T for symmetric S (result symmetric up to round-off, symmetrized).
SymTensor3 sandwich(const SymTensor3& s, const SymTensor3& a);
/// Q A Q^T for general Q.
SymTensor3 congruence(const Tensor3& q, const SymTensor3& a);

double frobenius(const Tensor3& a);

struct Invariants {
  double first;
  double second;
  double third;
};

/// I = tr A, II = ((tr A)^2 - tr A^2)/2, III = det A.
Invariants invariants(const SymTensor3& a);

/// Eigenvalues sorted descending; `frame` columns are the matching
/// orthonormal eigenvectors and form a proper rotation.
struct SpectralDecomp {
  std::array<double, 3> values{};
  Tensor3 frame = Tensor3::identity();

  /// Q diag(f(values)) Q^T
  template <class F>
  SymTensor3 map(F&& f) const {
    return compose({f(values[0]), f(values[1]), f(values[2])});
  }
  SymTensor3 compose(const std::array<double, 3>& diagonal) const;
  /// Q^T A Q
  SymTensor3 to_eigenbasis(const SymTensor3& a) const;
  /// Q A Q^T
  SymTensor3 from_eigenbasis(const SymTensor3& a) const;
};

/// Cyclic Jacobi. Eigenvector signs: largest-magnitude component positive
/// for the first two vectors, third = e1 x e2.
SpectralDecomp eig_sym(const SymTensor3& a);

/// Smallest eigenvalue > 1e-12 * largest.
bool is_spd(const SpectralDecomp& d);
bool is_spd(const SymTensor3& a);

SymTensor3 sqrt_spd(const SymTensor3& a);
SymTensor3 sqrt_spd(const SpectralDecomp& d);
SymTensor3 inverse_sqrt_spd(const SpectralDecomp& d);

/// Solves A X + X A = M for symmetric X, A SPD.
SymTensor3 sylvester_spd(const SymTensor3& a, const SymTensor3& m);
SymTensor3 sylvester_spd(const SpectralDecomp& a, const SymTensor3& m);

/// Adot - L A - A L^T
SymTensor3 oldroyd(const SymTensor3& adot, const Tensor3& l, const SymTensor3& a);

/// L A + A L^T
SymTensor3 upper_convected(const Tensor3& l, const SymTensor3& a);

}  // namespace polyvisc::tensors
