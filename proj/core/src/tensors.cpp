#include "polyvisc/tensors.hpp"

#include <algorithm>
#include <numeric>

#include "polyvisc/errors.hpp"

namespace polyvisc::tensors {

namespace {

constexpr double kJacobiTolerance = 1e-14;
constexpr int kJacobiMaxSweeps = 50;
constexpr double kSpdRatio = 1e-12;

using Mat = std::array<std::array<double, 3>, 3>;

Mat to_mat(const SymTensor3& a) {
  Mat m{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = a(i, j);
  return m;
}

double off_diagonal_norm(const Mat& m) {
  return std::sqrt(2.0 * (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]));
}

// One Jacobi rotation annihilating m[p][q]; accumulates into v.
void rotate(Mat& m, Mat& v, std::size_t p, std::size_t q) {
  const double apq = m[p][q];
  if (apq == 0.0) return;
  const double theta = (m[q][q] - m[p][p]) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t k = 0; k < 3; ++k) {
    const double mkp = m[k][p];
    const double mkq = m[k][q];
    m[k][p] = c * mkp - s * mkq;
    m[k][q] = s * mkp + c * mkq;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const double mpk = m[p][k];
    const double mqk = m[q][k];
    m[p][k] = c * mpk - s * mqk;
    m[q][k] = s * mpk + c * mqk;
  }
  m[p][q] = m[q][p] = 0.0;

  for (std::size_t k = 0; k < 3; ++k) {
    const double vkp = v[k][p];
    const double vkq = v[k][q];
    v[k][p] = c * vkp - s * vkq;
    v[k][q] = s * vkp + c * vkq;
  }
}

void check_spd(const SpectralDecomp& d, const char* what) {
  if (!is_spd(d)) throw DomainError(std::string(what) + ": tensor is not symmetric positive definite");
}

}  // namespace

// ---------------------------------------------------------------- Tensor3

Tensor3 Tensor3::transpose() const {
  const auto& a = c_;
  return Tensor3({a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]});
}

double Tensor3::det() const {
  const auto& a = c_;
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Tensor3 Tensor3::inverse() const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) throw DomainError("Tensor3::inverse: singular tensor");
  const auto& a = c_;
  const double inv = 1.0 / d;
  return Tensor3({(a[4] * a[8] - a[5] * a[7]) * inv, (a[2] * a[7] - a[1] * a[8]) * inv,
                  (a[1] * a[5] - a[2] * a[4]) * inv, (a[5] * a[6] - a[3] * a[8]) * inv,
                  (a[0] * a[8] - a[2] * a[6]) * inv, (a[2] * a[3] - a[0] * a[5]) * inv,
                  (a[3] * a[7] - a[4] * a[6]) * inv, (a[1] * a[6] - a[0] * a[7]) * inv,
                  (a[0] * a[4] - a[1] * a[3]) * inv});
}

SymTensor3 Tensor3::sym() const {
  const auto& a = c_;
  return SymTensor3({a[0], a[4], a[8], 0.5 * (a[1] + a[3]), 0.5 * (a[5] + a[7]), 0.5 * (a[2] + a[6])});
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  for (std::size_t k = 0; k < 9; ++k) c_[k] += o.c_[k];
  return *this;
}
Tensor3& Tensor3::operator-=(const Tensor3& o) {
  for (std::size_t k = 0; k < 9; ++k) c_[k] -= o.c_[k];
  return *this;
}
Tensor3& Tensor3::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

// ------------------------------------------------------------- SymTensor3

double SymTensor3::det() const {
  const auto& a = c_;
  return a[XX] * (a[YY] * a[ZZ] - a[YZ] * a[YZ]) - a[XY] * (a[XY] * a[ZZ] - a[YZ] * a[XZ]) +
         a[XZ] * (a[XY] * a[YZ] - a[YY] * a[XZ]);
}

SymTensor3 SymTensor3::inverse() const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) throw DomainError("SymTensor3::inverse: singular tensor");
  const auto& a = c_;
  const double inv = 1.0 / d;
  return SymTensor3({(a[YY] * a[ZZ] - a[YZ] * a[YZ]) * inv, (a[XX] * a[ZZ] - a[XZ] * a[XZ]) * inv,
                     (a[XX] * a[YY] - a[XY] * a[XY]) * inv, (a[XZ] * a[YZ] - a[XY] * a[ZZ]) * inv,
                     (a[XY] * a[XZ] - a[XX] * a[YZ]) * inv, (a[XY] * a[YZ] - a[XZ] * a[YY]) * inv});
}

Tensor3 SymTensor3::full() const {
  const auto& a = c_;
  return Tensor3({a[XX], a[XY], a[XZ], a[XY], a[YY], a[YZ], a[XZ], a[YZ], a[ZZ]});
}

double SymTensor3::dot(const SymTensor3& o) const {
  const auto& a = c_;
  const auto& b = o.c_;
  return a[XX] * b[XX] + a[YY] * b[YY] + a[ZZ] * b[ZZ] +
         2.0 * (a[XY] * b[XY] + a[YZ] * b[YZ] + a[XZ] * b[XZ]);
}

bool SymTensor3::is_finite() const {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
}

SymTensor3& SymTensor3::operator+=(const SymTensor3& o) {
  for (std::size_t k = 0; k < 6; ++k) c_[k] += o.c_[k];
  return *this;
}
SymTensor3& SymTensor3::operator-=(const SymTensor3& o) {
  for (std::size_t k = 0; k < 6; ++k) c_[k] -= o.c_[k];
  return *this;
}
SymTensor3& SymTensor3::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

Tensor3 operator*(const Tensor3& a, const Tensor3& b) {
  Tensor3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}
Tensor3 operator*(const SymTensor3& a, const SymTensor3& b) { return a.full() * b.full(); }
Tensor3 operator*(const Tensor3& a, const SymTensor3& b) { return a * b.full(); }
Tensor3 operator*(const SymTensor3& a, const Tensor3& b) { return a.full() * b; }

SymTensor3 gram(const Tensor3& a) {
  SymTensor3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j)
      r(i, j) = a(i, 0) * a(j, 0) + a(i, 1) * a(j, 1) + a(i, 2) * a(j, 2);
  return r;
}

SymTensor3 sandwich(const SymTensor3& s, const SymTensor3& a) { return congruence(s.full(), a); }

SymTensor3 congruence(const Tensor3& q, const SymTensor3& a) {
  return (q * a * q.transpose()).sym();
}

double frobenius(const Tensor3& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

Invariants invariants(const SymTensor3& a) {
  const double tr = a.trace();
  const double tr2 = a.dot(a);
  return {tr, 0.5 * (tr * tr - tr2), a.det()};
}

// -------------------------------------------------------------- spectral

SymTensor3 SpectralDecomp::compose(const std::array<double, 3>& d) const {
  SymTensor3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j)
      r(i, j) = frame(i, 0) * d[0] * frame(j, 0) + frame(i, 1) * d[1] * frame(j, 1) +
                frame(i, 2) * d[2] * frame(j, 2);
  return r;
}

SymTensor3 SpectralDecomp::to_eigenbasis(const SymTensor3& a) const {
  return congruence(frame.transpose(), a);
}

SymTensor3 SpectralDecomp::from_eigenbasis(const SymTensor3& a) const { return congruence(frame, a); }

SpectralDecomp eig_sym(const SymTensor3& a) {
  if (!a.is_finite()) throw DomainError("eig_sym: non-finite tensor");
  Mat m = to_mat(a);
  Mat v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const double scale = a.norm();

  int sweep = 0;
  while (off_diagonal_norm(m) > kJacobiTolerance * scale) {
    if (++sweep > kJacobiMaxSweeps) throw NumericalError("eig_sym: Jacobi sweeps did not converge");
    rotate(m, v, 0, 1);
    rotate(m, v, 0, 2);
    rotate(m, v, 1, 2);
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m[i][i] > m[j][j]; });

  SpectralDecomp d;
  std::array<std::array<double, 3>, 3> vecs{};
  for (std::size_t k = 0; k < 3; ++k) {
    d.values[k] = m[order[k]][order[k]];
    for (std::size_t i = 0; i < 3; ++i) vecs[k][i] = v[i][order[k]];
  }
  for (std::size_t k = 0; k < 2; ++k) {
    std::size_t big = 0;
    for (std::size_t i = 1; i < 3; ++i)
      if (std::abs(vecs[k][i]) > std::abs(vecs[k][big])) big = i;
    if (vecs[k][big] < 0.0)
      for (auto& x : vecs[k]) x = -x;
  }
  vecs[2] = {vecs[0][1] * vecs[1][2] - vecs[0][2] * vecs[1][1],
             vecs[0][2] * vecs[1][0] - vecs[0][0] * vecs[1][2],
             vecs[0][0] * vecs[1][1] - vecs[0][1] * vecs[1][0]};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i) d.frame(i, k) = vecs[k][i];
  return d;
}

bool is_spd(const SpectralDecomp& d) {
  return d.values[0] > 0.0 && d.values[2] > kSpdRatio * d.values[0];
}

bool is_spd(const SymTensor3& a) { return is_spd(eig_sym(a)); }

SymTensor3 sqrt_spd(const SpectralDecomp& d) {
  check_spd(d, "sqrt_spd");
  return d.map([](double x) { return std::sqrt(x); });
}

SymTensor3 sqrt_spd(const SymTensor3& a) { return sqrt_spd(eig_sym(a)); }

SymTensor3 inverse_sqrt_spd(const SpectralDecomp& d) {
  check_spd(d, "inverse_sqrt_spd");
  return d.map([](double x) { return 1.0 / std::sqrt(x); });
}

SymTensor3 sylvester_spd(const SpectralDecomp& a, const SymTensor3& m) {
  check_spd(a, "sylvester_spd");
  SymTensor3 x = a.to_eigenbasis(m);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) x(i, j) /= a.values[i] + a.values[j];
  return a.from_eigenbasis(x);
}

SymTensor3 sylvester_spd(const SymTensor3& a, const SymTensor3& m) {
  const SpectralDecomp ad = eig_sym(a);
  SymTensor3 x = sylvester_spd(ad, m);
  // One refinement step against the original A removes most of the
  // eigenvector rounding from the forward error.
  const Tensor3 ax = a * x;
  const SymTensor3 r = m - (ax + ax.transpose()).sym();
  return x + sylvester_spd(ad, r);
}

SymTensor3 upper_convected(const Tensor3& l, const SymTensor3& a) {
  const Tensor3 la = l * a;
  return (la + la.transpose()).sym();
}

SymTensor3 oldroyd(const SymTensor3& adot, const Tensor3& l, const SymTensor3& a) {
  return adot - upper_convected(l, a);
}

}  // namespace polyvisc::tensors
