#pragma once

#include <functional>
#include <vector>

#include "polyvisc/tensors.hpp"

namespace polyvisc::kinematics {

using tensors::SymTensor3;
using tensors::Tensor3;

/// diag(lambda, lambda^-1/2, lambda^-1/2). Throws DomainError for lambda <= 0.
Tensor3 uniaxial_F(double lambda);
/// diag(rate/lambda, -rate/(2 lambda), -rate/(2 lambda)).
Tensor3 uniaxial_L(double lambda, double lambdaRate);

/// x = X + gamma Y.
Tensor3 simple_shear_F(double gamma);
Tensor3 simple_shear_L(double gammaRate);

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes; preserves
/// monotonicity of the data.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> t, std::vector<double> y);

  double value(double t) const;
  double derivative(double t) const;
  double front() const { return t_.front(); }
  double back() const { return t_.back(); }

 private:
  std::size_t interval(double t) const;

  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

enum class MotionKind { Uniaxial, SimpleShear, Sampled };

/// Prescribed homogeneous motion. The driving scalar is the axial stretch
/// (Uniaxial, Sampled) or the shear amount (SimpleShear). An optional constant
/// rotation Q maps F -> Q F and L -> Q L Q^T.
class MotionProtocol {
 public:
  using Scalar = std::function<double(double)>;

  static MotionProtocol uniaxial(Scalar stretch, Scalar stretchRate, double t0, double t1);
  static MotionProtocol simple_shear(Scalar shear, Scalar shearRate, double t0, double t1);
  /// Strictly increasing times, positive stretches.
  static MotionProtocol sampled(std::vector<double> t, std::vector<double> stretch);
  /// lambda(t) = exp(rate * (t - t0)).
  static MotionProtocol constant_strain_rate(double rate, double t0, double t1);
  static MotionProtocol hold(double stretch, double t0, double t1);

  MotionProtocol rotated(const Tensor3& q) const;

  MotionKind kind() const { return kind_; }
  double start() const { return t0_; }
  double end() const { return t1_; }
  bool is_axial() const { return kind_ != MotionKind::SimpleShear; }
  const Tensor3& rotation() const { return rotation_; }

  double drive(double t) const { return drive_(t); }
  double drive_rate(double t) const { return rate_(t); }
  Tensor3 F(double t) const;
  Tensor3 L(double t) const;
  SymTensor3 B(double t) const { return tensors::gram(F(t)); }

 private:
  MotionProtocol(MotionKind kind, Scalar drive, Scalar rate, double t0, double t1);

  MotionKind kind_;
  Scalar drive_;
  Scalar rate_;
  double t0_;
  double t1_;
  Tensor3 rotation_ = Tensor3::identity();
  bool rotated_ = false;
};

struct NaturalMaps {
  SymTensor3 V;        ///< B_p^{1/2}
  SymTensor3 V_inv;    ///< B_p^{-1/2}
  SymTensor3 B_G;      ///< V^{-1} B V^{-1}
  tensors::SpectralDecomp Bp_spectral;
};

/// Splits the total left Cauchy-Green tensor B into the elastic part B_p and
/// the part B_G carried by the map to the natural configuration.
NaturalMaps natural_maps(const SymTensor3& B, const SymTensor3& Bp);

/// G = V^{-1} F; diagnostics only.
Tensor3 natural_G(const Tensor3& F, const SymTensor3& Bp);

}  // namespace polyvisc::kinematics
