#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "wavesplit/types.hpp"

namespace wavesplit {

/// Rectangular lattice of sample points used to validate tensor fields and to
/// estimate their lower bounds. Smoothness between samples is the caller's
/// responsibility.
struct SampleLattice {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};
  int n1 = 1;
  int n2 = 1;

  std::vector<Vec2> points() const;
};

/// Real symmetric positive definite 3x3 tensor field over transverse position.
/// Either a constant matrix or a smooth callable profile.
class MaterialTensor {
 public:
  using Profile = std::function<Mat3d(const Vec2&)>;

  MaterialTensor() : constant_(Mat3d::Identity()), is_constant_(true) {}
  explicit MaterialTensor(const Mat3d& constant);
  explicit MaterialTensor(Profile profile);

  /// Evaluates at x'. Symmetrizes when the relative asymmetry is below 1e-12,
  /// throws ConfigError otherwise.
  Mat3d eval(const Vec2& x) const;

  bool is_constant() const { return is_constant_; }

  /// Verifies symmetry and positive definiteness on every lattice point.
  /// Throws ConfigError naming the offending sample.
  void validate_spd(const SampleLattice& lattice) const;

 private:
  Profile profile_;
  Mat3d constant_ = Mat3d::Identity();
  bool is_constant_ = false;
};

/// Schur reduction t_{ab} - t_{a3} t_33^{-1} t_{3b} for a,b in {1,2}.
/// Throws ConfigError when t33 <= 0.
Mat2d schur_reduce(const Mat3d& t);

/// Normalized medium: relative SPD tensors plus derived transverse data.
struct MediumSpec {
  MaterialTensor eps;
  MaterialTensor mu;
  double eps_hat1 = 0.0;  // lower bound on eigenvalues of eps_schur over the lattice
  double mu_hat1 = 0.0;
  bool homogeneous = false;
  SampleLattice lattice;

  Mat2d eps_schur(const Vec2& x) const { return schur_reduce(eps.eval(x)); }
  Mat2d mu_schur(const Vec2& x) const { return schur_reduce(mu.eval(x)); }

  /// Builds the spec from validated tensors: validates SPD on the lattice and
  /// fills the lower bounds.
  static MediumSpec create(MaterialTensor eps, MaterialTensor mu,
                           const SampleLattice& lattice);
};

/// Normalized time-Laplace parameter with the strip floor S_R.
struct LaplaceParameter {
  Complex s{1.0, 0.0};
  double S_R = 0.5;

  LaplaceParameter() = default;
  LaplaceParameter(Complex s_value, double floor);

  /// Width of the guaranteed resolvent strip, tau = S_R sqrt(eps1 mu1).
  double tau(const MediumSpec& m) const;
};

/// Field/source scale factors recorded by normalize() for round trips.
struct UnitScales {
  double e_field = 0.0;   // sqrt(eps0)
  double h_field = 0.0;   // sqrt(mu0)
  double j_current = 0.0; // sqrt(mu0)
  double k_current = 0.0; // sqrt(eps0)
};

struct NormalizedMedium {
  MediumSpec medium;
  LaplaceParameter s;
  UnitScales scales;
};

/// SI -> normalized scaling: relative tensors, s' = s/c0. The SI tensors must
/// factor as eps(x)*eps0 and mu(x)*mu0 with eps, mu symmetric positive
/// definite; violations are rejected with the offending sample point.
/// S_R defaults to 0.9 Re(s').
NormalizedMedium normalize(const MaterialTensor& eps_si, const MaterialTensor& mu_si,
                           Complex s_si, const SampleLattice& lattice,
                           std::optional<double> S_R = std::nullopt);

/// Inverse of normalize() on the tensor/parameter data.
std::pair<Mat3d, Mat3d> denormalize_at(const MediumSpec& m, const Vec2& x);
Complex denormalize_s(const LaplaceParameter& p);

/// (eps_hat1, mu_hat1): minimum over the samples of the smallest eigenvalue of
/// the Schur-reduced tensors. Throws ConfigError identifying the point when a
/// sample is not positive definite.
std::pair<double, double> lower_bounds(const MediumSpec& m,
                                       const std::vector<Vec2>& sample_points);

}  // namespace wavesplit
