#pragma once

#include "wavesplit/spectrum.hpp"

namespace wavesplit {

enum class SplitMethod { residue, sign };
enum class Normalization { identity, impedance };

/// Splitting-matrix principal symbol b0 at one (x, xi', s): an involution that
/// commutes with a_1, stored with its 2x2 blocks and the root quartet used.
struct SplitSymbol {
  Mat4 b0;
  Mat2 b11, b12, b21, b22;
  SplitMethod method = SplitMethod::sign;
  RootQuartet roots;

  static SplitSymbol from_matrix(const Mat4& b, SplitMethod method,
                                 const RootQuartet& roots);
};

/// Generalized eigenvectors l+- with the derived per-mode operators.
struct SplitBasis {
  Mat42 l_plus, l_minus;
  Normalization norm = Normalization::identity;
  Mat2 s_plus, s_minus;   // vertical wave numbers
  Mat2 y_plus, y_minus;   // impedance maps
};

/// I_{n,m} = PV int dlambda_I lambda^n / det(alpha_1)^m along a line inside
/// the strip, by residue calculus over the root quartet. Requires 4m - n >= 1;
/// throws NumericGuardError for divergent (n, m).
Complex integrate_Inm(const RootQuartet& roots, int n, int m);

/// b0 via the resolvent integral: adjugate interpolation at 4 lambda nodes
/// gives each resolvent entry as (cubic in lambda)/det, integrated with
/// integrate_Inm. Orientation pinned to the isotropic closed form.
SplitSymbol splitting_symbol_residue(const MediumSpec& m, const Vec2& x,
                                     const Vec2& xi, const LaplaceParameter& lp);

/// b0 as the matrix sign of a_1: scaled Newton iteration
/// X <- (X + X^{-1})/2 until ||X^2 - I||_F <= 1e-12 (at most 100 steps).
SplitSymbol splitting_symbol_sign(const MediumSpec& m, const Vec2& x,
                                  const Vec2& xi, const LaplaceParameter& lp);

SplitSymbol splitting_symbol(SplitMethod method, const MediumSpec& m,
                             const Vec2& x, const Vec2& xi,
                             const LaplaceParameter& lp);

/// Matrix sign of an explicit 4x4 (eigenvalues off the imaginary axis).
Mat4 matrix_sign_newton(const Mat4& a, int max_iter = 100, double tol = 1e-12);

/// l+- = [(+-I + b11); b21] N+- with N = I or b21^{-1}. Requires the involution
/// residual of sp to be <= 1e-9; the impedance normalization additionally
/// guards det b21.
SplitBasis eigenvectors(const SplitSymbol& sp, Normalization norm);

/// s+- = N^{-1} b21^{-1} (a21 (+-I + b11) + a22 b21) N; satisfies
/// a1 l+- = l+- s+-. Throws NumericGuardError with a condition-number report
/// when b21 is numerically singular.
void vertical_wavenumber(SplitBasis& basis, const SplitSymbol& sp,
                         const SymbolPoint& a);

struct RiccatiResult {
  Mat2 y_plus, y_minus;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
};

/// Y+- = (+-I + b11) b21^{-1} and the algebraic Riccati residuals
/// Y a21 Y + Y a22 - a11 Y - a12.
RiccatiResult impedance_and_riccati(const SplitSymbol& sp, const SymbolPoint& a);

/// Convenience: b0, eigenvectors, wave numbers and impedance maps in one call.
SplitBasis split_basis(const SplitSymbol& sp, const SymbolPoint& a,
                       Normalization norm);

}  // namespace wavesplit
