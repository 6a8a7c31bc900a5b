#pragma once

#include <array>

#include "wavesplit/medium.hpp"
#include "wavesplit/types.hpp"

namespace wavesplit {

/// Principal symbol of the system's matrix at one point (x, xi', s), stored as
/// four 2x2 blocks a_{jk;1}; alpha_1 = a_1 - lambda I.
struct SymbolPoint {
  Vec2 x{0.0, 0.0};
  Vec2 xi{0.0, 0.0};
  Complex s{1.0, 0.0};
  Complex lambda{0.0, 0.0};
  Mat2 a11, a12, a21, a22;

  Mat4 a1() const;
  /// alpha_1 = a_1 - lambda I at the stored lambda.
  Mat4 total() const;
  Mat4 total_at(Complex lam) const;
};

/// Coefficients of det(alpha_1) as a monic quartic in lambda at fixed
/// (x, xi', s): det = sum_k c[k] lambda^k, c[4] = 1.
struct DetCoefficients {
  std::array<Complex, 5> c{};

  Complex eval(Complex lam) const;
};

/// Assembles the four principal-symbol blocks. Throws NumericGuardError when
/// s == 0 (a12, a21 carry s^{-1} terms).
SymbolPoint principal_symbol(const MediumSpec& m, const Vec2& x, const Vec2& xi,
                             Complex s, Complex lambda);

/// Direct 4x4 determinant of alpha_1. Runtime default.
Complex det_alpha_direct(const SymbolPoint& sp);

/// Term-by-term closed form of det(alpha_1): two quadratic lambda-factors,
/// an s^4 Schur-determinant term and an s^2 bracket. Retained as a test
/// oracle against det_alpha_direct.
Complex det_alpha_closed(const MediumSpec& m, const Vec2& x, const Vec2& xi,
                         Complex s, Complex lambda);

/// Quartic coefficients by evaluation at 5 scaled fifth-roots of unity and a
/// Vandermonde solve; normalized monic.
DetCoefficients det_coefficients(const MediumSpec& m, const Vec2& x,
                                 const Vec2& xi, Complex s);
DetCoefficients det_coefficients(const SymbolPoint& sp);

/// hat(b) = [[b22, -b12], [-b21, b11]]; hat(b) b = det(b) I.
Mat2 hat_adjugate(const Mat2& b);

/// Characteristic symbol e_1 = a12 - (a11 - lambda) hat(a21) (a22 - lambda) / det(a21).
/// Verifies det(alpha_1) = det(e_1) det(a21) and throws NumericGuardError on a
/// near-singular a21 block.
Mat2 char_symbol(const SymbolPoint& sp);

}  // namespace wavesplit
