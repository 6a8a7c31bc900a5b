#include "wavesplit/symbols.hpp"

#include <cmath>

namespace wavesplit {

namespace {
constexpr Complex kI{0.0, 1.0};
}

Mat4 SymbolPoint::a1() const {
  Mat4 a;
  a.block<2, 2>(0, 0) = a11;
  a.block<2, 2>(0, 2) = a12;
  a.block<2, 2>(2, 0) = a21;
  a.block<2, 2>(2, 2) = a22;
  return a;
}

Mat4 SymbolPoint::total() const { return total_at(lambda); }

Mat4 SymbolPoint::total_at(Complex lam) const {
  return a1() - lam * Mat4::Identity();
}

Complex DetCoefficients::eval(Complex lam) const {
  // Horner
  Complex v = c[4];
  for (int k = 3; k >= 0; --k) v = v * lam + c[k];
  return v;
}

SymbolPoint principal_symbol(const MediumSpec& m, const Vec2& x, const Vec2& xi,
                             Complex s, Complex lambda) {
  if (s == Complex(0.0, 0.0)) {
    throw NumericGuardError("principal_symbol: s = 0 (a12, a21 carry s^-1 terms)");
  }
  const Mat3d eps = m.eps.eval(x);
  const Mat3d mu = m.mu.eval(x);
  const Mat2d eb = schur_reduce(eps);
  const Mat2d nu = schur_reduce(mu);
  const double e33 = eps(2, 2), m33 = mu(2, 2);
  const double x1 = xi[0], x2 = xi[1];

  SymbolPoint sp;
  sp.x = x;
  sp.xi = xi;
  sp.s = s;
  sp.lambda = lambda;

  sp.a11 = kI / m33 * (Mat2() << mu(1, 2) * x2, mu(1, 2) * x1,
                       mu(0, 2) * x2, mu(0, 2) * x1).finished()
         + kI / e33 * (Mat2() << eps(0, 2) * x1, -eps(1, 2) * x1,
                       -eps(0, 2) * x2, eps(1, 2) * x2).finished();

  sp.a12 = s * (Mat2() << nu(1, 1), nu(1, 0), nu(0, 1), nu(0, 0)).finished()
         + 1.0 / (s * e33) * (Mat2() << x1 * x1, -x1 * x2,
                              -x1 * x2, x2 * x2).finished();

  sp.a21 = s * (Mat2() << eb(0, 0), -eb(0, 1), -eb(1, 0), eb(1, 1)).finished()
         + 1.0 / (s * m33) * (Mat2() << x2 * x2, x1 * x2,
                              x1 * x2, x1 * x1).finished();

  sp.a22 = kI / m33 * (Mat2() << mu(1, 2) * x2, mu(0, 2) * x2,
                       mu(1, 2) * x1, mu(0, 2) * x1).finished()
         + kI / e33 * (Mat2() << eps(0, 2) * x1, -eps(0, 2) * x2,
                       -eps(1, 2) * x1, eps(1, 2) * x2).finished();
  return sp;
}

Complex det_alpha_direct(const SymbolPoint& sp) { return sp.total().determinant(); }

Complex det_alpha_closed(const MediumSpec& m, const Vec2& x, const Vec2& xi,
                         Complex s, Complex lambda) {
  if (s == Complex(0.0, 0.0)) {
    throw NumericGuardError("det_alpha_closed: s = 0");
  }
  const Mat3d eps = m.eps.eval(x);
  const Mat3d mu = m.mu.eval(x);
  const Mat2d eb = schur_reduce(eps);
  const Mat2d nu = schur_reduce(mu);
  const double e33 = eps(2, 2), m33 = mu(2, 2);
  const double x1 = xi[0], x2 = xi[1];
  const Complex lam = lambda;

  // Two quadratic factors (full-tensor transverse quadratic forms over t33).
  const Complex Qe = lam * lam
      - 2.0 * kI / e33 * (eps(0, 2) * x1 + eps(1, 2) * x2) * lam
      - (eps(0, 0) * x1 * x1 + 2.0 * eps(0, 1) * x1 * x2 + eps(1, 1) * x2 * x2) / e33;
  const Complex Qm = lam * lam
      - 2.0 * kI / m33 * (mu(0, 2) * x1 + mu(1, 2) * x2) * lam
      - (mu(0, 0) * x1 * x1 + 2.0 * mu(0, 1) * x1 * x2 + mu(1, 1) * x2 * x2) / m33;

  const double det_eb = eb(0, 0) * eb(1, 1) - eb(0, 1) * eb(1, 0);
  const double det_nu = nu(0, 0) * nu(1, 1) - nu(0, 1) * nu(1, 0);

  // s^2 bracket: lambda^2 coefficient.
  const double k_ll = 2.0 * eb(0, 1) * nu(0, 1) - eb(0, 0) * nu(1, 1)
                    - eb(1, 1) * nu(0, 0);

  // lambda-linear coefficient: the two triple cross products, each normalized
  // by its own t33.
  const double pe1 = eps(0, 2) / e33, pe2 = eps(1, 2) / e33;
  const double pm1 = mu(0, 2) / m33, pm2 = mu(1, 2) / m33;
  auto trip_mu = [&](int a) {
    return pm1 * (nu(0, 1) * eb(1, a) - nu(1, 1) * eb(0, a))
         + pm2 * (nu(0, 1) * eb(0, a) - nu(0, 0) * eb(1, a));
  };
  auto trip_eps = [&](int a) {
    return pe1 * (eb(0, 1) * nu(1, a) - eb(1, 1) * nu(0, a))
         + pe2 * (eb(0, 1) * nu(0, a) - eb(0, 0) * nu(1, a));
  };
  const Complex k_l = -2.0 * kI * ((trip_mu(0) + trip_eps(0)) * x1 +
                                   (trip_mu(1) + trip_eps(1)) * x2);

  // lambda-free coefficient: Schur quadratic forms times the 2x2 leading
  // minors over t33, minus the mixed cross-product form.
  const double xiE = eb(0, 0) * x1 * x1 + 2.0 * eb(0, 1) * x1 * x2 + eb(1, 1) * x2 * x2;
  const double xiN = nu(0, 0) * x1 * x1 + 2.0 * nu(0, 1) * x1 * x2 + nu(1, 1) * x2 * x2;
  const double min2_mu = mu(0, 0) * mu(1, 1) - mu(0, 1) * mu(0, 1);
  const double min2_eps = eps(0, 0) * eps(1, 1) - eps(0, 1) * eps(0, 1);
  const double ce1 = pe1 * eb(0, 1) - pe2 * eb(0, 0);
  const double ce2 = pe1 * eb(1, 1) - pe2 * eb(1, 0);
  const double cm1 = pm1 * nu(0, 1) - pm2 * nu(0, 0);
  const double cm2 = pm1 * nu(1, 1) - pm2 * nu(1, 0);
  const double k_0 = xiE * min2_mu / m33 + xiN * min2_eps / e33
                   - 2.0 * (ce1 * x1 + ce2 * x2) * (cm1 * x1 + cm2 * x2);

  const Complex s2 = s * s;
  return Qe * Qm + s2 * s2 * (det_eb * det_nu)
       + s2 * (k_ll * lam * lam + k_l * lam + k_0);
}

DetCoefficients det_coefficients(const SymbolPoint& sp) {
  // 5 lambda samples: scaled fifth roots of unity condition the Vandermonde.
  const double rho = std::sqrt(sp.xi.squaredNorm() + std::norm(sp.s));
  Eigen::Matrix<Complex, 5, 5> V;
  Eigen::Matrix<Complex, 5, 1> d;
  for (int j = 0; j < 5; ++j) {
    const Complex lam = rho * std::exp(kI * (2.0 * M_PI * j / 5.0));
    Complex p = 1.0;
    for (int k = 0; k < 5; ++k) {
      V(j, k) = p;
      p *= lam;
    }
    d(j) = sp.total_at(lam).determinant();
  }
  const Eigen::Matrix<Complex, 5, 1> c = V.partialPivLu().solve(d);
  DetCoefficients out;
  const Complex lead = c(4);
  if (lead == Complex(0.0, 0.0)) {
    throw NumericGuardError("det_coefficients: degenerate Vandermonde solve");
  }
  for (int k = 0; k < 5; ++k) out.c[k] = c(k) / lead;
  out.c[4] = Complex(1.0, 0.0);
  return out;
}

DetCoefficients det_coefficients(const MediumSpec& m, const Vec2& x,
                                 const Vec2& xi, Complex s) {
  return det_coefficients(principal_symbol(m, x, xi, s, Complex(0.0, 0.0)));
}

Mat2 hat_adjugate(const Mat2& b) {
  Mat2 out;
  out << b(1, 1), -b(0, 1), -b(1, 0), b(0, 0);
  return out;
}

Mat2 char_symbol(const SymbolPoint& sp) {
  const Complex det21 = sp.a21.determinant();
  const double scale21 = sp.a21.cwiseAbs().maxCoeff();
  if (std::abs(det21) < 1e-14 * scale21 * scale21) {
    throw NumericGuardError("char_symbol: a21 block numerically singular");
  }
  const Mat2 I = Mat2::Identity();
  const Mat2 e1 = sp.a12 - (sp.a11 - sp.lambda * I) * hat_adjugate(sp.a21) *
                               (sp.a22 - sp.lambda * I) / det21;
  // Factorization check, Eq.-level invariant: det(alpha_1) = det(e_1) det(a21).
  const Complex lhs = det_alpha_direct(sp);
  const Complex rhs = e1.determinant() * det21;
  const double mag = std::max(std::abs(lhs), std::abs(rhs));
  if (mag > 0.0 && std::abs(lhs - rhs) > 1e-8 * mag) {
    throw NumericGuardError("char_symbol: determinant factorization check failed");
  }
  return e1;
}

}  // namespace wavesplit
