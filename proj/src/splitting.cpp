#include "wavesplit/splitting.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace wavesplit {

namespace {

constexpr Complex kI{0.0, 1.0};

double binom(int n, int k) {
  double v = 1.0;
  for (int j = 1; j <= k; ++j) v *= static_cast<double>(n - k + j) / j;
  return v;
}

/// Taylor coefficients around `center` of lambda^n * prod_j (lambda - r_j)^{-K_j}.
std::vector<Complex> taylor_rational(int n,
                                     const std::vector<std::pair<Complex, int>>& poles,
                                     Complex center, int count) {
  std::vector<Complex> ser(count, Complex(0.0, 0.0));
  for (int j = 0; j <= n && j < count; ++j) {
    ser[j] = binom(n, j) * std::pow(center, n - j);
  }
  std::vector<Complex> tmp(count);
  for (const auto& [r, K] : poles) {
    const Complex base = center - r;
    std::vector<Complex> inv(count);
    Complex c = std::pow(base, -K);
    inv[0] = c;
    for (int j = 1; j < count; ++j) {
      c *= -Complex(K + j - 1.0) / (Complex(static_cast<double>(j)) * base);
      inv[j] = c;
    }
    std::fill(tmp.begin(), tmp.end(), Complex(0.0, 0.0));
    for (int i = 0; i < count; ++i) {
      if (ser[i] == Complex(0.0, 0.0)) continue;
      for (int j = 0; i + j < count; ++j) tmp[i + j] += ser[i] * inv[j];
    }
    ser.swap(tmp);
  }
  return ser;
}

/// Sum over one root pair {a1, a2} (multiplicity m each in det^m) of the
/// residues of lambda^n / det^m. Near-coalescent pairs go through the
/// center expansion; well-separated pairs through per-pole residues.
Complex side_residue_sum(int n, int m, const std::array<Complex, 2>& side,
                         const std::array<Complex, 2>& other, bool coalesced) {
  const Complex a1 = side[0], a2 = side[1];
  const Complex c = 0.5 * (a1 + a2);
  const Complex d = 0.5 * (a1 - a2);
  double dist = std::min(std::abs(c - other[0]), std::abs(c - other[1]));
  const std::vector<std::pair<Complex, int>> others{{other[0], m}, {other[1], m}};

  if (coalesced || std::abs(d) <= 0.25 * dist) {
    // sum of residues = sum_j C(m+j-1, j) d^{2j} T_{2m-1+2j}, T = Taylor
    // coefficients of lambda^n / q_other(lambda)^m at the pair center.
    const int max_j = 64;
    const auto T = taylor_rational(n, others, c, 2 * m + 2 * max_j + 1);
    Complex acc(0.0, 0.0);
    Complex d2j(1.0, 0.0);
    const Complex d2 = d * d;
    for (int j = 0; j <= max_j; ++j) {
      const Complex term = binom(m + j - 1, j) * d2j * T[2 * m - 1 + 2 * j];
      acc += term;
      if (j > 2 && std::abs(term) <= 1e-18 * std::abs(acc)) break;
      d2j *= d2;
    }
    return acc;
  }
  // Distinct roots: residue at each pole is the (m-1)-th Taylor coefficient of
  // the integrand with that pole's own factor removed.
  Complex acc(0.0, 0.0);
  for (int i = 0; i < 2; ++i) {
    auto poles = others;
    poles.emplace_back(side[1 - i], m);
    const auto T = taylor_rational(n, poles, side[i], m);
    acc += T[m - 1];
  }
  return acc;
}

/// m = 1 exact pair sums: divided-difference forms of the partial-fraction
/// coefficients whose denominators only involve cross-pair differences
/// (bounded below by the strip width), valid through coalescence.
std::array<Complex, 4> pair_sums_m1(const std::array<Complex, 2>& side,
                                    const std::array<Complex, 2>& other) {
  const Complex a1 = side[0], a2 = side[1];
  const Complex sb = other[0] + other[1];
  const Complex pb = other[0] * other[1];
  auto q = [&](Complex z) { return (z - other[0]) * (z - other[1]); };
  const Complex den = q(a1) * q(a2);
  const Complex p = a1 * a2, t = a1 + a2;
  return {(sb - t) / den,
          (pb - p) / den,
          (pb * t - sb * p) / den,
          (p * p - sb * p * t + pb * (a1 * a1 + a1 * a2 + a2 * a2)) / den};
}

Mat2 inverse_with_guard(const Mat2& b, const char* who, double cond_limit = 1e12) {
  Eigen::JacobiSVD<Mat2> svd(b);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > cond_limit) {
    std::ostringstream os;
    os << who << ": b21 numerically singular (condition number "
       << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity())
       << ")";
    throw NumericGuardError(os.str());
  }
  return b.inverse();
}

double involution_residual(const Mat4& b) {
  return (b * b - Mat4::Identity()).norm();
}

}  // namespace

SplitSymbol SplitSymbol::from_matrix(const Mat4& b, SplitMethod method,
                                     const RootQuartet& roots) {
  SplitSymbol sp;
  sp.b0 = b;
  sp.b11 = b.block<2, 2>(0, 0);
  sp.b12 = b.block<2, 2>(0, 2);
  sp.b21 = b.block<2, 2>(2, 0);
  sp.b22 = b.block<2, 2>(2, 2);
  sp.method = method;
  sp.roots = roots;
  return sp;
}

Complex integrate_Inm(const RootQuartet& roots, int n, int m) {
  if (n < 0 || m < 1) {
    throw ConfigError("integrate_Inm: need n >= 0 and m >= 1");
  }
  if (4 * m - n < 1) {
    std::ostringstream os;
    os << "integrate_Inm: divergent integral for (n, m) = (" << n << ", " << m
       << ") (needs 4m - n >= 1)";
    throw NumericGuardError(os.str());
  }
  if (m == 1) {
    const auto sp = pair_sums_m1(roots.plus, roots.minus);
    const auto sm = pair_sums_m1(roots.minus, roots.plus);
    return M_PI * (sm[n] - sp[n]);
  }
  const Complex sp =
      side_residue_sum(n, m, roots.plus, roots.minus, roots.coalesced_plus);
  const Complex sm =
      side_residue_sum(n, m, roots.minus, roots.plus, roots.coalesced_minus);
  return M_PI * (sm - sp);
}

SplitSymbol splitting_symbol_residue(const MediumSpec& m, const Vec2& x,
                                     const Vec2& xi, const LaplaceParameter& lp) {
  if (!(lp.s.real() > 0.0)) {
    throw NumericGuardError("splitting_symbol_residue: Re s must be positive");
  }
  const SymbolPoint sp = principal_symbol(m, x, xi, lp.s, Complex(0.0, 0.0));
  const DetCoefficients dc = det_coefficients(sp);
  const RootQuartet roots = quartic_roots(dc, lp.tau(m));

  // Each resolvent entry is (cubic in lambda)/det; recover the matrix cubic by
  // adjugate interpolation at 4 nodes on the imaginary axis (inside the strip).
  const double rho = std::sqrt(xi.squaredNorm() + std::norm(lp.s));
  const std::array<double, 4> ts{-1.5, -0.5, 0.5, 1.5};
  Eigen::Matrix<Complex, 4, 4> V;
  Eigen::Matrix<Complex, 4, 16> B;
  for (int j = 0; j < 4; ++j) {
    const Complex lam = kI * (rho * ts[j]);
    Complex p(1.0, 0.0);
    for (int k = 0; k < 4; ++k) {
      V(j, k) = p;
      p *= lam;
    }
    const Mat4 alpha = sp.total_at(lam);
    const Mat4 adj = alpha.determinant() * alpha.inverse();
    for (int e = 0; e < 16; ++e) B(j, e) = adj(e / 4, e % 4);
  }
  const Eigen::Matrix<Complex, 4, 16> C = V.partialPivLu().solve(B);

  // b0 = (1/pi) sum_k C_k I_{k,1}; I/pi = (left residue sums) - (right).
  const auto sum_p = pair_sums_m1(roots.plus, roots.minus);
  const auto sum_m = pair_sums_m1(roots.minus, roots.plus);
  Mat4 b0 = Mat4::Zero();
  for (int k = 0; k < 4; ++k) {
    const Complex w = sum_m[k] - sum_p[k];
    for (int e = 0; e < 16; ++e) b0(e / 4, e % 4) += w * C(k, e);
  }
  return SplitSymbol::from_matrix(b0, SplitMethod::residue, roots);
}

Mat4 matrix_sign_newton(const Mat4& a, int max_iter, double tol) {
  Mat4 x = a;
  for (int it = 0; it < max_iter; ++it) {
    double resid = involution_residual(x);
    if (resid <= tol) return x;
    if (resid > 1e-2) {
      // determinantal scaling accelerates the pre-asymptotic phase
      const double mu = std::pow(std::abs(x.determinant()), -0.25);
      if (std::isfinite(mu) && mu > 0.0) x *= mu;
    }
    const Mat4 xinv = x.inverse();
    if (!xinv.allFinite()) {
      throw NumericGuardError("matrix_sign_newton: singular iterate "
                              "(eigenvalue on the imaginary axis?)");
    }
    x = 0.5 * (x + xinv);
  }
  if (involution_residual(x) <= tol) return x;
  throw NumericGuardError("matrix_sign_newton: no convergence after " +
                          std::to_string(max_iter) +
                          " iterations (eigenvalue near the imaginary axis?)");
}

SplitSymbol splitting_symbol_sign(const MediumSpec& m, const Vec2& x,
                                  const Vec2& xi, const LaplaceParameter& lp) {
  if (!(lp.s.real() > 0.0)) {
    throw NumericGuardError("splitting_symbol_sign: Re s must be positive");
  }
  const SymbolPoint sp = principal_symbol(m, x, xi, lp.s, Complex(0.0, 0.0));
  const RootQuartet roots = quartic_roots(det_coefficients(sp), lp.tau(m));
  const Mat4 b0 = matrix_sign_newton(sp.a1());
  return SplitSymbol::from_matrix(b0, SplitMethod::sign, roots);
}

SplitSymbol splitting_symbol(SplitMethod method, const MediumSpec& m,
                             const Vec2& x, const Vec2& xi,
                             const LaplaceParameter& lp) {
  return method == SplitMethod::residue ? splitting_symbol_residue(m, x, xi, lp)
                                        : splitting_symbol_sign(m, x, xi, lp);
}

SplitBasis eigenvectors(const SplitSymbol& sp, Normalization norm) {
  const double resid = involution_residual(sp.b0);
  if (resid > 1e-9) {
    throw NumericGuardError("eigenvectors: involution residual " +
                            std::to_string(resid) + " exceeds 1e-9");
  }
  SplitBasis basis;
  basis.norm = norm;
  const Mat2 I = Mat2::Identity();
  Mat2 n_plus = I, n_minus = I;
  if (norm == Normalization::impedance) {
    const Mat2 b21_inv = inverse_with_guard(sp.b21, "eigenvectors(impedance)");
    n_plus = b21_inv;
    n_minus = b21_inv;
  }
  basis.l_plus.topRows<2>() = (I + sp.b11) * n_plus;
  basis.l_plus.bottomRows<2>() = sp.b21 * n_plus;
  basis.l_minus.topRows<2>() = (-I + sp.b11) * n_minus;
  basis.l_minus.bottomRows<2>() = sp.b21 * n_minus;
  return basis;
}

void vertical_wavenumber(SplitBasis& basis, const SplitSymbol& sp,
                         const SymbolPoint& a) {
  const Mat2 I = Mat2::Identity();
  const Mat2 b21_inv = inverse_with_guard(sp.b21, "vertical_wavenumber");
  Mat2 n = I, n_inv = I;
  if (basis.norm == Normalization::impedance) {
    n = b21_inv;
    n_inv = sp.b21;
  }
  basis.s_plus = n_inv * b21_inv * (a.a21 * (I + sp.b11) + a.a22 * sp.b21) * n;
  basis.s_minus = n_inv * b21_inv * (a.a21 * (-I + sp.b11) + a.a22 * sp.b21) * n;
}

RiccatiResult impedance_and_riccati(const SplitSymbol& sp, const SymbolPoint& a) {
  const Mat2 I = Mat2::Identity();
  const Mat2 b21_inv = inverse_with_guard(sp.b21, "impedance_and_riccati");
  RiccatiResult out;
  out.y_plus = (I + sp.b11) * b21_inv;
  out.y_minus = (-I + sp.b11) * b21_inv;
  auto resid = [&](const Mat2& y) {
    return (y * a.a21 * y + y * a.a22 - a.a11 * y - a.a12).norm();
  };
  out.residual_plus = resid(out.y_plus);
  out.residual_minus = resid(out.y_minus);
  return out;
}

SplitBasis split_basis(const SplitSymbol& sp, const SymbolPoint& a,
                       Normalization norm) {
  SplitBasis basis = eigenvectors(sp, norm);
  vertical_wavenumber(basis, sp, a);
  const RiccatiResult r = impedance_and_riccati(sp, a);
  basis.y_plus = r.y_plus;
  basis.y_minus = r.y_minus;
  return basis;
}

}  // namespace wavesplit
