#include "wavesplit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wavesplit {

namespace {

constexpr Complex kI{0.0, 1.0};

/// Halton low-discrepancy sequence value, index i (1-based internally), prime base.
double halton(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  for (std::uint64_t n = i + 1; n > 0; n /= base) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(n % base);
  }
  return r;
}

}  // namespace

RootQuartet quartic_roots(const DetCoefficients& dc, double tau) {
  if (!(tau > 0.0)) throw ConfigError("quartic_roots: tau must be positive");
  // Companion matrix of the monic quartic.
  Mat4 comp = Mat4::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = Complex(1.0, 0.0);
  for (int k = 0; k < 4; ++k) comp(k, 3) = -dc.c[k];
  Eigen::ComplexEigenSolver<Mat4> es(comp, /*computeEigenvectors=*/false);
  const auto ev = es.eigenvalues();

  std::vector<Complex> plus, minus;
  for (int k = 0; k < 4; ++k) {
    const Complex r = ev(k);
    if (std::abs(r.real()) < tau / 4.0) {
      std::ostringstream os;
      os << "quartic_roots: root " << r << " violates the resolvent strip |Re| >= "
         << tau / 4.0 << " (non-SPD medium or Re s <= 0?)";
      throw NumericGuardError(os.str());
    }
    (r.real() > 0.0 ? plus : minus).push_back(r);
  }
  if (plus.size() != 2 || minus.size() != 2) {
    throw NumericGuardError("quartic_roots: expected two roots on each side of "
                            "the imaginary axis");
  }
  auto by_imag = [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); };
  std::sort(plus.begin(), plus.end(), by_imag);
  std::sort(minus.begin(), minus.end(), by_imag);

  RootQuartet q;
  q.plus = {plus[0], plus[1]};
  q.minus = {minus[0], minus[1]};
  q.strip_tau = tau;
  auto coalesced = [](const Complex& a, const Complex& b) {
    return std::abs(a - b) < 1e-8 * std::max(std::abs(a), std::abs(b));
  };
  q.coalesced_plus = coalesced(q.plus[0], q.plus[1]);
  q.coalesced_minus = coalesced(q.minus[0], q.minus[1]);
  return q;
}

double strip_bound_C0(Complex s, Complex lambda, double eps_hat1, double mu_hat1) {
  const double sr = s.real();
  const double lr = lambda.real();
  if (!(sr > 0.0) || !(lr * lr < sr * sr * eps_hat1 * mu_hat1)) {
    throw NumericGuardError("strip_bound_C0: (s, lambda) outside strip Q");
  }
  auto f1 = [&](double eta) { return sr * eps_hat1 * (1.0 - eta); };
  auto f2 = [&](double eta) { return mu_hat1 * sr - lr * lr / (eta * eps_hat1 * sr); };

  if (lr == 0.0) {
    // second branch is eta-independent; the min is maximized as eta -> 0.
    return sr * std::min(eps_hat1, mu_hat1);
  }
  // Crossing f1 = f2: A eta^2 + (B - A) eta - lr^2 = 0 with
  // A = (sr eps1)^2, B = sr^2 eps1 mu1. One root in (0, 1) inside Q.
  const double A = sr * sr * eps_hat1 * eps_hat1;
  const double B = sr * sr * eps_hat1 * mu_hat1;
  const double disc = (B - A) * (B - A) + 4.0 * A * lr * lr;
  const double eta = ((A - B) + std::sqrt(disc)) / (2.0 * A);
  if (eta > 0.0 && eta < 1.0 &&
      std::abs(f1(eta) - f2(eta)) <= 1e-9 * (std::abs(f1(eta)) + sr * eps_hat1)) {
    return f1(eta);
  }
  // Golden-section fallback on the unimodal min(f1, f2).
  auto g = [&](double eta_) { return std::min(f1(eta_), f2(eta_)); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-14, b = 1.0 - 1e-14;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (g(c) > g(d)) b = d; else a = c;
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return g(0.5 * (a + b));
}

double strip_bound_C0_grid(Complex s, Complex lambda, double eps_hat1,
                           double mu_hat1, int n_grid) {
  const double sr = s.real();
  const double lr = lambda.real();
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < n_grid; ++i) {
    const double eta = static_cast<double>(i) / n_grid;
    const double v = std::min(sr * eps_hat1 * (1.0 - eta),
                              mu_hat1 * sr - lr * lr / (eta * eps_hat1 * sr));
    best = std::max(best, v);
  }
  return best;
}

StripReport ellipticity_estimate(const MediumSpec& m, double S_R,
                                 std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1000) {
    throw ConfigError("ellipticity_estimate: need at least 1000 samples");
  }
  StripReport rep;
  rep.S_R = S_R;
  rep.eps_hat1 = m.eps_hat1;
  rep.mu_hat1 = m.mu_hat1;
  rep.tau = S_R * std::sqrt(m.eps_hat1 * m.mu_hat1);
  rep.C0 = strip_bound_C0(Complex(S_R, 0.0), Complex(rep.tau / 2.0, 0.0),
                          m.eps_hat1, m.mu_hat1);
  rep.samples_checked = n_samples;

  const auto lattice_pts = m.lattice.points();
  const double arg_margin = 0.01;  // keep |arg s| strictly inside pi/2

  double ce = std::numeric_limits<double>::infinity();
  double c_tau_tilde = 0.0;
  double gap_ratio = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const std::uint64_t idx = static_cast<std::uint64_t>(i) + seed;
    // Hyperspherical direction on the unit surface |xi|^2 + |s|^2 + lamI^2 = 1.
    const double t1 = M_PI * halton(idx, 2);
    const double t2 = M_PI * halton(idx, 3);
    const double t3 = 2.0 * M_PI * halton(idx, 5);
    const double sigma = (M_PI / 2.0 - arg_margin) * (2.0 * halton(idx, 7) - 1.0);
    const double x1 = std::cos(t1);
    const double x2 = std::sin(t1) * std::cos(t2);
    const double lam_i = std::sin(t1) * std::sin(t2) * std::cos(t3);
    const double s_mag = std::abs(std::sin(t1) * std::sin(t2) * std::sin(t3));
    const Complex s = s_mag * std::exp(kI * sigma);
    const Vec2 x = lattice_pts[static_cast<std::size_t>(idx % lattice_pts.size())];
    const Vec2 xi(x1, x2);

    // The direct 4x4 determinant loses ~|s|^{-4} digits to cancellation as
    // s -> 0 on this surface (a12, a21 carry s^{-1}); the closed form is a
    // polynomial in s and stays exact there.
    const double ad = std::abs(det_alpha_closed(m, x, xi, s, kI * lam_i));
    if (ad == 0.0) {
      throw NumericGuardError("ellipticity_estimate: det alpha_1 = 0 on the "
                              "sampled surface (SPD violation)");
    }
    ce = std::min(ce, ad);

    // Quartic coefficients at this sample via 5 stable evaluations; their
    // magnitudes feed the C_tau estimate (the material terms in front of
    // lambda_R powers).
    if (s_mag > 1e-9) {
      const double rho = std::sqrt(xi.squaredNorm() + std::norm(s));
      Eigen::Matrix<Complex, 5, 5> V;
      Eigen::Matrix<Complex, 5, 1> d;
      for (int j = 0; j < 5; ++j) {
        const Complex lam = rho * std::exp(kI * (2.0 * M_PI * j / 5.0));
        Complex p = 1.0;
        for (int k = 0; k < 5; ++k) {
          V(j, k) = p;
          p *= lam;
        }
        d(j) = det_alpha_closed(m, x, xi, s, lam);
      }
      const Eigen::Matrix<Complex, 5, 1> cs = V.partialPivLu().solve(d);
      DetCoefficients dc;
      for (int k = 0; k < 5; ++k) dc.c[k] = cs(k) / cs(4);
      double csum = 0.0;
      for (int k = 0; k < 4; ++k) csum += std::abs(dc.c[k]);
      c_tau_tilde = std::max(c_tau_tilde, csum);

      // Spectral gap of the same sample.
      const double tau_s = s.real() * std::sqrt(m.eps_hat1 * m.mu_hat1);
      const RootQuartet q = quartic_roots(dc, tau_s);
      double min_re = std::numeric_limits<double>::infinity();
      for (const Complex& r : {q.plus[0], q.plus[1], q.minus[0], q.minus[1]}) {
        min_re = std::min(min_re, std::abs(r.real()));
      }
      gap_ratio = std::min(gap_ratio, min_re / tau_s);
    }
  }

  rep.Ce = ce;
  rep.C1 = ce / 8.0;  // half of the 1/4 margin at R_e = 1
  const double c_tau = std::max(c_tau_tilde, ce);
  const double denom = ce / 4.0 - rep.C1;  // = ce/8 by construction
  const double r_growth = c_tau * rep.tau / denom;
  rep.R = std::sqrt(std::max(1.0 + rep.tau * rep.tau, r_growth * r_growth));
  rep.root_gap_ratio = gap_ratio;
  return rep;
}

}  // namespace wavesplit
