#pragma once

#include <array>
#include <cstdint>

#include "wavesplit/symbols.hpp"

namespace wavesplit {

/// The four lambda-roots of det(alpha_1), classified by the sign of their real
/// part. Exactly two on each side of the imaginary axis for SPD media.
struct RootQuartet {
  std::array<Complex, 2> plus{};   // Re > 0
  std::array<Complex, 2> minus{};  // Re < 0
  bool coalesced_plus = false;
  bool coalesced_minus = false;
  double strip_tau = 0.0;
};

/// Sampled ellipticity and strip constants for one medium.
struct StripReport {
  double tau = 0.0;   // S_R sqrt(eps1 mu1)
  double C0 = 0.0;    // strip bound at s = S_R, lambda_R = tau/2
  double Ce = 0.0;    // sampled min |det alpha_1| on the unit surface
  double C1 = 0.0;    // Ce/8 (half the 1/4 ellipticity margin, R_e = 1)
  double R = 0.0;     // radius beyond which the elliptic estimate is claimed
  std::int64_t samples_checked = 0;
  double eps_hat1 = 0.0;
  double mu_hat1 = 0.0;
  double S_R = 0.0;
  // Measured spectral gap min |Re root| / (Re s sqrt(eps1 mu1)) over the
  // sampled points; reported alongside C0 without reconciling the two.
  double root_gap_ratio = 0.0;
};

/// Roots via companion-matrix eigenvalues. Flags coalescence within a side at
/// 1e-8 relative separation. Throws NumericGuardError when a root lands closer
/// than tau/4 to the imaginary axis (non-SPD input or Re s <= 0).
RootQuartet quartic_roots(const DetCoefficients& dc, double tau);

/// C0(s, lambda) = max_{eta in (0,1)} min(Re s eps1 (1-eta),
///                                        mu1 Re s - lambda_R^2/(eta eps1 Re s)),
/// via the quadratic crossing equation with a golden-section fallback.
/// Throws NumericGuardError outside the strip Q.
double strip_bound_C0(Complex s, Complex lambda, double eps_hat1, double mu_hat1);

/// Brute-force reference for strip_bound_C0 (uniform eta grid).
double strip_bound_C0_grid(Complex s, Complex lambda, double eps_hat1,
                           double mu_hat1, int n_grid);

/// Monte-Carlo ellipticity constants on the surface
/// |xi'|^2 + |s|^2 + |lambda_I|^2 = 1, |arg s| < pi/2, lambda_R = 0, using a
/// seeded Halton sequence. Requires n_samples >= 1000.
StripReport ellipticity_estimate(const MediumSpec& m, double S_R,
                                 std::int64_t n_samples, std::uint64_t seed = 0);

}  // namespace wavesplit
