#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wavesplit/splitting.hpp"

namespace wavesplit {

/// Complex 4-vector field F = (E1, -E2, H2, H1) on a uniform periodic
/// transverse grid. Channel-major storage, row-major within a channel
/// (i1 outer, i2 inner).
struct FieldGrid {
  int nx1 = 0, nx2 = 0;
  double L1 = 0.0, L2 = 0.0;
  double x3 = 0.0;
  LaplaceParameter s;
  std::vector<Complex> data;  // size 4 * nx1 * nx2

  FieldGrid() = default;
  FieldGrid(int n1, int n2, double l1, double l2, const LaplaceParameter& lp);

  int size() const { return nx1 * nx2; }
  Complex& at(int c, int i1, int i2) { return data[(c * nx1 + i1) * nx2 + i2]; }
  Complex at(int c, int i1, int i2) const { return data[(c * nx1 + i1) * nx2 + i2]; }

  Vec2 grid_point(int i1, int i2) const;
  /// Signed Fourier wavenumber of mode (k1, k2), xi = 2 pi k~ / L.
  Vec2 mode_xi(int k1, int k2) const;

  bool same_geometry(const FieldGrid& o) const;
};

/// One-way constituents W = (w+_1, w+_2, w-_1, w-_2), same layout as FieldGrid.
using WaveGrid = FieldGrid;

/// 3-vector current densities J (electric) and K (magnetic), normalized units.
struct SourceGrid {
  int nx1 = 0, nx2 = 0;
  double L1 = 0.0, L2 = 0.0;
  std::vector<Complex> J;  // 3 channels
  std::vector<Complex> K;  // 3 channels

  SourceGrid() = default;
  SourceGrid(int n1, int n2, double l1, double l2);
  static SourceGrid zero_like(const FieldGrid& f);

  Complex& j(int c, int i1, int i2) { return J[(c * nx1 + i1) * nx2 + i2]; }
  Complex j(int c, int i1, int i2) const { return J[(c * nx1 + i1) * nx2 + i2]; }
  Complex& k(int c, int i1, int i2) { return K[(c * nx1 + i1) * nx2 + i2]; }
  Complex k(int c, int i1, int i2) const { return K[(c * nx1 + i1) * nx2 + i2]; }
};

/// Complex 3-vector field (e.g. E or H with all three components).
struct Vec3Grid {
  int nx1 = 0, nx2 = 0;
  double L1 = 0.0, L2 = 0.0;
  std::vector<Complex> data;  // 3 channels

  Vec3Grid() = default;
  Vec3Grid(int n1, int n2, double l1, double l2);
  Complex& at(int c, int i1, int i2) { return data[(c * nx1 + i1) * nx2 + i2]; }
  Complex at(int c, int i1, int i2) const { return data[(c * nx1 + i1) * nx2 + i2]; }
};

// ---- FFT plumbing (FFTW backed) -------------------------------------------

/// In-place 2D FFT of one channel-sized plane; forward is unnormalized, the
/// inverse divides by nx1*nx2.
void fft2(std::vector<Complex>& plane, int nx1, int nx2, bool forward);

/// Spectral partial derivative along axis (0 -> x1, 1 -> x2) of one plane.
std::vector<Complex> spectral_derivative(const std::vector<Complex>& plane,
                                         int nx1, int nx2, double L1, double L2,
                                         int axis);

// ---- field assembly --------------------------------------------------------

/// F = (E1, -E2, H2, H1) pointwise from transverse E, H.
FieldGrid to_field_matrix(const Vec3Grid& E, const Vec3Grid& H,
                          const LaplaceParameter& lp, double x3 = 0.0);

/// Restores transverse (E1, E2), (H1, H2) from F (third components zeroed).
void from_field_matrix(const FieldGrid& F, Vec3Grid& E, Vec3Grid& H);

/// Vertical components from the transverse ones:
///   s mu33 H3 = -s mu_{3b} H_b - (curl E)_3 + K3,
///   s eps33 E3 = -s eps_{3b} E_b + (curl H)_3 - J3.
/// Curls are spectral; material products pointwise.
void vertical_components(const FieldGrid& F, const MediumSpec& m,
                         const SourceGrid& src, Vec3Grid& E3H3);

/// Source matrix N (4 channels) with spectral derivatives.
FieldGrid assemble_sources(const SourceGrid& src, const MediumSpec& m,
                           const LaplaceParameter& lp);

// ---- one-way decomposition (homogeneous media, exact per mode) -------------

struct DecomposeOptions {
  SplitMethod method = SplitMethod::sign;
  Normalization norm = Normalization::identity;
};

/// Per-mode W = L^{-1} F with L = [l+ l-]. Throws NumericGuardError naming the
/// mode when L is singular. Homogeneous media only.
WaveGrid decompose(const FieldGrid& F, const MediumSpec& m,
                   const DecomposeOptions& opt = {});

/// Per-mode F = L W.
FieldGrid recompose(const WaveGrid& W, const MediumSpec& m,
                    const DecomposeOptions& opt = {});

struct PropagateOptions {
  SplitMethod method = SplitMethod::sign;
  Normalization norm = Normalization::identity;
  /// The growing (-) family is propagated forward only with this override.
  bool allow_growth = false;
  double growth_guard = 1e12;
};

/// One-way step: per mode W+- <- exp(-s+- h) W+-. For h > 0 the (-) family
/// grows; that requires allow_growth and is still guarded at growth_guard.
WaveGrid propagate_oneway(const WaveGrid& W, const MediumSpec& m, double h,
                          const PropagateOptions& opt = {});

/// Reference two-way solver: per mode F <- exp(-a1(xi, s) h) F.
FieldGrid twoway_oracle(const FieldGrid& F, const MediumSpec& m, double h);

// ---- I/O -------------------------------------------------------------------

void write_field_dump(const FieldGrid& f, const std::string& path);
FieldGrid read_field_dump(const std::string& path);
void write_field_csv(const FieldGrid& f, std::ostream& os);

}  // namespace wavesplit
