#include "wavesplit/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "wavesplit/expm.hpp"

namespace wavesplit {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr char kDumpMagic[8] = {'W', 'S', 'F', 'I', 'E', 'L', 'D', '\0'};
constexpr char kOrderingTag[16] = "E1,-E2,H2,H1";

// FFTW plan creation is not thread safe.
std::mutex fftw_mutex;

int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

/// Per-mode split data for a homogeneous medium.
struct ModeSplit {
  Mat4 l;       // [l+ l-]
  Mat4 l_inv;
  Mat2 s_plus, s_minus;
};

ModeSplit mode_split(const MediumSpec& m, const LaplaceParameter& lp,
                     const Vec2& xi, SplitMethod method, Normalization norm,
                     int k1, int k2) {
  const Vec2 x = Vec2::Zero();
  try {
    const SplitSymbol ss = splitting_symbol(method, m, x, xi, lp);
    const SymbolPoint a = principal_symbol(m, x, xi, lp.s, Complex(0.0, 0.0));
    const SplitBasis basis = split_basis(ss, a, norm);
    ModeSplit out;
    out.l.block<4, 2>(0, 0) = basis.l_plus;
    out.l.block<4, 2>(0, 2) = basis.l_minus;
    Eigen::FullPivLU<Mat4> lu(out.l);
    if (!lu.isInvertible()) {
      throw NumericGuardError("composition operator L singular");
    }
    out.l_inv = lu.inverse();
    out.s_plus = basis.s_plus;
    out.s_minus = basis.s_minus;
    return out;
  } catch (const NumericGuardError& e) {
    std::ostringstream os;
    os << "mode (" << k1 << ", " << k2 << "): " << e.what();
    throw NumericGuardError(os.str());
  }
}

void require_homogeneous(const MediumSpec& m, const char* who) {
  if (!m.homogeneous) {
    throw ConfigError(std::string(who) +
                      ": exact per-mode splitting requires a homogeneous medium");
  }
}

}  // namespace

FieldGrid::FieldGrid(int n1, int n2, double l1, double l2,
                     const LaplaceParameter& lp)
    : nx1(n1), nx2(n2), L1(l1), L2(l2), s(lp),
      data(static_cast<std::size_t>(4) * n1 * n2, Complex(0.0, 0.0)) {
  if (n1 <= 0 || n2 <= 0 || !(l1 > 0.0) || !(l2 > 0.0)) {
    throw ConfigError("FieldGrid: sizes and extents must be positive");
  }
}

Vec2 FieldGrid::grid_point(int i1, int i2) const {
  return {L1 * i1 / nx1, L2 * i2 / nx2};
}

Vec2 FieldGrid::mode_xi(int k1, int k2) const {
  return {2.0 * M_PI * signed_freq(k1, nx1) / L1,
          2.0 * M_PI * signed_freq(k2, nx2) / L2};
}

bool FieldGrid::same_geometry(const FieldGrid& o) const {
  return nx1 == o.nx1 && nx2 == o.nx2 && L1 == o.L1 && L2 == o.L2;
}

SourceGrid::SourceGrid(int n1, int n2, double l1, double l2)
    : nx1(n1), nx2(n2), L1(l1), L2(l2),
      J(static_cast<std::size_t>(3) * n1 * n2, Complex(0.0, 0.0)),
      K(static_cast<std::size_t>(3) * n1 * n2, Complex(0.0, 0.0)) {}

SourceGrid SourceGrid::zero_like(const FieldGrid& f) {
  return SourceGrid(f.nx1, f.nx2, f.L1, f.L2);
}

Vec3Grid::Vec3Grid(int n1, int n2, double l1, double l2)
    : nx1(n1), nx2(n2), L1(l1), L2(l2),
      data(static_cast<std::size_t>(3) * n1 * n2, Complex(0.0, 0.0)) {}

void fft2(std::vector<Complex>& plane, int nx1, int nx2, bool forward) {
  static_assert(sizeof(Complex) == sizeof(fftw_complex));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> g(fftw_mutex);
    plan = fftw_plan_dft_2d(nx1, nx2, reinterpret_cast<fftw_complex*>(plane.data()),
                            reinterpret_cast<fftw_complex*>(plane.data()),
                            forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> g(fftw_mutex);
    fftw_destroy_plan(plan);
  }
  if (!forward) {
    const double inv = 1.0 / (static_cast<double>(nx1) * nx2);
    for (Complex& v : plane) v *= inv;
  }
}

std::vector<Complex> spectral_derivative(const std::vector<Complex>& plane,
                                         int nx1, int nx2, double L1, double L2,
                                         int axis) {
  std::vector<Complex> out = plane;
  fft2(out, nx1, nx2, true);
  for (int k1 = 0; k1 < nx1; ++k1) {
    const double xi1 = 2.0 * M_PI * signed_freq(k1, nx1) / L1;
    for (int k2 = 0; k2 < nx2; ++k2) {
      const double xi2 = 2.0 * M_PI * signed_freq(k2, nx2) / L2;
      out[static_cast<std::size_t>(k1) * nx2 + k2] *= kI * (axis == 0 ? xi1 : xi2);
    }
  }
  fft2(out, nx1, nx2, false);
  return out;
}

FieldGrid to_field_matrix(const Vec3Grid& E, const Vec3Grid& H,
                          const LaplaceParameter& lp, double x3) {
  if (E.nx1 != H.nx1 || E.nx2 != H.nx2 || E.L1 != H.L1 || E.L2 != H.L2) {
    throw ConfigError("to_field_matrix: E and H grids do not match");
  }
  FieldGrid f(E.nx1, E.nx2, E.L1, E.L2, lp);
  f.x3 = x3;
  for (int i1 = 0; i1 < f.nx1; ++i1) {
    for (int i2 = 0; i2 < f.nx2; ++i2) {
      f.at(0, i1, i2) = E.at(0, i1, i2);
      f.at(1, i1, i2) = -E.at(1, i1, i2);
      f.at(2, i1, i2) = H.at(1, i1, i2);
      f.at(3, i1, i2) = H.at(0, i1, i2);
    }
  }
  return f;
}

void from_field_matrix(const FieldGrid& F, Vec3Grid& E, Vec3Grid& H) {
  E = Vec3Grid(F.nx1, F.nx2, F.L1, F.L2);
  H = Vec3Grid(F.nx1, F.nx2, F.L1, F.L2);
  for (int i1 = 0; i1 < F.nx1; ++i1) {
    for (int i2 = 0; i2 < F.nx2; ++i2) {
      E.at(0, i1, i2) = F.at(0, i1, i2);
      E.at(1, i1, i2) = -F.at(1, i1, i2);
      H.at(0, i1, i2) = F.at(3, i1, i2);
      H.at(1, i1, i2) = F.at(2, i1, i2);
    }
  }
}

void vertical_components(const FieldGrid& F, const MediumSpec& m,
                         const SourceGrid& src, Vec3Grid& E3H3) {
  const int n1 = F.nx1, n2 = F.nx2;
  Vec3Grid E, H;
  from_field_matrix(F, E, H);

  // (curl E)_3 = d1 E2 - d2 E1, spectral derivatives.
  std::vector<Complex> e1(E.data.begin(), E.data.begin() + n1 * n2);
  std::vector<Complex> e2(E.data.begin() + n1 * n2, E.data.begin() + 2 * n1 * n2);
  std::vector<Complex> h1(H.data.begin(), H.data.begin() + n1 * n2);
  std::vector<Complex> h2(H.data.begin() + n1 * n2, H.data.begin() + 2 * n1 * n2);
  const auto d1e2 = spectral_derivative(e2, n1, n2, F.L1, F.L2, 0);
  const auto d2e1 = spectral_derivative(e1, n1, n2, F.L1, F.L2, 1);
  const auto d1h2 = spectral_derivative(h2, n1, n2, F.L1, F.L2, 0);
  const auto d2h1 = spectral_derivative(h1, n1, n2, F.L1, F.L2, 1);

  E3H3 = Vec3Grid(n1, n2, F.L1, F.L2);  // channel 0: E3, channel 1: H3
  const Complex s = F.s.s;
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      const Vec2 x = F.grid_point(i1, i2);
      const Mat3d eps = m.eps.eval(x);
      const Mat3d mu = m.mu.eval(x);
      if (eps(2, 2) <= 0.0 || mu(2, 2) <= 0.0) {
        throw ConfigError("vertical_components: eps33 or mu33 not positive");
      }
      const std::size_t idx = static_cast<std::size_t>(i1) * n2 + i2;
      const Complex curl_e3 = d1e2[idx] - d2e1[idx];
      const Complex curl_h3 = d1h2[idx] - d2h1[idx];
      const Complex h3 =
          (-s * (mu(2, 0) * H.at(0, i1, i2) + mu(2, 1) * H.at(1, i1, i2)) -
           curl_e3 + src.k(2, i1, i2)) /
          (s * mu(2, 2));
      const Complex e3 =
          (-s * (eps(2, 0) * E.at(0, i1, i2) + eps(2, 1) * E.at(1, i1, i2)) +
           curl_h3 - src.j(2, i1, i2)) /
          (s * eps(2, 2));
      E3H3.at(0, i1, i2) = e3;
      E3H3.at(1, i1, i2) = h3;
    }
  }
}

FieldGrid assemble_sources(const SourceGrid& src, const MediumSpec& m,
                           const LaplaceParameter& lp) {
  const int n1 = src.nx1, n2 = src.nx2;
  const Complex s = lp.s;
  FieldGrid N(n1, n2, src.L1, src.L2, lp);

  // Pointwise material products, then spectral derivatives of the products.
  std::vector<Complex> j3_over_e33(static_cast<std::size_t>(n1) * n2);
  std::vector<Complex> k3_over_m33(static_cast<std::size_t>(n1) * n2);
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      const Vec2 x{src.L1 * i1 / n1, src.L2 * i2 / n2};
      const Mat3d eps = m.eps.eval(x);
      const Mat3d mu = m.mu.eval(x);
      if (eps(2, 2) <= 0.0 || mu(2, 2) <= 0.0) {
        throw ConfigError("assemble_sources: eps33 or mu33 not positive");
      }
      const std::size_t idx = static_cast<std::size_t>(i1) * n2 + i2;
      j3_over_e33[idx] = src.j(2, i1, i2) / eps(2, 2);
      k3_over_m33[idx] = src.k(2, i1, i2) / mu(2, 2);
    }
  }
  const auto d1_j3 = spectral_derivative(j3_over_e33, n1, n2, src.L1, src.L2, 0);
  const auto d2_j3 = spectral_derivative(j3_over_e33, n1, n2, src.L1, src.L2, 1);
  const auto d1_k3 = spectral_derivative(k3_over_m33, n1, n2, src.L1, src.L2, 0);
  const auto d2_k3 = spectral_derivative(k3_over_m33, n1, n2, src.L1, src.L2, 1);

  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      const Vec2 x{src.L1 * i1 / n1, src.L2 * i2 / n2};
      const Mat3d eps = m.eps.eval(x);
      const Mat3d mu = m.mu.eval(x);
      const std::size_t idx = static_cast<std::size_t>(i1) * n2 + i2;
      N.at(0, i1, i2) = src.k(1, i1, i2) -
                        mu(1, 2) / mu(2, 2) * src.k(2, i1, i2) - d1_j3[idx] / s;
      N.at(1, i1, i2) = src.k(0, i1, i2) -
                        mu(0, 2) / mu(2, 2) * src.k(2, i1, i2) + d2_j3[idx] / s;
      N.at(2, i1, i2) = -src.j(0, i1, i2) +
                        eps(0, 2) / eps(2, 2) * src.j(2, i1, i2) + d2_k3[idx] / s;
      N.at(3, i1, i2) = src.j(1, i1, i2) -
                        eps(1, 2) / eps(2, 2) * src.j(2, i1, i2) + d1_k3[idx] / s;
    }
  }
  return N;
}

WaveGrid decompose(const FieldGrid& F, const MediumSpec& m,
                   const DecomposeOptions& opt) {
  require_homogeneous(m, "decompose");
  WaveGrid W = F;
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(W.data.begin() + c * F.size(),
                               W.data.begin() + (c + 1) * F.size());
    fft2(plane, F.nx1, F.nx2, true);
    std::copy(plane.begin(), plane.end(), W.data.begin() + c * F.size());
  }
  for (int k1 = 0; k1 < F.nx1; ++k1) {
    for (int k2 = 0; k2 < F.nx2; ++k2) {
      const ModeSplit ms = mode_split(m, F.s, F.mode_xi(k1, k2), opt.method,
                                      opt.norm, k1, k2);
      Vec4c f;
      for (int c = 0; c < 4; ++c) f[c] = W.at(c, k1, k2);
      const Vec4c w = ms.l_inv * f;
      for (int c = 0; c < 4; ++c) W.at(c, k1, k2) = w[c];
    }
  }
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(W.data.begin() + c * F.size(),
                               W.data.begin() + (c + 1) * F.size());
    fft2(plane, F.nx1, F.nx2, false);
    std::copy(plane.begin(), plane.end(), W.data.begin() + c * F.size());
  }
  return W;
}

FieldGrid recompose(const WaveGrid& W, const MediumSpec& m,
                    const DecomposeOptions& opt) {
  require_homogeneous(m, "recompose");
  FieldGrid F = W;
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(F.data.begin() + c * W.size(),
                               F.data.begin() + (c + 1) * W.size());
    fft2(plane, W.nx1, W.nx2, true);
    std::copy(plane.begin(), plane.end(), F.data.begin() + c * W.size());
  }
  for (int k1 = 0; k1 < W.nx1; ++k1) {
    for (int k2 = 0; k2 < W.nx2; ++k2) {
      const ModeSplit ms = mode_split(m, W.s, W.mode_xi(k1, k2), opt.method,
                                      opt.norm, k1, k2);
      Vec4c w;
      for (int c = 0; c < 4; ++c) w[c] = F.at(c, k1, k2);
      const Vec4c f = ms.l * w;
      for (int c = 0; c < 4; ++c) F.at(c, k1, k2) = f[c];
    }
  }
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(F.data.begin() + c * W.size(),
                               F.data.begin() + (c + 1) * W.size());
    fft2(plane, W.nx1, W.nx2, false);
    std::copy(plane.begin(), plane.end(), F.data.begin() + c * W.size());
  }
  return F;
}

WaveGrid propagate_oneway(const WaveGrid& W, const MediumSpec& m, double h,
                          const PropagateOptions& opt) {
  require_homogeneous(m, "propagate_oneway");
  WaveGrid out = W;
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(out.data.begin() + c * W.size(),
                               out.data.begin() + (c + 1) * W.size());
    fft2(plane, W.nx1, W.nx2, true);
    std::copy(plane.begin(), plane.end(), out.data.begin() + c * W.size());
  }
  for (int k1 = 0; k1 < W.nx1; ++k1) {
    for (int k2 = 0; k2 < W.nx2; ++k2) {
      const ModeSplit ms = mode_split(m, W.s, W.mode_xi(k1, k2), opt.method,
                                      opt.norm, k1, k2);
      const Vec2c wp_in(out.at(0, k1, k2), out.at(1, k1, k2));
      const Vec2c wm_in(out.at(2, k1, k2), out.at(3, k1, k2));

      const Mat2 prop_plus = expm(Mat2(-h * ms.s_plus));
      if (prop_plus.norm() > opt.growth_guard) {
        std::ostringstream os;
        os << "propagate_oneway: overflow guard at mode (" << k1 << ", " << k2
           << "): ||exp(-s+ h)|| = " << prop_plus.norm();
        throw NumericGuardError(os.str());
      }
      const Vec2c wp = prop_plus * wp_in;

      Vec2c wm = Vec2c::Zero();
      if (wm_in.norm() > 0.0) {
        if (h > 0.0 && !opt.allow_growth) {
          std::ostringstream os;
          os << "propagate_oneway: growing (-) family propagated forward at mode ("
             << k1 << ", " << k2 << ") without allow_growth";
          throw NumericGuardError(os.str());
        }
        const Mat2 prop_minus = expm(Mat2(-h * ms.s_minus));
        if (prop_minus.norm() > opt.growth_guard) {
          std::ostringstream os;
          os << "propagate_oneway: overflow guard at mode (" << k1 << ", " << k2
             << "): ||exp(-s- h)|| = " << prop_minus.norm();
          throw NumericGuardError(os.str());
        }
        wm = prop_minus * wm_in;
      }
      out.at(0, k1, k2) = wp[0];
      out.at(1, k1, k2) = wp[1];
      out.at(2, k1, k2) = wm[0];
      out.at(3, k1, k2) = wm[1];
    }
  }
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(out.data.begin() + c * W.size(),
                               out.data.begin() + (c + 1) * W.size());
    fft2(plane, W.nx1, W.nx2, false);
    std::copy(plane.begin(), plane.end(), out.data.begin() + c * W.size());
  }
  out.x3 = W.x3 + h;
  return out;
}

FieldGrid twoway_oracle(const FieldGrid& F, const MediumSpec& m, double h) {
  require_homogeneous(m, "twoway_oracle");
  FieldGrid out = F;
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(out.data.begin() + c * F.size(),
                               out.data.begin() + (c + 1) * F.size());
    fft2(plane, F.nx1, F.nx2, true);
    std::copy(plane.begin(), plane.end(), out.data.begin() + c * F.size());
  }
  const Vec2 x0 = Vec2::Zero();
  for (int k1 = 0; k1 < F.nx1; ++k1) {
    for (int k2 = 0; k2 < F.nx2; ++k2) {
      const SymbolPoint sp = principal_symbol(m, x0, F.mode_xi(k1, k2), F.s.s,
                                              Complex(0.0, 0.0));
      const Mat4 prop = expm(Mat4(-h * sp.a1()));
      if (!prop.allFinite()) {
        throw NumericGuardError("twoway_oracle: matrix exponential overflow");
      }
      Vec4c f;
      for (int c = 0; c < 4; ++c) f[c] = out.at(c, k1, k2);
      const Vec4c g = prop * f;
      for (int c = 0; c < 4; ++c) out.at(c, k1, k2) = g[c];
    }
  }
  for (int c = 0; c < 4; ++c) {
    std::vector<Complex> plane(out.data.begin() + c * F.size(),
                               out.data.begin() + (c + 1) * F.size());
    fft2(plane, F.nx1, F.nx2, false);
    std::copy(plane.begin(), plane.end(), out.data.begin() + c * F.size());
  }
  out.x3 = F.x3 + h;
  return out;
}

void write_field_dump(const FieldGrid& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("write_field_dump: cannot open " + path);
  const std::uint32_t version = 1;
  const std::uint32_t n1 = f.nx1, n2 = f.nx2;
  os.write(kDumpMagic, sizeof(kDumpMagic));
  os.write(reinterpret_cast<const char*>(&version), sizeof(version));
  os.write(reinterpret_cast<const char*>(&n1), sizeof(n1));
  os.write(reinterpret_cast<const char*>(&n2), sizeof(n2));
  const double header_d[6] = {f.L1, f.L2, f.x3, f.s.s.real(), f.s.s.imag(), f.s.S_R};
  os.write(reinterpret_cast<const char*>(header_d), sizeof(header_d));
  os.write(kOrderingTag, sizeof(kOrderingTag));
  for (const Complex& v : f.data) {
    const double re = v.real(), im = v.imag();
    os.write(reinterpret_cast<const char*>(&re), sizeof(re));
    os.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
  if (!os) throw ConfigError("write_field_dump: write failed for " + path);
}

FieldGrid read_field_dump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("read_field_dump: cannot open " + path);
  char magic[8];
  std::uint32_t version = 0, n1 = 0, n2 = 0;
  is.read(magic, sizeof(magic));
  is.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!is || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0 || version != 1) {
    throw ConfigError("read_field_dump: not a field dump (bad magic/version): " + path);
  }
  is.read(reinterpret_cast<char*>(&n1), sizeof(n1));
  is.read(reinterpret_cast<char*>(&n2), sizeof(n2));
  double header_d[6];
  is.read(reinterpret_cast<char*>(header_d), sizeof(header_d));
  char tag[16];
  is.read(tag, sizeof(tag));
  if (!is || std::memcmp(tag, kOrderingTag, sizeof(kOrderingTag)) != 0) {
    throw ConfigError("read_field_dump: unexpected field ordering tag in " + path);
  }
  FieldGrid f(static_cast<int>(n1), static_cast<int>(n2), header_d[0], header_d[1],
              LaplaceParameter(Complex(header_d[3], header_d[4]), header_d[5]));
  f.x3 = header_d[2];
  for (Complex& v : f.data) {
    double re = 0.0, im = 0.0;
    is.read(reinterpret_cast<char*>(&re), sizeof(re));
    is.read(reinterpret_cast<char*>(&im), sizeof(im));
    v = Complex(re, im);
  }
  if (!is) throw ConfigError("read_field_dump: truncated payload in " + path);
  return f;
}

void write_field_csv(const FieldGrid& f, std::ostream& os) {
  os << "x1,x2,re_F1,im_F1,re_F2,im_F2,re_F3,im_F3,re_F4,im_F4\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (int i1 = 0; i1 < f.nx1; ++i1) {
    for (int i2 = 0; i2 < f.nx2; ++i2) {
      const Vec2 x = f.grid_point(i1, i2);
      os << fmt(x[0]) << "," << fmt(x[1]);
      for (int c = 0; c < 4; ++c) {
        os << "," << fmt(f.at(c, i1, i2).real()) << "," << fmt(f.at(c, i1, i2).imag());
      }
      os << "\n";
    }
  }
}

}  // namespace wavesplit
