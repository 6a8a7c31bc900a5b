#include "wavesplit/medium.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace wavesplit {

namespace {

std::string point_str(const Vec2& x) {
  std::ostringstream os;
  os << "(" << x[0] << ", " << x[1] << ")";
  return os.str();
}

double min_eigenvalue_sym2(const Mat2d& t) {
  const double tr = t(0, 0) + t(1, 1);
  const double det = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return tr / 2.0 - disc;
}

}  // namespace

std::vector<Vec2> SampleLattice::points() const {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i) {
    const double t1 = n1 > 1 ? static_cast<double>(i) / (n1 - 1) : 0.5;
    for (int j = 0; j < n2; ++j) {
      const double t2 = n2 > 1 ? static_cast<double>(j) / (n2 - 1) : 0.5;
      pts.emplace_back(lo[0] + t1 * (hi[0] - lo[0]), lo[1] + t2 * (hi[1] - lo[1]));
    }
  }
  return pts;
}

MaterialTensor::MaterialTensor(const Mat3d& constant)
    : constant_(constant), is_constant_(true) {}

MaterialTensor::MaterialTensor(Profile profile)
    : profile_(std::move(profile)), is_constant_(false) {}

Mat3d MaterialTensor::eval(const Vec2& x) const {
  Mat3d t = is_constant_ ? constant_ : profile_(x);
  const double asym = (t - t.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(t.cwiseAbs().maxCoeff(), 1e-300);
  if (asym > 1e-12 * scale) {
    throw ConfigError("material tensor is not symmetric at x' = " + point_str(x) +
                      " (relative asymmetry " + std::to_string(asym / scale) + ")");
  }
  return 0.5 * (t + t.transpose());
}

void MaterialTensor::validate_spd(const SampleLattice& lattice) const {
  for (const Vec2& x : lattice.points()) {
    const Mat3d t = eval(x);
    Eigen::SelfAdjointEigenSolver<Mat3d> es(t);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw ConfigError("material tensor is not positive definite at x' = " +
                        point_str(x) + " (smallest eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
  }
}

Mat2d schur_reduce(const Mat3d& t) {
  if (t(2, 2) <= 0.0) {
    throw ConfigError("schur_reduce: t33 <= 0 violates positive definiteness");
  }
  Mat2d out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out(a, b) = t(a, b) - t(a, 2) * t(2, b) / t(2, 2);
  return 0.5 * (out + out.transpose().eval());
}

MediumSpec MediumSpec::create(MaterialTensor eps, MaterialTensor mu,
                              const SampleLattice& lattice) {
  eps.validate_spd(lattice);
  mu.validate_spd(lattice);
  MediumSpec m;
  m.homogeneous = eps.is_constant() && mu.is_constant();
  m.eps = std::move(eps);
  m.mu = std::move(mu);
  m.lattice = lattice;
  auto [e1, m1] = lower_bounds(m, lattice.points());
  m.eps_hat1 = e1;
  m.mu_hat1 = m1;
  return m;
}

LaplaceParameter::LaplaceParameter(Complex s_value, double floor)
    : s(s_value), S_R(floor) {
  if (!(S_R > 0.0) || !(s.real() > S_R)) {
    throw ConfigError("LaplaceParameter requires Re s > S_R > 0 (got Re s = " +
                      std::to_string(s.real()) + ", S_R = " + std::to_string(S_R) + ")");
  }
}

double LaplaceParameter::tau(const MediumSpec& m) const {
  return S_R * std::sqrt(m.eps_hat1 * m.mu_hat1);
}

NormalizedMedium normalize(const MaterialTensor& eps_si, const MaterialTensor& mu_si,
                           Complex s_si, const SampleLattice& lattice,
                           std::optional<double> S_R) {
  auto relative = [](const MaterialTensor& t, double unit) {
    if (t.is_constant()) return MaterialTensor(Mat3d(t.eval(Vec2::Zero()) / unit));
    return MaterialTensor([t, unit](const Vec2& x) { return Mat3d(t.eval(x) / unit); });
  };
  MaterialTensor eps_rel = relative(eps_si, kVacuumPermittivity);
  MaterialTensor mu_rel = relative(mu_si, kVacuumPermeability);

  NormalizedMedium out;
  out.medium = MediumSpec::create(std::move(eps_rel), std::move(mu_rel), lattice);
  const Complex s_norm = s_si / kSpeedOfLight;
  const double floor = S_R.value_or(0.9 * s_norm.real());
  out.s = LaplaceParameter(s_norm, floor);
  out.scales.e_field = std::sqrt(kVacuumPermittivity);
  out.scales.h_field = std::sqrt(kVacuumPermeability);
  out.scales.j_current = std::sqrt(kVacuumPermeability);
  out.scales.k_current = std::sqrt(kVacuumPermittivity);
  return out;
}

std::pair<Mat3d, Mat3d> denormalize_at(const MediumSpec& m, const Vec2& x) {
  return {Mat3d(m.eps.eval(x) * kVacuumPermittivity),
          Mat3d(m.mu.eval(x) * kVacuumPermeability)};
}

Complex denormalize_s(const LaplaceParameter& p) { return p.s * kSpeedOfLight; }

std::pair<double, double> lower_bounds(const MediumSpec& m,
                                       const std::vector<Vec2>& sample_points) {
  if (sample_points.empty()) {
    throw ConfigError("lower_bounds: empty sample set");
  }
  double e1 = std::numeric_limits<double>::infinity();
  double m1 = std::numeric_limits<double>::infinity();
  for (const Vec2& x : sample_points) {
    const double le = min_eigenvalue_sym2(m.eps_schur(x));
    const double lm = min_eigenvalue_sym2(m.mu_schur(x));
    if (le <= 0.0 || lm <= 0.0) {
      throw ConfigError("lower_bounds: non-positive Schur tensor at x' = " +
                        point_str(x));
    }
    e1 = std::min(e1, le);
    m1 = std::min(m1, lm);
  }
  return {e1, m1};
}

}  // namespace wavesplit
