#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wavesplit {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat2d = Eigen::Matrix2d;
using Mat3d = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Vec2c = Eigen::Vector2cd;
using Vec4c = Eigen::Vector4cd;
using Mat42 = Eigen::Matrix<Complex, 4, 2>;

/// Bad user input: malformed config, invalid medium data, missing files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric guard tripped: strip violation, singular b21, overflow, ...
class NumericGuardError : public std::runtime_error {
 public:
  explicit NumericGuardError(const std::string& what) : std::runtime_error(what) {}
};

// SI constants. mu0 is derived from eps0 and the exact c0 so that
// eps0*mu0*c0^2 == 1 holds to machine precision.
inline constexpr double kSpeedOfLight = 299792458.0;            // [m/s]
inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // [F/m]
inline constexpr double kVacuumPermeability =
    1.0 / (kVacuumPermittivity * kSpeedOfLight * kSpeedOfLight); // [H/m]

}  // namespace wavesplit
