#ifndef SECHGATE_COMMON_HPP
#define SECHGATE_COMMON_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sechgate {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

// Unit convention: user-facing frequencies are linear (GHz / MHz), all
// internal frequencies are angular (rad/ns). 1 GHz -> 2*pi rad/ns.
inline double ghz_to_rad(double f_ghz) { return two_pi * f_ghz; }
inline double mhz_to_rad(double f_mhz) { return two_pi * 1e-3 * f_mhz; }
inline double rad_to_ghz(double w) { return w / two_pi; }
inline double rad_to_mhz(double w) { return 1e3 * w / two_pi; }

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double x) {
  double y = std::remainder(x, two_pi);
  if (y <= -pi) y += two_pi;
  return y;
}

// Error taxonomy. The CLI maps these onto its exit-code contract:
// config_error -> 2, physics_error -> 3, numerical_error -> 4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct physics_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AmbiguousLabeling : physics_error {
  using physics_error::physics_error;
};
struct DegenerateSplitting : physics_error {
  using physics_error::physics_error;
};
struct BandwidthOutOfRange : physics_error {
  using physics_error::physics_error;
};
struct InfeasibleConstraint : physics_error {
  using physics_error::physics_error;
};

struct PoleError : numerical_error {
  using numerical_error::numerical_error;
};
struct NonUnitaryInput : numerical_error {
  using numerical_error::numerical_error;
};
struct NotDiagonal : numerical_error {
  using numerical_error::numerical_error;
};
struct ToleranceNotMet : numerical_error {
  using numerical_error::numerical_error;
};

inline double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline double unitarity_defect(const MatrixXcd& u) {
  return max_abs(u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols()));
}

inline double hermiticity_defect(const MatrixXcd& h) {
  return max_abs(h - h.adjoint());
}

}  // namespace sechgate

#endif  // SECHGATE_COMMON_HPP
