#ifndef SECHGATE_PROTOCOL_HPP
#define SECHGATE_PROTOCOL_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sechgate/common.hpp"
#include "sechgate/device_model.hpp"
#include "sechgate/invariants.hpp"
#include "sechgate/sech_pulse.hpp"
#include "sechgate/special_functions.hpp"

namespace sechgate {

enum class ProtocolFamily {
  IQSS_2PI_RES,
  IQSS_4PI_RES,
  OQSS_2PI_RES,
  OQSS_4PI_RES,
  OQSS_2PI_OFFRES,
};

enum class Branch { Plus, Minus };

inline std::string to_string(ProtocolFamily f) {
  switch (f) {
    case ProtocolFamily::IQSS_2PI_RES: return "IQSS_2PI_RES";
    case ProtocolFamily::IQSS_4PI_RES: return "IQSS_4PI_RES";
    case ProtocolFamily::OQSS_2PI_RES: return "OQSS_2PI_RES";
    case ProtocolFamily::OQSS_4PI_RES: return "OQSS_4PI_RES";
    case ProtocolFamily::OQSS_2PI_OFFRES: return "OQSS_2PI_OFFRES";
  }
  return "?";
}

inline ProtocolFamily family_from_string(const std::string& s) {
  if (s == "IQSS_2PI_RES") return ProtocolFamily::IQSS_2PI_RES;
  if (s == "IQSS_4PI_RES") return ProtocolFamily::IQSS_4PI_RES;
  if (s == "OQSS_2PI_RES") return ProtocolFamily::OQSS_2PI_RES;
  if (s == "OQSS_4PI_RES") return ProtocolFamily::OQSS_4PI_RES;
  if (s == "OQSS_2PI_OFFRES") return ProtocolFamily::OQSS_2PI_OFFRES;
  throw config_error("unknown protocol family: " + s);
}

inline TransitionFamily transitions_of(ProtocolFamily f) {
  return (f == ProtocolFamily::IQSS_2PI_RES || f == ProtocolFamily::IQSS_4PI_RES)
             ? TransitionFamily::IQSS
             : TransitionFamily::OQSS;
}

inline int area_index_of(ProtocolFamily f) {
  return (f == ProtocolFamily::IQSS_4PI_RES || f == ProtocolFamily::OQSS_4PI_RES) ? 2 : 1;
}

// Allowed bandwidth intervals in sigma/|delta_omega| units.
struct BandwidthRange {
  struct Interval { double lo, hi; };  // open intervals
  std::vector<Interval> intervals;

  bool contains(double x) const {
    for (const auto& iv : intervals)
      if (x > iv.lo && x < iv.hi) return true;
    return false;
  }
};

inline BandwidthRange bandwidth_range(ProtocolFamily f, Branch branch, double theta) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (f) {
    case ProtocolFamily::IQSS_2PI_RES:
    case ProtocolFamily::OQSS_2PI_RES:
      return {{{0.0, inf}}};
    case ProtocolFamily::IQSS_4PI_RES:
      return branch == Branch::Plus
                 ? BandwidthRange{{{0.0, 1.0 / (2.0 + std::sqrt(7.0))}}}
                 : BandwidthRange{{{1.0 / (std::sqrt(7.0) - 2.0), inf}}};
    case ProtocolFamily::OQSS_4PI_RES:
      return branch == Branch::Plus
                 ? BandwidthRange{{{0.0, 1.0 / std::sqrt(3.0)}}}
                 : BandwidthRange{{{1.0 / std::sqrt(3.0), inf}}};
    case ProtocolFamily::OQSS_2PI_OFFRES:
      return {{{0.0, 0.5 / std::tan(theta / 4.0)}}};
  }
  return {};
}

// A protocol family and target choice resolved into concrete sech-pulse
// parameters. target_block selects which of the two driven transitions acts
// as the target (lambda = +1 for block 1, -1 for block 2); theta_analytic
// is the signed diagonal combination phi00-phi01-phi10+phi11 the analytic
// propagator realizes (the invariant conditions fix only cos(theta), so its
// sign is set by the device splittings).
struct ProtocolSpec {
  ProtocolFamily family = ProtocolFamily::IQSS_2PI_RES;
  double theta = 0.0;          // requested angle, rad, in the family's domain
  int target_block = 2;        // 1 or 2
  Branch branch = Branch::Plus;
  double sigma = 0.0;          // rad/ns
  double drive_freq = 0.0;     // omega_p, rad/ns
  int area_index = 1;
  double delta1 = 0.0, delta2 = 0.0;  // omega_p - omega_{x,1/2}, rad/ns
  double theta1 = 0.0, theta2 = 0.0;  // block phase combinations, rad
  double delta_theta = 0.0;    // theta1 - theta2 (off-resonant family), rad
  double theta_analytic = 0.0; // signed realized angle of the analytic diagonal

  int lambda() const { return target_block == 1 ? +1 : -1; }
  double gate_time() const { return 10.0 / sigma; }
};

namespace detail {

inline constexpr double degenerate_splitting_floor_mhz = 0.01;

inline void require_splitting(double delta) {
  if (std::abs(delta) < mhz_to_rad(degenerate_splitting_floor_mhz)) {
    throw DegenerateSplitting("splitting below 2pi*0.01 MHz; gate times impractical");
  }
}

inline void require_sigma(double sigma) {
  if (sigma <= mhz_to_rad(degenerate_splitting_floor_mhz)) {
    throw DegenerateSplitting("designed bandwidth below 2pi*0.01 MHz");
  }
}

inline void require_theta(double theta, bool open_top) {
  const bool ok = open_top ? (theta > 0.0 && theta < pi) : (theta > 0.0 && theta <= pi);
  if (!ok) {
    throw physics_error(open_top ? "theta must lie in (0, pi)" : "theta must lie in (0, pi]");
  }
}

// Analytic diagonal of the driven two-block evolution.
inline std::pair<Complex, Complex> block_factors(double d1, double d2, double sigma, int a) {
  const Complex f1 = gauss_2f1_unit(a, Complex(sigma, -d1) / (2.0 * sigma));
  const Complex f2 = gauss_2f1_unit(a, Complex(sigma, -d2) / (2.0 * sigma));
  return {f1, f2};
}

inline void fill_block_phases(ProtocolSpec& s, const TransitionTable& tt) {
  const TransitionFamily tf = transitions_of(s.family);
  s.delta1 = s.drive_freq - tt.freq(tf, 1);
  s.delta2 = s.drive_freq - tt.freq(tf, 2);
  const auto [f1, f2] = block_factors(s.delta1, s.delta2, s.sigma, s.area_index);
  if (tf == TransitionFamily::IQSS) {
    // U = diag(f1, f1*, f2, f2*)
    s.theta1 = wrap_angle(2.0 * std::arg(f1));
    s.theta2 = wrap_angle(-2.0 * std::arg(f2));
  } else {
    // U = diag(1, f1, 1, f2)
    s.theta1 = wrap_angle(-std::arg(f1));
    s.theta2 = wrap_angle(std::arg(f2));
  }
  s.theta_analytic = wrap_angle(s.theta1 + s.theta2);
  s.delta_theta = wrap_angle(s.theta1 - s.theta2);
}

}  // namespace detail

inline ProtocolSpec design_iqss_2pi(double theta, const TransitionTable& tt,
                                    int target_block, Branch branch = Branch::Plus) {
  detail::require_theta(theta, false);
  detail::require_splitting(tt.delta_i);
  ProtocolSpec s;
  s.family = ProtocolFamily::IQSS_2PI_RES;
  s.theta = theta;
  s.target_block = target_block;
  s.branch = branch;
  s.area_index = 1;
  s.sigma = branch == Branch::Plus ? std::abs(tt.delta_i) / std::tan(theta / 4.0)
                                   : std::abs(tt.delta_i) * std::tan(theta / 4.0);
  detail::require_sigma(s.sigma);
  s.drive_freq = tt.freq(TransitionFamily::IQSS, target_block);
  detail::fill_block_phases(s, tt);
  return s;
}

inline ProtocolSpec design_iqss_4pi(double theta, const TransitionTable& tt,
                                    int target_block, Branch branch) {
  detail::require_theta(theta, true);
  detail::require_splitting(tt.delta_i);
  ProtocolSpec s;
  s.family = ProtocolFamily::IQSS_4PI_RES;
  s.theta = theta;
  s.target_block = target_block;
  s.branch = branch;
  s.area_index = 2;
  const double tq = std::tan(theta / 4.0);
  const double root = std::sqrt(4.0 + 3.0 * tq * tq);
  s.sigma = std::abs(tt.delta_i) * tq / (branch == Branch::Plus ? root + 2.0 : root - 2.0);
  detail::require_sigma(s.sigma);
  if (!bandwidth_range(s.family, branch, theta).contains(s.sigma / std::abs(tt.delta_i))) {
    throw numerical_error("design_iqss_4pi: bandwidth left its allowed range");
  }
  s.drive_freq = tt.freq(TransitionFamily::IQSS, target_block);
  detail::fill_block_phases(s, tt);
  return s;
}

inline ProtocolSpec design_oqss_2pi_res(double theta, const TransitionTable& tt,
                                        int target_block) {
  detail::require_theta(theta, false);
  detail::require_splitting(tt.delta_o);
  ProtocolSpec s;
  s.family = ProtocolFamily::OQSS_2PI_RES;
  s.theta = theta;
  s.target_block = target_block;
  s.area_index = 1;
  s.sigma = std::abs(tt.delta_o) / std::tan(theta / 2.0);
  detail::require_sigma(s.sigma);  // theta -> pi drives sigma to 0
  s.drive_freq = tt.freq(TransitionFamily::OQSS, target_block);
  detail::fill_block_phases(s, tt);
  return s;
}

inline ProtocolSpec design_oqss_4pi_res(double theta, const TransitionTable& tt,
                                        int target_block, Branch branch) {
  detail::require_theta(theta, true);
  detail::require_splitting(tt.delta_o);
  ProtocolSpec s;
  s.family = ProtocolFamily::OQSS_4PI_RES;
  s.theta = theta;
  s.target_block = target_block;
  s.branch = branch;
  s.area_index = 2;
  const double th = std::tan(theta / 2.0);
  const double root = std::sqrt(4.0 + 3.0 * th * th);
  s.sigma = std::abs(tt.delta_o) * th / (branch == Branch::Plus ? root + 2.0 : root - 2.0);
  detail::require_sigma(s.sigma);
  if (!bandwidth_range(s.family, branch, theta).contains(s.sigma / std::abs(tt.delta_o))) {
    throw numerical_error("design_oqss_4pi_res: bandwidth left its allowed range");
  }
  s.drive_freq = tt.freq(TransitionFamily::OQSS, target_block);
  detail::fill_block_phases(s, tt);
  return s;
}

inline double oqss_offres_sigma_max(double theta, const TransitionTable& tt) {
  return 0.5 * std::abs(tt.delta_o) / std::tan(theta / 4.0);
}

// Off-resonant OQSS 2pi protocol: the bandwidth is free below sigma_max and
// the pulse frequency follows from the angle condition. delta_theta is
// recovered from the bandwidth relation
//   sigma = |delta_o| (cos(theta/2) - cos(dtheta/2)) / (2 sin(theta/2))
// by bisection on dtheta in (theta, 2pi - theta).
inline ProtocolSpec design_oqss_2pi_offres(double theta, const TransitionTable& tt,
                                           int target_block, double sigma) {
  detail::require_theta(theta, false);
  detail::require_splitting(tt.delta_o);
  const double smax = oqss_offres_sigma_max(theta, tt);
  if (!(sigma > 0.0) || sigma >= smax) {
    throw BandwidthOutOfRange("design_oqss_2pi_offres: sigma must lie in (0, sigma_max)");
  }
  detail::require_sigma(sigma);

  ProtocolSpec s;
  s.family = ProtocolFamily::OQSS_2PI_OFFRES;
  s.theta = theta;
  s.target_block = target_block;
  s.area_index = 1;
  s.sigma = sigma;

  const double adw = std::abs(tt.delta_o);
  const double mid = 0.5 * (tt.w_o1 + tt.w_o2);
  const double arg = std::cos(theta / 2.0) - 2.0 * std::sin(theta / 2.0) * sigma / adw;
  const double disc = 1.0 - arg * arg;
  if (disc < 0.0) {
    throw BandwidthOutOfRange("design_oqss_2pi_offres: pulse frequency would be complex");
  }
  s.drive_freq = mid + s.lambda() * adw / (2.0 * std::sin(theta / 2.0)) * std::sqrt(disc);
  detail::fill_block_phases(s, tt);

  // dtheta from the bandwidth relation, bisection to 1e-12
  const auto sigma_of = [&](double dth) {
    return adw * (std::cos(theta / 2.0) - std::cos(dth / 2.0)) / (2.0 * std::sin(theta / 2.0));
  };
  double lo = theta, hi = two_pi - theta;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (sigma_of(m) < sigma) lo = m; else hi = m;
    if (hi - lo < 1e-12) break;
  }
  s.delta_theta = 0.5 * (lo + hi);
  return s;
}

inline ProtocolSpec design_protocol(ProtocolFamily family, double theta,
                                    const TransitionTable& tt, int target_block,
                                    Branch branch,
                                    std::optional<double> sigma_override = {}) {
  switch (family) {
    case ProtocolFamily::IQSS_2PI_RES:
      return design_iqss_2pi(theta, tt, target_block, branch);
    case ProtocolFamily::IQSS_4PI_RES:
      return design_iqss_4pi(theta, tt, target_block, branch);
    case ProtocolFamily::OQSS_2PI_RES:
      return design_oqss_2pi_res(theta, tt, target_block);
    case ProtocolFamily::OQSS_4PI_RES:
      return design_oqss_4pi_res(theta, tt, target_block, branch);
    case ProtocolFamily::OQSS_2PI_OFFRES: {
      const double sigma = sigma_override.value_or(0.5 * oqss_offres_sigma_max(theta, tt));
      return design_oqss_2pi_offres(theta, tt, target_block, sigma);
    }
  }
  throw config_error("design_protocol: unknown family");
}

// Dipole used for amplitude calibration: the transition closest to the
// drive frequency must complete its cyclic area exactly (its area error is
// not suppressed by sech(pi Delta / 2 sigma)), so the drive field is
// calibrated against it: E0 = a sigma / d_cal.
inline double calibration_dipole(const ProtocolSpec& s, const TransitionTable& tt) {
  const TransitionFamily tf = transitions_of(s.family);
  const int block = std::abs(s.delta1) <= std::abs(s.delta2) ? 1 : 2;
  return tt.dipole(tf, block);
}

// Residual of the family's defining equation, plus the distance between the
// implied diagonal propagator's local invariants and the CPHASE target's.
struct RootCheck {
  double residual = 0.0;
  double invariant_distance = 0.0;
};

// Angle conditions of the off-resonant protocols (a = 1):
//   OQSS: cos(theta) = cos(phi1(D1) - phi1(D2))
//   IQSS: cos(theta) = cos(2 (phi1(D1) - phi1(D2)))
inline double offres_angle_residual(TransitionFamily tf, double theta, double d1,
                                    double d2, double sigma) {
  const double dphi = phase_phi(d1, sigma, 1) - phase_phi(d2, sigma, 1);
  const double mult = tf == TransitionFamily::IQSS ? 2.0 : 1.0;
  return std::abs(std::cos(theta) - std::cos(mult * dphi));
}

inline RootCheck verify_root_equation(const ProtocolSpec& s, const TransitionTable& tt) {
  RootCheck rc;
  const int a = s.area_index;
  switch (s.family) {
    case ProtocolFamily::IQSS_2PI_RES:
    case ProtocolFamily::IQSS_4PI_RES: {
      const Complex alpha =
          gauss_2f1_unit(a, Complex(s.sigma, -tt.delta_i) / (2.0 * s.sigma));
      const Complex rhs =
          (alpha * alpha + std::conj(alpha) * std::conj(alpha)) / (2.0 * std::norm(alpha));
      rc.residual = std::abs(Complex(std::cos(s.theta)) - rhs);
      break;
    }
    case ProtocolFamily::OQSS_2PI_RES:
    case ProtocolFamily::OQSS_4PI_RES: {
      const Complex alpha =
          gauss_2f1_unit(a, Complex(s.sigma, tt.delta_o) / (2.0 * s.sigma));
      const Complex rhs = (a % 2 == 0 ? 1.0 : -1.0) * (1.0 + alpha * alpha) / (2.0 * alpha);
      rc.residual = std::abs(Complex(std::cos(s.theta)) - rhs);
      break;
    }
    case ProtocolFamily::OQSS_2PI_OFFRES:
      rc.residual = offres_angle_residual(TransitionFamily::OQSS, s.theta, s.delta1,
                                          s.delta2, s.sigma);
      break;
  }

  // Invariants of the implied diagonal propagator vs the CPHASE target.
  const auto [f1, f2] = detail::block_factors(s.delta1, s.delta2, s.sigma, a);
  Matrix4cd u = Matrix4cd::Zero();
  if (transitions_of(s.family) == TransitionFamily::IQSS) {
    u.diagonal() << f1, std::conj(f1), f2, std::conj(f2);
  } else {
    u.diagonal() << 1.0, f1, 1.0, f2;
  }
  rc.invariant_distance =
      invariants_distance(local_invariants(u), cphase_target_invariants(s.theta));
  return rc;
}

}  // namespace sechgate

#endif  // SECHGATE_PROTOCOL_HPP
