#ifndef SECHGATE_SECH_PULSE_HPP
#define SECHGATE_SECH_PULSE_HPP

#include <cmath>
#include <complex>

#include "sechgate/common.hpp"
#include "sechgate/special_functions.hpp"

namespace sechgate {

// Hyperbolic-secant control pulse Omega(t) = Omega0 sech(sigma t), with
// integer area index a = Omega0 / sigma (a = 1 is a 2pi pulse). The pulse
// is switched on for 2*t_window, default 10/sigma.
struct SechPulse {
  double sigma = 0.0;      // bandwidth, rad/ns
  int area_index = 1;      // a = Omega0 / sigma
  double drive_freq = 0.0; // omega_p, rad/ns
  double amplitude = 0.0;  // Omega0, rad/ns
  double t_window = 0.0;   // half-width of the on-time, ns

  static SechPulse make(double sigma, int area_index, double drive_freq) {
    if (sigma <= 0.0) throw physics_error("SechPulse: sigma must be > 0");
    if (area_index < 1) throw physics_error("SechPulse: area index must be >= 1");
    SechPulse p;
    p.sigma = sigma;
    p.area_index = area_index;
    p.drive_freq = drive_freq;
    p.amplitude = area_index * sigma;
    p.t_window = 5.0 / sigma;  // total on-time 10/sigma
    return p;
  }

  double envelope(double t_from_peak) const {
    return amplitude / std::cosh(sigma * t_from_peak);
  }
  double duration() const { return 2.0 * t_window; }
};

// Ingredients of the analytic sech evolution operator, evaluated at the end
// of the pulse (zeta = 1). c = (1 + i Delta/sigma)/2; alpha and beta are the
// hypergeometric values entering U; offdiag_coupling is the
// -i sech(pi Delta / 2 sigma) sin(a pi) element (zero for integer a).
struct SechAnalyticTerms {
  Complex c;
  double zeta = 1.0;
  Complex alpha;
  Complex beta;
  Complex offdiag_coupling;
};

inline SechAnalyticTerms sech_analytic_terms(double delta, double sigma, int a) {
  if (sigma <= 0.0) throw physics_error("sech_analytic_terms: sigma must be > 0");
  SechAnalyticTerms t;
  t.c = 0.5 * Complex(1.0, delta / sigma);
  t.zeta = 1.0;
  // alpha(zeta=1) = 2F1(a, -a; c*; 1); c* = (sigma - i Delta)/(2 sigma)
  t.alpha = gauss_2f1_unit(a, std::conj(t.c));
  // beta(zeta=1) = Gamma(2-c) Gamma(c) sin(pi a) / (pi a), from the Gauss
  // summation of 2F1(a+1-c, 1-a-c; 2-c; 1)
  t.beta = gamma_complex(2.0 - t.c) * gamma_complex(t.c) *
           std::sin(pi * static_cast<double>(a)) / (pi * static_cast<double>(a));
  t.offdiag_coupling = Complex(0.0, -1.0) / std::cosh(pi * delta / (2.0 * sigma)) *
                       std::sin(pi * static_cast<double>(a));
  return t;
}

// Evolution operator U(+inf, -inf) of a two-level transition driven by a
// sech pulse with detuning Delta and integer area index a. For integer a
// the operator is diagonal with unit-modulus entries exp(-/+ i phi_a).
inline Matrix2cd sech_final_propagator(double delta, double sigma, int a) {
  if (sigma <= 0.0) throw physics_error("sech_final_propagator: sigma must be > 0");
  const Complex cm = Complex(sigma, -delta) / (2.0 * sigma);
  const Complex cp = Complex(sigma, +delta) / (2.0 * sigma);
  const Complex off = Complex(0.0, -1.0) / std::cosh(pi * delta / (2.0 * sigma)) *
                      std::sin(pi * static_cast<double>(a));
  Matrix2cd u;
  u << gauss_2f1_unit(a, cm), off, off, gauss_2f1_unit(a, cp);
  return u;
}

// Phase phi_a(Delta) imparted on the lower level of a driven transition by a
// cyclic sech pulse: U = diag(e^{-i phi_a}, e^{+i phi_a}). Evaluated with
// two-argument arctangents so the value is continuous through Delta = 0 from
// above and matches -arg(U00) everywhere; equal (mod 2pi) to the printed
// forms 2 arctan(sigma/Delta) (a=1) and 2 arctan(4(Delta/sigma)/((Delta/sigma)^2-3)) (a=2).
inline double phase_phi(double delta, double sigma, int a) {
  if (sigma <= 0.0) throw physics_error("phase_phi: sigma must be > 0");
  if (a == 1) return wrap_angle(pi - 2.0 * std::atan2(delta, sigma));
  if (a == 2) {
    return wrap_angle(
        -2.0 * std::atan2(4.0 * delta * sigma, 3.0 * sigma * sigma - delta * delta));
  }
  throw std::invalid_argument("phase_phi: only a in {1,2} supported");
}

}  // namespace sechgate

#endif  // SECHGATE_SECH_PULSE_HPP
