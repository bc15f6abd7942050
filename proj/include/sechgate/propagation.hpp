#ifndef SECHGATE_PROPAGATION_HPP
#define SECHGATE_PROPAGATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sechgate/common.hpp"
#include "sechgate/device_model.hpp"
#include "sechgate/protocol.hpp"
#include "sechgate/sech_pulse.hpp"

namespace sechgate {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-7;  // ns; ToleranceNotMet below this
};

// Adaptive embedded Dormand-Prince 5(4) for i dU/dt = H(t) U. Used as the
// reference integrator: the two-level sech oracle and the lab-frame
// cross-checks of the production propagator run through it.
template <class HFunc>
MatrixXcd integrate_schrodinger_dopri(HFunc&& h_of_t, MatrixXcd u, double t0,
                                      double t1, const IntegratorOptions& opt = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const Complex mi(0.0, -1.0);
  const auto rhs = [&](double t, const MatrixXcd& y) -> MatrixXcd {
    return mi * (h_of_t(t) * y);
  };

  double t = t0;
  double h = std::min(opt.max_step, (t1 - t0) / 16.0);
  MatrixXcd k1 = rhs(t, u);
  while (t < t1) {
    h = std::min(h, t1 - t);
    const MatrixXcd k2 = rhs(t + c2 * h, u + h * (a21 * k1));
    const MatrixXcd k3 = rhs(t + c3 * h, u + h * (a31 * k1 + a32 * k2));
    const MatrixXcd k4 = rhs(t + c4 * h, u + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const MatrixXcd k5 =
        rhs(t + c5 * h, u + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const MatrixXcd k6 =
        rhs(t + h, u + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const MatrixXcd u5 = u + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const MatrixXcd k7 = rhs(t + h, u5);
    const MatrixXcd err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale = opt.atol + opt.rtol * std::max(1.0, max_abs(u5));
    const double enorm = max_abs(err) / scale;
    if (enorm <= 1.0) {
      t += h;
      u = u5;
      k1 = k7;  // FSAL
    }
    const double factor = std::clamp(0.9 * std::pow(std::max(enorm, 1e-16), -0.2), 0.2, 5.0);
    h = std::min(h * factor, opt.max_step);
    if (h < opt.min_step && t < t1) {
      throw ToleranceNotMet("integrate_schrodinger_dopri: step size underflow");
    }
  }
  return u;
}

namespace detail {

// exp(-i B) applied to U for real symmetric B, via eigendecomposition;
// keeps the result exactly unitary up to the eigensolver's accuracy.
inline void apply_exp_hermitian(const MatrixXd& b, MatrixXcd& u) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(b);
  if (es.info() != Eigen::Success) {
    throw numerical_error("apply_exp_hermitian: eigensolver failed");
  }
  const MatrixXd& s = es.eigenvectors();
  const VectorXd& lam = es.eigenvalues();
  MatrixXd wr = s.transpose() * u.real();
  MatrixXd wi = s.transpose() * u.imag();
  const VectorXd cl = lam.array().cos();
  const VectorXd sl = lam.array().sin();
  // diag(e^{-i lam}) * [wr + i wi]
  MatrixXd xr = cl.asDiagonal() * wr + sl.asDiagonal() * wi;
  MatrixXd xi = cl.asDiagonal() * wi - sl.asDiagonal() * wr;
  u.real() = s * xr;
  u.imag() = s * xi;
}

// One 4th-order commutator-free Magnus step for H(t) = C + env(t) X over
// [t, t+h], applied in place to U. Gauss-Legendre nodes; exact for env = 0.
inline void magnus_cf4_step(const MatrixXd& c, const MatrixXd& x,
                            const std::function<double(double)>& env, double t,
                            double h, MatrixXcd& u) {
  static const double gl1 = 0.5 - std::sqrt(3.0) / 6.0;
  static const double gl2 = 0.5 + std::sqrt(3.0) / 6.0;
  static const double w1 = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
  static const double w2 = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;
  const double env1 = env(t + gl1 * h);
  const double env2 = env(t + gl2 * h);
  const MatrixXd b1 = h * (0.5 * c + (w1 * env1 + w2 * env2) * x);
  const MatrixXd b2 = h * (0.5 * c + (w2 * env1 + w1 * env2) * x);
  apply_exp_hermitian(b1, u);
  apply_exp_hermitian(b2, u);
}

}  // namespace detail

// Adaptive CF4 Magnus propagation of i dU/dt = (C + env(t) X) U with
// step-doubling error control. C and X are constant real symmetric matrices
// (the rotating-frame generator and the drive quadrature).
inline MatrixXcd integrate_magnus_cf4(const MatrixXd& c, const MatrixXd& x,
                                      const std::function<double(double)>& env,
                                      double t0, double t1, MatrixXcd u,
                                      const IntegratorOptions& opt = {}) {
  double t = t0;
  double h = std::min(opt.max_step, (t1 - t0) / 8.0);
  while (t < t1) {
    h = std::min(h, t1 - t);
    MatrixXcd coarse = u;
    detail::magnus_cf4_step(c, x, env, t, h, coarse);
    MatrixXcd fine = u;
    detail::magnus_cf4_step(c, x, env, t, 0.5 * h, fine);
    detail::magnus_cf4_step(c, x, env, t + 0.5 * h, 0.5 * h, fine);

    const double tol = opt.atol + opt.rtol * std::max(1.0, max_abs(fine));
    const double enorm = max_abs(coarse - fine) / 15.0 / tol;
    if (enorm <= 1.0) {
      t += h;
      u = std::move(fine);
    }
    const double factor = std::clamp(0.85 * std::pow(std::max(enorm, 1e-16), -0.2), 0.25, 4.0);
    h = std::min(h * factor, opt.max_step);
    if (h < opt.min_step && t < t1) {
      throw ToleranceNotMet("integrate_magnus_cf4: step size underflow");
    }
  }
  return u;
}

// Control segments. The drive enters the lab-frame Hamiltonian as
// H_p(t) = E(t) (e^{i w_p t} a + e^{-i w_p t} a^dag) on the driven transmon,
// with E real. Sech segments carry their peak at the segment midpoint.
struct SechSegment {
  double sigma = 0.0;       // rad/ns
  double field_amp = 0.0;   // E0, rad/ns
  double drive_freq = 0.0;  // rad/ns
  double window_half = 0.0; // ns (duration = 2 * window_half)

  double duration() const { return 2.0 * window_half; }
};

struct SquareSegment {
  double tau = 0.0;         // ns
  double field_amp = 0.0;   // E, rad/ns (may be negative or zero)
  double drive_freq = 0.0;  // rad/ns

  double duration() const { return tau; }
};

using Segment = std::variant<SechSegment, SquareSegment>;

struct PulseSchedule {
  std::vector<Segment> segments;  // contiguous in time, starting at t = 0
  int driven_qubit = 2;

  double total_time() const {
    double t = 0.0;
    for (const auto& s : segments)
      t += std::visit([](const auto& seg) { return seg.duration(); }, s);
    return t;
  }
};

// Single-sech schedule realizing a resolved protocol. The field amplitude
// is E0 = a sigma / d_cal against the calibration dipole.
inline PulseSchedule make_cphase_schedule(const ProtocolSpec& spec,
                                          const TransitionTable& tt) {
  SechSegment seg;
  seg.sigma = spec.sigma;
  seg.field_amp = spec.area_index * spec.sigma / calibration_dipole(spec, tt);
  seg.drive_freq = spec.drive_freq;
  seg.window_half = 5.0 / spec.sigma;  // on-time 10/sigma
  PulseSchedule sched;
  sched.segments.push_back(seg);
  sched.driven_qubit = tt.driven_qubit;
  return sched;
}

struct SimulationResult {
  MatrixXcd u_full;      // lab-frame propagator over the schedule
  Matrix4cd u_proj;      // dressed qubit-subspace block, free phases removed
  double realized_theta = std::numeric_limits<double>::quiet_NaN();
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double fidelity_z_corrected = std::numeric_limits<double>::quiet_NaN();
  double purity = 0.0;
  double leakage = 0.0;
  double gate_time = 0.0;
};

struct PropagateOptions {
  IntegratorOptions integrator;
  double unitarity_tol = 1e-8;
};

// Dressed-basis projection with interaction-frame alignment: transform to
// the dressed basis, keep the qubit-subspace block, and strip the free
// phases e^{-i E_k T} of the four dressed levels.
inline Matrix4cd project_and_frame(const MatrixXcd& u_full, const DressedBasis& db,
                                   const TransitionTable& tt, double t_total) {
  Eigen::Matrix<double, Eigen::Dynamic, 4> v4(u_full.rows(), 4);
  Eigen::Vector4d energies;
  for (int k = 0; k < 4; ++k) {
    v4.col(k) = db.eigenvectors.col(tt.qss_dressed[k]);
    energies(k) = db.eigenvalues(tt.qss_dressed[k]);
  }
  Matrix4cd up = v4.transpose() * u_full * v4;
  for (int r = 0; r < 4; ++r) {
    up.row(r) *= std::exp(Complex(0.0, energies(r) * t_total));
  }
  return up;
}

// Average gate fidelity F = [tr(M M^dag) + |tr M|^2] / (n (n+1)), M = U0^dag U.
// U may be non-unitary (leakage).
inline double gate_fidelity(const MatrixXcd& u_target, const MatrixXcd& u_actual) {
  const auto n = static_cast<double>(u_target.rows());
  const MatrixXcd m = u_target.adjoint() * u_actual;
  const double t1 = (m * m.adjoint()).trace().real();
  const Complex t2 = m.trace();
  return (t1 + std::norm(t2)) / (n * (n + 1.0));
}

struct GeneralizedCphase {
  std::array<double, 4> phases{};  // arg of the diagonal, |00>,|01>,|10>,|11>
  double realized_theta = 0.0;     // phi00 - phi01 - phi10 + phi11, in (-pi, pi]
  double fidelity_z_corrected = 0.0;  // vs diag(1,1,1,e^{i realized}), Z-optimal
};

// Best achievable |tr M| against diag(e^{i c_k}) targets whose CPHASE
// combination equals theta_target, optimizing two single-qubit Z angles and
// a global phase. Solved exactly: with r_k = |U_kk| the optimum is
// sum_k sqrt(r_k^2 - nu^2) where nu solves sum_k asin(nu/r_k) = -(theta_real
// - theta_target).
inline double best_diagonal_overlap(const Matrix4cd& u, double theta_target) {
  std::array<double, 4> r{};
  double theta_real = 0.0;
  static constexpr std::array<double, 4> w{1.0, -1.0, -1.0, 1.0};
  for (int k = 0; k < 4; ++k) {
    r[k] = std::abs(u(k, k));
    theta_real += w[k] * std::arg(u(k, k));
  }
  const double rmin = *std::min_element(r.begin(), r.end());
  if (rmin < 1e-12) {
    double s = 0.0;
    for (double v : r) s += v;
    return s - rmin;  // a dead diagonal entry frees its phase entirely
  }
  const double delta = wrap_angle(theta_real - theta_target);
  const auto gap = [&](double nu) {
    double s = 0.0;
    for (double v : r) s += std::asin(std::clamp(nu / v, -1.0, 1.0));
    return s + delta;
  };
  double lo = -rmin, hi = rmin;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    (gap(m) < 0.0 ? lo : hi) = m;
  }
  const double nu = 0.5 * (lo + hi);
  double s = 0.0;
  for (double v : r) s += std::sqrt(std::max(v * v - nu * nu, 0.0));
  return s;
}

// Z-corrected average gate fidelity against CPHASE(theta_target).
inline double z_corrected_fidelity(const Matrix4cd& u_proj, double theta_target) {
  const double t1 = (u_proj.adjoint() * u_proj).trace().real();
  const double ov = best_diagonal_overlap(u_proj, theta_target);
  return (t1 + ov * ov) / 20.0;
}

inline GeneralizedCphase extract_generalized_cphase(const Matrix4cd& u_proj) {
  Matrix4cd off = u_proj;
  off.diagonal().setZero();
  if (max_abs(off) >= 0.1) {
    throw NotDiagonal("extract_generalized_cphase: projected operator is not "
                      "diagonal-dominant");
  }
  GeneralizedCphase g;
  for (int k = 0; k < 4; ++k) g.phases[k] = std::arg(u_proj(k, k));
  g.realized_theta =
      wrap_angle(g.phases[0] - g.phases[1] - g.phases[2] + g.phases[3]);
  g.fidelity_z_corrected = z_corrected_fidelity(u_proj, g.realized_theta);
  return g;
}

// Full time-dependent propagation of the driven device over a schedule.
//
// Each segment is integrated in the frame rotating with exp(i w_p N t)
// (N = total excitation number), where the drive is exactly
// E(t) (a + a^dag) and the generator C = H0 - w_p N is static: an exact
// unitary transformation of the lab-frame dynamics, not a rotating-wave
// reduction. Lab-frame boundary factors e^{-i w_p N t} stitch segments with
// different drive frequencies and keep absolute-time phase coherence.
inline SimulationResult propagate(const Device& dev, const PulseSchedule& sched,
                                  const PropagateOptions& opt = {}) {
  const int dim = dev.params.dimension();
  const MatrixXd x = [&] {
    const MatrixXd a = lowering_operator(dev.params, sched.driven_qubit);
    return MatrixXd(a + a.transpose());
  }();
  const VectorXd nvec = excitation_number(dev.params);

  MatrixXcd u = MatrixXcd::Identity(dim, dim);
  const auto frame_phase = [&](double wp, double t, int sign) {
    for (int r = 0; r < dim; ++r) {
      u.row(r) *= std::exp(Complex(0.0, sign * wp * nvec(r) * t));
    }
  };

  double t = 0.0;
  for (const auto& seg : sched.segments) {
    if (const auto* sq = std::get_if<SquareSegment>(&seg)) {
      if (sq->tau < 0.0) throw physics_error("propagate: negative segment duration");
      if (sq->field_amp == 0.0) {
        // free evolution, exact
        MatrixXcd phase = (Complex(0.0, -1.0) * sq->tau * dev.dressed.eigenvalues.array())
                              .exp()
                              .matrix()
                              .asDiagonal();
        u = dev.dressed.eigenvectors *
            (phase * (dev.dressed.eigenvectors.transpose() * u));
      } else {
        frame_phase(sq->drive_freq, t, +1);
        const MatrixXd c = dev.h0 - sq->drive_freq * MatrixXd(nvec.asDiagonal());
        detail::apply_exp_hermitian(sq->tau * (c + sq->field_amp * x), u);
        frame_phase(sq->drive_freq, t + sq->tau, -1);
      }
      t += sq->tau;
    } else {
      const auto& sp = std::get<SechSegment>(seg);
      const double dur = sp.duration();
      const double t_peak = t + sp.window_half;
      frame_phase(sp.drive_freq, t, +1);
      const MatrixXd c = dev.h0 - sp.drive_freq * MatrixXd(nvec.asDiagonal());
      IntegratorOptions iopt = opt.integrator;
      // envelope-resolution cap; the error control binds tighter in practice
      iopt.max_step = std::min(iopt.max_step, 0.5 / sp.sigma);
      u = integrate_magnus_cf4(
          c, x, [&](double tt_) { return sp.field_amp / std::cosh(sp.sigma * (tt_ - t_peak)); },
          t, t + dur, std::move(u), iopt);
      frame_phase(sp.drive_freq, t + dur, -1);
      t += dur;
    }
  }

  SimulationResult res;
  res.gate_time = t;
  if (unitarity_defect(u) > opt.unitarity_tol) {
    throw ToleranceNotMet("propagate: unitarity gate failed");
  }
  res.u_proj = project_and_frame(u, dev.dressed, dev.transitions, t);
  res.u_full = std::move(u);
  res.purity = (res.u_proj.adjoint() * res.u_proj).trace().real() / 4.0;
  res.leakage = 1.0 - res.purity;
  return res;
}

// Score a propagated CPHASE attempt against the sign-consistent target
// diag(1,1,1,e^{i theta_signed}). Fills the realized angle, the raw Pedersen
// fidelity and the Z-corrected fidelity.
inline void score_cphase(SimulationResult& res, double theta_signed) {
  const GeneralizedCphase g = extract_generalized_cphase(res.u_proj);
  res.realized_theta = g.realized_theta;
  Matrix4cd target = Matrix4cd::Identity();
  target(3, 3) = std::exp(Complex(0.0, theta_signed));
  res.fidelity = gate_fidelity(target, res.u_proj);
  res.fidelity_z_corrected = z_corrected_fidelity(res.u_proj, theta_signed);
}

// Lab-frame reference propagation (Dormand-Prince 5(4) on the full
// time-dependent Hamiltonian, step capped below the fastest phase period).
// Orders of magnitude slower than propagate(); used for cross-validation.
inline MatrixXcd propagate_reference_dopri(const Device& dev,
                                           const PulseSchedule& sched,
                                           const IntegratorOptions& base_opt = {}) {
  const int dim = dev.params.dimension();
  const MatrixXd a = lowering_operator(dev.params, sched.driven_qubit);
  MatrixXcd u = MatrixXcd::Identity(dim, dim);

  double t0 = 0.0;
  for (const auto& seg : sched.segments) {
    const double dur = std::visit([](const auto& s) { return s.duration(); }, seg);
    const auto envelope = [&](double t) {
      if (const auto* sq = std::get_if<SquareSegment>(&seg)) return sq->field_amp;
      const auto& sp = std::get<SechSegment>(seg);
      return sp.field_amp / std::cosh(sp.sigma * (t - (t0 + sp.window_half)));
    };
    const double wp = std::visit([](const auto& s) { return s.drive_freq; }, seg);
    const auto h_of_t = [&](double t) -> MatrixXcd {
      const Complex ph = std::exp(Complex(0.0, wp * t));
      MatrixXcd h = dev.h0.cast<Complex>();
      h += envelope(t) * (ph * a + std::conj(ph) * a.transpose());
      return h;
    };
    IntegratorOptions opt = base_opt;
    const double wmax = dev.dressed.eigenvalues.cwiseAbs().maxCoeff() + wp;
    opt.max_step = std::min(opt.max_step, (two_pi / wmax) / 20.0);
    u = integrate_schrodinger_dopri(h_of_t, std::move(u), t0, t0 + dur, opt);
    t0 += dur;
  }
  return u;
}

}  // namespace sechgate

#endif  // SECHGATE_PROPAGATION_HPP
