#ifndef SECHGATE_OPTIMIZE_HPP
#define SECHGATE_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sechgate/common.hpp"
#include "sechgate/device_model.hpp"
#include "sechgate/propagation.hpp"
#include "sechgate/protocol.hpp"

namespace sechgate {

// Uniform double in [0,1) from the raw generator output; bit-reproducible
// across standard libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Bounded Nelder-Mead simplex search. Function values only; points are
// clamped into the box. Deterministic for a given starting point.
// ---------------------------------------------------------------------------

struct SimplexOptions {
  int max_evals = 200;
  double xtol = 1e-10;
  double ftol = 1e-13;
};

struct SimplexResult {
  VectorXd x;
  double f = 0.0;
  int evals = 0;
  bool budget_exhausted = false;
};

inline SimplexResult nelder_mead(const std::function<double(const VectorXd&)>& fn,
                                 const VectorXd& x0, const VectorXd& step,
                                 const VectorXd& lo, const VectorXd& hi,
                                 const SimplexOptions& opt = {}) {
  const int n = static_cast<int>(x0.size());
  const auto clamp_box = [&](VectorXd x) {
    for (int i = 0; i < n; ++i) x(i) = std::clamp(x(i), lo(i), hi(i));
    return x;
  };

  int evals = 0;
  const auto eval = [&](const VectorXd& x) {
    ++evals;
    return fn(x);
  };

  std::vector<VectorXd> xs(n + 1);
  std::vector<double> fs(n + 1);
  xs[0] = clamp_box(x0);
  fs[0] = eval(xs[0]);
  for (int i = 0; i < n; ++i) {
    VectorXd x = xs[0];
    x(i) += step(i);
    if (x(i) > hi(i)) x(i) = xs[0](i) - step(i);
    xs[i + 1] = clamp_box(x);
    fs[i + 1] = eval(xs[i + 1]);
  }

  const auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return fs[a] != fs[b] ? fs[a] < fs[b] : a < b;
    });
    std::vector<VectorXd> x2(n + 1);
    std::vector<double> f2(n + 1);
    for (int i = 0; i <= n; ++i) { x2[i] = xs[idx[i]]; f2[i] = fs[idx[i]]; }
    xs.swap(x2);
    fs.swap(f2);
  };

  order();
  while (evals < opt.max_evals) {
    double spread = 0.0;
    for (int i = 1; i <= n; ++i) spread = std::max(spread, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
    if (spread < opt.xtol && std::abs(fs[n] - fs[0]) < opt.ftol) break;

    VectorXd centroid = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= n;

    const VectorXd xr = clamp_box(centroid + (centroid - xs[n]));
    const double fr = eval(xr);
    if (fr < fs[0]) {
      const VectorXd xe = clamp_box(centroid + 2.0 * (centroid - xs[n]));
      const double fe = eval(xe);
      if (fe < fr) { xs[n] = xe; fs[n] = fe; } else { xs[n] = xr; fs[n] = fr; }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr; fs[n] = fr;
    } else {
      const bool outside = fr < fs[n];
      const VectorXd xc = clamp_box(centroid + 0.5 * ((outside ? xr : xs[n]) - centroid));
      const double fc = eval(xc);
      if (fc < std::min(fr, fs[n])) {
        xs[n] = xc; fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          xs[i] = clamp_box(xs[0] + 0.5 * (xs[i] - xs[0]));
          fs[i] = eval(xs[i]);
          if (evals >= opt.max_evals) break;
        }
      }
    }
    order();
  }

  return {xs[0], fs[0], evals, evals >= opt.max_evals};
}

// ---------------------------------------------------------------------------
// Refinement of an analytic protocol against the full simulation.
// ---------------------------------------------------------------------------

struct PulseParams {
  double sigma = 0.0;       // rad/ns
  double drive_freq = 0.0;  // rad/ns
  double amp_scale = 1.0;   // multiplies the calibrated field amplitude
};

struct RefinementReport {
  PulseParams initial_params;
  PulseParams refined_params;
  double initial_fidelity = 0.0;
  double refined_fidelity = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
};

struct RefineOptions {
  PropagateOptions propagate;
  double box = 0.05;  // search box: +/-5% of the analytic values
};

inline SimulationResult simulate_cphase(const Device& dev, const ProtocolSpec& spec,
                                        const PulseParams& pp,
                                        const PropagateOptions& opt = {}) {
  SechSegment seg;
  seg.sigma = pp.sigma;
  seg.field_amp = pp.amp_scale * spec.area_index * pp.sigma /
                  calibration_dipole(spec, dev.transitions);
  seg.drive_freq = pp.drive_freq;
  seg.window_half = 5.0 / pp.sigma;
  PulseSchedule sched;
  sched.segments.push_back(seg);
  sched.driven_qubit = dev.transitions.driven_qubit;
  SimulationResult res = propagate(dev, sched, opt);
  const double theta_signed = std::copysign(spec.theta, spec.theta_analytic);
  score_cphase(res, theta_signed);
  return res;
}

// Derivative-free local search over (sigma, omega_p, amplitude scale) within
// a box around the analytic solution, maximizing the Z-corrected fidelity of
// the full simulation. Best-so-far bookkeeping keeps refinement monotone.
inline RefinementReport refine_protocol(const ProtocolSpec& spec, const Device& dev,
                                        int budget, const RefineOptions& opt = {}) {
  if (budget < 50) throw config_error("refine_protocol: budget must be >= 50");

  const PulseParams p0{spec.sigma, spec.drive_freq, 1.0};
  RefinementReport rep;
  rep.initial_params = p0;

  PulseParams best = p0;
  double best_f = -1.0;
  int evals = 0;
  const auto objective = [&](const VectorXd& x) {
    PulseParams pp{p0.sigma * x(0), p0.drive_freq * x(1), x(2)};
    double f;
    try {
      f = simulate_cphase(dev, spec, pp, opt.propagate).fidelity_z_corrected;
    } catch (const numerical_error&) {
      f = 0.0;  // reject pathological corners of the box
    }
    ++evals;
    if (f > best_f) { best_f = f; best = pp; }
    return 1.0 - f;
  };

  VectorXd x0(3), lo(3), hi(3), step(3);
  x0 << 1.0, 1.0, 1.0;
  lo << 1.0 - opt.box, 1.0 - opt.box, 1.0 - opt.box;
  hi << 1.0 + opt.box, 1.0 + opt.box, 1.0 + opt.box;
  // initial simplex scaled to the knobs' physical sensitivity: the drive
  // frequency matters on the scale of the splitting, not of omega_p
  const double dw = std::abs(dev.transitions.splitting(transitions_of(spec.family)));
  step << 5e-3, 0.2 * dw / p0.drive_freq, 5e-3;

  SimplexOptions sopt;
  sopt.max_evals = budget - 1;  // the initial point counts toward the budget
  objective(x0);
  rep.initial_fidelity = best_f;
  const SimplexResult sr = nelder_mead(objective, x0, step, lo, hi, sopt);

  rep.refined_params = best;
  rep.refined_fidelity = best_f;
  rep.evaluations = evals;
  rep.budget_exhausted = sr.budget_exhausted;
  return rep;
}

// ---------------------------------------------------------------------------
// Square-pulse single-qubit X rotations under the always-on coupling.
// ---------------------------------------------------------------------------

// Piecewise-constant drive sequence; all pulses share the drive frequency
// omega_I1. Bound to a target angle it satisfies theta/2 = d1 sum tau_i |E_i|.
struct SquareSequence {
  std::vector<double> durations;   // ns, each >= 1
  std::vector<double> amplitudes;  // field E_i, rad/ns, |E_i| <= 2pi*0.02
  std::vector<double> frequencies; // rad/ns

  static constexpr double min_duration = 1.0;           // ns ramp floor
  static constexpr double max_field = two_pi * 0.020;   // 20 MHz generator cap

  double total_duration() const {
    double t = 0.0;
    for (double tau : durations) t += tau;
    return t;
  }
  double weighted_area() const {
    double s = 0.0;
    for (size_t i = 0; i < durations.size(); ++i) s += durations[i] * std::abs(amplitudes[i]);
    return s;
  }
  double constraint_residual(double theta, double d1) const {
    return std::abs(theta / 2.0 - d1 * weighted_area());
  }
};

struct XRotationResult {
  SquareSequence sequence;
  double protocol_fidelity = 0.0;    // block-model optimum
  double simulation_fidelity = 0.0;  // full dynamics after local reoptimization
  double purity = 0.0;
  double duration_ns = 0.0;
};

struct XRotationOptions {
  uint64_t seed = 1;
  int restarts = 32;          // Latin-hypercube restarts of the block-model search
  int stage1_evals = 400;     // per restart
  int stage2_evals = 250;     // full-simulation local search budget
  double tau_max = 12.0;      // ns per pulse
  PropagateOptions propagate;
};

namespace detail {

inline Matrix2cd rx_gate(double theta) {
  Matrix2cd r;
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  r << Complex(c, 0.0), Complex(0.0, -s), Complex(0.0, -s), Complex(c, 0.0);
  return r;
}

// exp(-i tau (0.5 dz sigma_z + ox sigma_x)), closed form
inline Matrix2cd two_level_step(double tau, double dz_half, double ox) {
  const double w = std::hypot(dz_half, ox);
  const double c = std::cos(w * tau);
  const double s = w > 0.0 ? std::sin(w * tau) / w : tau;
  Matrix2cd u;
  u << Complex(c, -s * dz_half), Complex(0.0, -s * ox),
       Complex(0.0, -s * ox), Complex(c, s * dz_half);
  return u;
}

// Block-model propagator of one subspace in its interaction frame:
// detuning dtilde = w_p - w_Ij, couplings E_i d_j.
inline Matrix2cd block_propagator(const std::vector<double>& tau,
                                  const std::vector<double>& field, double dtilde,
                                  double dipole) {
  Matrix2cd u = Matrix2cd::Identity();
  double t_total = 0.0;
  for (size_t i = 0; i < tau.size(); ++i) {
    u = two_level_step(tau[i], 0.5 * dtilde, field[i] * dipole) * u;
    t_total += tau[i];
  }
  Matrix2cd frame = Matrix2cd::Zero();
  frame(0, 0) = std::exp(Complex(0.0, +0.5 * dtilde * t_total));
  frame(1, 1) = std::exp(Complex(0.0, -0.5 * dtilde * t_total));
  return frame * u;
}

}  // namespace detail

// Eq.-3 block-model fidelity of a candidate sequence against I (x) Rx(theta).
inline double xrot_block_model_fidelity(const std::vector<double>& tau,
                                        const std::vector<double>& field,
                                        double theta, const TransitionTable& tt) {
  const double wp = tt.w_i1;
  Matrix4cd u = Matrix4cd::Zero();
  u.block<2, 2>(0, 0) = detail::block_propagator(tau, field, wp - tt.w_i1, tt.d_i1);
  u.block<2, 2>(2, 2) = detail::block_propagator(tau, field, wp - tt.w_i2, tt.d_i2);
  Matrix4cd target = Matrix4cd::Zero();
  const Matrix2cd rx = detail::rx_gate(theta);
  target.block<2, 2>(0, 0) = rx;
  target.block<2, 2>(2, 2) = rx;
  return gate_fidelity(target, u);
}

// Two-stage design of I (x) Rx(theta) from N square pulses resonant with the
// first subspace: a multi-start bounded simplex search on the 4-level block
// model under the area constraint, then a local reoptimization of the best
// candidate against the full simulation.
inline XRotationResult design_x_rotation(double theta, int n_pulses,
                                         const Device& dev,
                                         const XRotationOptions& opt = {}) {
  if (!(theta > 0.0 && theta <= pi)) {
    throw physics_error("design_x_rotation: theta must lie in (0, pi]");
  }
  if (n_pulses < 1 || n_pulses > 6) {
    throw config_error("design_x_rotation: N must lie in [1, 6]");
  }
  const TransitionTable& tt = dev.transitions;
  const double d1 = tt.d_i1;
  const double area_needed = theta / (2.0 * d1);
  if (area_needed > n_pulses * opt.tau_max * SquareSequence::max_field) {
    throw InfeasibleConstraint("design_x_rotation: angle unreachable within "
                               "duration and amplitude bounds");
  }

  const int n = n_pulses;
  // Parameter vector x = (tau_1..tau_N, E_1..E_N); the amplitudes are
  // projected onto the constraint surface theta/2 = d1 sum tau |E| before
  // every evaluation, so the search has 2N-1 effective degrees of freedom.
  const auto project = [&](const VectorXd& x, std::vector<double>& tau,
                           std::vector<double>& field) -> bool {
    tau.resize(n);
    field.resize(n);
    double area = 0.0;
    for (int i = 0; i < n; ++i) {
      tau[i] = x(i);
      area += tau[i] * std::abs(x(n + i));
    }
    if (area < 1e-12) return false;
    const double scale = area_needed / area;
    double max_e = 0.0;
    for (int i = 0; i < n; ++i) {
      field[i] = x(n + i) * scale;
      max_e = std::max(max_e, std::abs(field[i]));
    }
    return max_e <= SquareSequence::max_field * (1.0 + 1e-12);
  };

  const auto stage1_obj = [&](const VectorXd& x) {
    std::vector<double> tau, field;
    if (!project(x, tau, field)) return 2.0;  // constraint unreachable here
    return 1.0 - xrot_block_model_fidelity(tau, field, theta, tt);
  };

  VectorXd lo(2 * n), hi(2 * n), step(2 * n);
  for (int i = 0; i < n; ++i) {
    lo(i) = SquareSequence::min_duration;
    hi(i) = opt.tau_max;
    step(i) = 0.5;
    lo(n + i) = -SquareSequence::max_field;
    hi(n + i) = SquareSequence::max_field;
    step(n + i) = 0.05 * SquareSequence::max_field;
  }

  // Latin-hypercube starts, deterministic under the seed
  std::mt19937_64 rng(opt.seed);
  std::vector<VectorXd> starts;
  for (int r = 0; r < opt.restarts; ++r) starts.emplace_back(2 * n);
  for (int d = 0; d < 2 * n; ++d) {
    std::vector<int> perm(opt.restarts);
    for (int r = 0; r < opt.restarts; ++r) perm[r] = r;
    for (int r = opt.restarts - 1; r > 0; --r) {
      std::swap(perm[r], perm[static_cast<int>(uniform01(rng) * (r + 1))]);
    }
    for (int r = 0; r < opt.restarts; ++r) {
      const double u01 = (perm[r] + uniform01(rng)) / opt.restarts;
      starts[r](d) = lo(d) + u01 * (hi(d) - lo(d));
    }
  }

  SimplexOptions s1;
  s1.max_evals = opt.stage1_evals;
  VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  for (const VectorXd& x0 : starts) {
    const SimplexResult r = nelder_mead(stage1_obj, x0, step, lo, hi, s1);
    if (r.f < best_f) {  // strict: deterministic tie-break by restart index
      best_f = r.f;
      best_x = r.x;
    }
  }
  if (!(best_f < 1.0)) {
    throw InfeasibleConstraint("design_x_rotation: no feasible sequence found");
  }

  const auto make_sequence = [&](const VectorXd& x) {
    std::vector<double> tau, field;
    project(x, tau, field);
    SquareSequence seq;
    seq.durations = tau;
    seq.amplitudes = field;
    seq.frequencies.assign(n, tt.w_i1);
    return seq;
  };

  const auto simulate = [&](const SquareSequence& seq) {
    PulseSchedule sched;
    sched.driven_qubit = tt.driven_qubit;
    for (int i = 0; i < n; ++i) {
      sched.segments.push_back(SquareSegment{seq.durations[i], seq.amplitudes[i],
                                             seq.frequencies[i]});
    }
    return propagate(dev, sched, opt.propagate);
  };

  Matrix4cd target = Matrix4cd::Zero();
  const Matrix2cd rx = detail::rx_gate(theta);
  target.block<2, 2>(0, 0) = rx;
  target.block<2, 2>(2, 2) = rx;

  // Stage 2: local reoptimization against the full dynamics.
  SquareSequence best_seq = make_sequence(best_x);
  SimulationResult best_sim = simulate(best_seq);
  double best_sim_f = gate_fidelity(target, best_sim.u_proj);
  const auto stage2_obj = [&](const VectorXd& x) {
    std::vector<double> tau, field;
    if (!project(x, tau, field)) return 2.0;
    SquareSequence seq;
    seq.durations = tau;
    seq.amplitudes = field;
    seq.frequencies.assign(n, tt.w_i1);
    SimulationResult sim = simulate(seq);
    const double f = gate_fidelity(target, sim.u_proj);
    if (f > best_sim_f) {
      best_sim_f = f;
      best_seq = seq;
      best_sim = std::move(sim);
    }
    return 1.0 - f;
  };
  SimplexOptions s2;
  s2.max_evals = opt.stage2_evals;
  VectorXd step2 = step * 0.2;
  nelder_mead(stage2_obj, best_x, step2, lo, hi, s2);

  XRotationResult out;
  out.sequence = best_seq;
  out.protocol_fidelity = 1.0 - best_f;
  out.simulation_fidelity = best_sim_f;
  out.purity = best_sim.purity;
  out.duration_ns = best_seq.total_duration();
  return out;
}

}  // namespace sechgate

#endif  // SECHGATE_OPTIMIZE_HPP
