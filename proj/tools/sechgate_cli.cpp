// Command-line front end: derive sech-pulse CPHASE protocols, run full
// Schrodinger-equation sweeps, and design square-pulse X rotations.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sechgate/sechgate.hpp"

namespace {

using namespace sechgate;

int run_selfcheck() {
  int failures = 0;
  const auto check = [&](const char* name, bool ok) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  };

  // analytic sech propagator vs time-stepped integration (converged window)
  {
    double worst = 0.0;
    for (const int a : {1, 2}) {
      for (const double x : {0.0, 0.5, 1.0, 3.0}) {
        const double sigma = 1.0, tw = 16.0;
        const auto h2 = [&](double t) {
          Matrix2cd h = Matrix2cd::Zero();
          const Complex e = std::exp(Complex(0.0, x * sigma * t));
          h(0, 1) = a * sigma / std::cosh(sigma * t) * e;
          h(1, 0) = std::conj(h(0, 1));
          return h;
        };
        const MatrixXcd u =
            integrate_schrodinger_dopri(h2, Matrix2cd::Identity(), -tw, tw);
        worst = std::max(worst, max_abs(u - sech_final_propagator(x, sigma, a)));
      }
    }
    check("two-level sech oracle (analytic vs numeric < 1e-6)", worst < 1e-6);
  }

  // root equations across families and angles
  {
    const Device dev = Device::make(DeviceParams{});
    double worst = 0.0;
    for (int i = 1; i <= 16; ++i) {
      const double theta = pi * i / 16.0 * 0.999;
      for (const auto family :
           {ProtocolFamily::IQSS_2PI_RES, ProtocolFamily::IQSS_4PI_RES,
            ProtocolFamily::OQSS_2PI_RES, ProtocolFamily::OQSS_4PI_RES,
            ProtocolFamily::OQSS_2PI_OFFRES}) {
        const ProtocolSpec s =
            design_protocol(family, theta, dev.transitions, 2, Branch::Plus);
        worst = std::max(worst, verify_root_equation(s, dev.transitions).residual);
      }
    }
    check("root equations (residual < 1e-10 over 16 angles x 5 families)", worst < 1e-10);
  }

  // invariants of reference gates
  {
    const LocalInvariants id = local_invariants(Matrix4cd::Identity());
    Matrix4cd cz = Matrix4cd::Identity();
    cz(3, 3) = -1.0;
    const LocalInvariants icz = local_invariants(cz);
    check("local invariants (identity -> (1,0,3), CZ -> (0,0,1))",
          invariants_distance(id, {1, 0, 3}) < 1e-12 &&
              invariants_distance(icz, {0, 0, 1}) < 1e-12);
  }

  // dressed splittings at the reference device
  {
    const Device dev = Device::make(DeviceParams{});
    check("dressed splittings (+3.23 / -11.07 MHz within 0.05)",
          std::abs(rad_to_mhz(dev.transitions.delta_i) - 3.23) < 0.05 &&
              std::abs(rad_to_mhz(dev.transitions.delta_o) + 11.07) < 0.05);
  }

  return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sech-pulse CPHASE and square-pulse X-rotation designer for "
               "cavity-coupled transmons"};
  app.require_subcommand(1);

  std::string config_path, family_str = "IQSS_2PI_RES", branch_str = "plus";
  std::string theta_grid_str = "0.4:1.6:7", coupling_grid_str, out_path;
  int lambda = 2;
  double sigma_mhz = -1.0, max_gate_time = 200.0;
  uint64_t seed = 1;
  int refine_evals = 60, threads = 2, xrot_pulses = 4;
  std::string sigma_frac_grid_str;

  const auto add_common = [&](CLI::App* cmd, bool wants_family) {
    cmd->add_option("--config", config_path, "device config file");
    if (wants_family) {
      cmd->add_option("--family", family_str,
                      "IQSS_2PI_RES | IQSS_4PI_RES | OQSS_2PI_RES | "
                      "OQSS_4PI_RES | OQSS_2PI_OFFRES");
      cmd->add_option("--lambda", lambda, "target subspace, 1 or 2")
          ->check(CLI::IsMember({1, 2}));
      cmd->add_option("--branch", branch_str, "plus | minus");
      cmd->add_option("--sigma-mhz", sigma_mhz,
                      "bandwidth override (off-resonant family), linear MHz");
    }
    cmd->add_option("--theta-grid", theta_grid_str, "angle grid A:B:N, radians");
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    cmd->add_option("--seed", seed, "optimizer seed");
    cmd->add_option("--max-gate-time-ns", max_gate_time, "gate-time cap, ns");
    cmd->add_option("--refine-evals", refine_evals,
                    "full-simulation refinement budget per row (0 disables)");
    cmd->add_option("--threads", threads, "worker threads for sweep rows");
  };

  auto* derive = app.add_subcommand("derive", "resolve pulse parameters for an angle grid");
  add_common(derive, true);
  auto* sweep_angle =
      app.add_subcommand("sweep-angle", "derive + simulate + refine over angles");
  add_common(sweep_angle, true);
  sweep_angle->add_option("--sigma-frac-grid", sigma_frac_grid_str,
                          "off-resonant bandwidth fractions of sigma_max, A:B:N");
  auto* sweep_coupling =
      app.add_subcommand("sweep-coupling", "angle sweep per coupling strength");
  add_common(sweep_coupling, true);
  sweep_coupling->add_option("--coupling-grid", coupling_grid_str,
                             "coupling grid A:B:N, linear MHz");
  auto* sq_xrot = app.add_subcommand("sq-xrot", "square-pulse X-rotation design");
  add_common(sq_xrot, false);
  sq_xrot->add_option("--pulses", xrot_pulses, "number of square pulses")
      ->check(CLI::Range(1, 6));
  auto* selfcheck =
      app.add_subcommand("selfcheck", "run the analytic-vs-numeric oracle suite");
  (void)selfcheck;

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("selfcheck")) return run_selfcheck();

    RunConfig cfg;
    if (!config_path.empty()) cfg.device = parse_device_config(config_path);
    cfg.family = family_from_string(family_str);
    cfg.target_block = lambda;
    cfg.branch = branch_from_string(branch_str);
    cfg.theta_grid = parse_grid(theta_grid_str);
    if (sigma_mhz > 0.0) cfg.sigma_mhz = sigma_mhz;
    if (!sigma_frac_grid_str.empty()) cfg.sigma_fracs = parse_grid(sigma_frac_grid_str);
    cfg.seed = seed;
    cfg.max_gate_time_ns = max_gate_time;
    cfg.refine_evals = refine_evals;
    cfg.threads = threads;
    cfg.xrot_pulses = xrot_pulses;

    const auto write_out = [&](const std::string& text) {
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out_path);
        if (!f) throw config_error("cannot open output file: " + out_path);
        f << text;
      }
    };

    if (app.got_subcommand("derive")) {
      std::string text;
      for (const auto& line : run_derive(cfg)) text += line + "\n";
      write_out(text);
    } else if (app.got_subcommand("sweep-angle")) {
      write_out(run_sweep_angle(cfg).str());
    } else if (app.got_subcommand("sweep-coupling")) {
      if (coupling_grid_str.empty()) throw config_error("--coupling-grid is required");
      cfg.coupling_grid_mhz = parse_grid(coupling_grid_str);
      write_out(run_sweep_coupling(cfg).str());
    } else if (app.got_subcommand("sq-xrot")) {
      write_out(run_sq_xrot(cfg).str());
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const physics_error& e) {
    std::cerr << "physics error: " << e.what() << "\n";
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
