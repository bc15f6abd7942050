#ifndef SECHGATE_PIPELINE_HPP
#define SECHGATE_PIPELINE_HPP

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sechgate/device_model.hpp"
#include "sechgate/io.hpp"
#include "sechgate/optimize.hpp"
#include "sechgate/propagation.hpp"
#include "sechgate/protocol.hpp"

namespace sechgate {

// Run independent tasks on a bounded worker pool; results keep input order.
template <class Out>
std::vector<Out> run_parallel(int n_tasks, int n_threads,
                              const std::function<Out(int)>& task) {
  std::vector<Out> out(n_tasks);
  if (n_tasks == 0) return out;
  n_threads = std::max(1, std::min(n_threads, n_tasks));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
        out[i] = task(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

struct RunConfig {
  DeviceParams device;
  ProtocolFamily family = ProtocolFamily::IQSS_2PI_RES;
  int target_block = 2;            // --lambda {1,2}
  Branch branch = Branch::Plus;
  std::vector<double> theta_grid;  // radians
  std::optional<double> sigma_mhz; // off-resonant family bandwidth override
  std::vector<double> sigma_fracs = {0.5};  // fractions of sigma_max (off-res sweeps)
  std::vector<double> coupling_grid_mhz;    // for sweep-coupling
  uint64_t seed = 1;
  double max_gate_time_ns = 200.0;
  int refine_evals = 60;           // 0 disables refinement
  int threads = 2;
  int xrot_pulses = 4;
};

inline std::vector<std::string> sweep_csv_header(bool with_coupling = false) {
  std::vector<std::string> h;
  if (with_coupling) h.push_back("coupling_mhz");
  for (const char* c : {"theta_req", "theta_realized", "fidelity",
                        "fidelity_z_corrected", "purity", "leakage",
                        "gate_time_ns", "family", "lambda", "sigma_mhz",
                        "pulse_freq_ghz", "error"}) {
    h.emplace_back(c);
  }
  return h;
}

namespace detail {

struct SweepTask {
  double theta = 0.0;
  std::optional<double> sigma;  // rad/ns, off-resonant family only
};

inline std::vector<std::string> sweep_row(const Device& dev, const RunConfig& cfg,
                                          const SweepTask& task) {
  std::vector<std::string> row;
  const auto emit = [&](const ProtocolSpec* spec, const SimulationResult* sim,
                        const std::string& error) {
    row.push_back(format_double(task.theta));
    row.push_back(sim ? format_double(sim->realized_theta) : "");
    row.push_back(sim ? format_double(sim->fidelity) : "");
    row.push_back(sim ? format_double(sim->fidelity_z_corrected) : "");
    row.push_back(sim ? format_double(sim->purity) : "");
    row.push_back(sim ? format_double(sim->leakage) : "");
    row.push_back(sim ? format_double(sim->gate_time) : "");
    row.push_back(to_string(cfg.family));
    row.push_back(std::to_string(cfg.target_block));
    row.push_back(spec ? format_double(rad_to_mhz(spec->sigma)) : "");
    row.push_back(spec ? format_double(rad_to_ghz(spec->drive_freq)) : "");
    row.push_back(error);
  };

  try {
    const ProtocolSpec spec = design_protocol(cfg.family, task.theta, dev.transitions,
                                              cfg.target_block, cfg.branch, task.sigma);
    if (spec.gate_time() > cfg.max_gate_time_ns) {
      emit(&spec, nullptr, "gate_time_cap");
      return row;
    }
    SimulationResult sim;
    if (cfg.refine_evals > 0) {
      const RefinementReport rr = refine_protocol(spec, dev, std::max(50, cfg.refine_evals));
      sim = simulate_cphase(dev, spec, rr.refined_params);
    } else {
      sim = simulate_cphase(dev, spec, {spec.sigma, spec.drive_freq, 1.0});
    }
    emit(&spec, &sim, "");
  } catch (const std::exception& e) {
    emit(nullptr, nullptr, e.what());
  }
  return row;
}

}  // namespace detail

// Resolved pulse parameters over the angle grid, with bandwidth-range
// annotations and the root-equation residual per row.
inline std::vector<std::string> run_derive(const RunConfig& cfg) {
  const Device dev = Device::make(cfg.device);
  std::vector<std::string> lines;
  for (double theta : cfg.theta_grid) {
    std::optional<double> sig;
    if (cfg.family == ProtocolFamily::OQSS_2PI_OFFRES) {
      sig = cfg.sigma_mhz ? mhz_to_rad(*cfg.sigma_mhz)
                          : 0.5 * oqss_offres_sigma_max(theta, dev.transitions);
    }
    const ProtocolSpec spec =
        design_protocol(cfg.family, theta, dev.transitions, cfg.target_block,
                        cfg.branch, sig);
    const RootCheck rc = verify_root_equation(spec, dev.transitions);
    const double adw = std::abs(dev.transitions.splitting(transitions_of(cfg.family)));
    const BandwidthRange range = bandwidth_range(cfg.family, cfg.branch, theta);
    std::ostringstream line;
    line << protocol_record(spec)
         << " sigma_over_dw=" << format_double(spec.sigma / adw)
         << " in_range=" << (range.contains(spec.sigma / adw) ? "yes" : "no")
         << " gate_time_ns=" << format_double(spec.gate_time())
         << " root_residual=" << format_double(rc.residual)
         << " invariant_distance=" << format_double(rc.invariant_distance);
    lines.push_back(line.str());
  }
  return lines;
}

inline CsvTable run_sweep_angle(const RunConfig& cfg) {
  const Device dev = Device::make(cfg.device);
  std::vector<detail::SweepTask> tasks;
  for (double theta : cfg.theta_grid) {
    if (cfg.family == ProtocolFamily::OQSS_2PI_OFFRES) {
      if (cfg.sigma_mhz) {
        tasks.push_back({theta, mhz_to_rad(*cfg.sigma_mhz)});
      } else {
        for (double frac : cfg.sigma_fracs) {
          tasks.push_back({theta, frac * oqss_offres_sigma_max(theta, dev.transitions)});
        }
      }
    } else {
      tasks.push_back({theta, std::nullopt});
    }
  }
  CsvTable csv;
  csv.header = sweep_csv_header(false);
  csv.rows = run_parallel<std::vector<std::string>>(
      static_cast<int>(tasks.size()), cfg.threads,
      [&](int i) { return detail::sweep_row(dev, cfg, tasks[i]); });
  return csv;
}

// Re-derives the transition table per coupling, then sweeps angles; rows
// whose analytic gate time exceeds the cap are marked and not simulated.
inline CsvTable run_sweep_coupling(const RunConfig& cfg) {
  for (double g : cfg.coupling_grid_mhz) {
    if (g < 30.0 || g > 180.0) {
      throw config_error("coupling grid must lie within [30, 180] MHz");
    }
  }
  CsvTable csv;
  csv.header = sweep_csv_header(true);
  for (double g : cfg.coupling_grid_mhz) {
    RunConfig sub = cfg;
    sub.device.coupling1_mhz = g;
    sub.device.coupling2_mhz = g;
    const CsvTable part = run_sweep_angle(sub);
    for (const auto& row : part.rows) {
      std::vector<std::string> full;
      full.push_back(format_double(g));
      full.insert(full.end(), row.begin(), row.end());
      csv.rows.push_back(std::move(full));
    }
  }
  return csv;
}

inline CsvTable run_sq_xrot(const RunConfig& cfg) {
  const Device dev = Device::make(cfg.device);
  CsvTable csv;
  csv.header = {"theta", "N", "duration_ns", "protocol_fidelity",
                "simulation_fidelity", "purity", "error"};
  csv.rows = run_parallel<std::vector<std::string>>(
      static_cast<int>(cfg.theta_grid.size()), cfg.threads, [&](int i) {
        const double theta = cfg.theta_grid[i];
        std::vector<std::string> row;
        row.push_back(format_double(theta));
        row.push_back(std::to_string(cfg.xrot_pulses));
        try {
          XRotationOptions xopt;
          xopt.seed = cfg.seed;
          const XRotationResult r = design_x_rotation(theta, cfg.xrot_pulses, dev, xopt);
          row.push_back(format_double(r.duration_ns));
          row.push_back(format_double(r.protocol_fidelity));
          row.push_back(format_double(r.simulation_fidelity));
          row.push_back(format_double(r.purity));
          row.push_back("");
        } catch (const std::exception& e) {
          row.insert(row.end(), {"", "", "", "", e.what()});
        }
        return row;
      });
  return csv;
}

}  // namespace sechgate

#endif  // SECHGATE_PIPELINE_HPP
