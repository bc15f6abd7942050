#ifndef SECHGATE_DEVICE_MODEL_HPP
#define SECHGATE_DEVICE_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "sechgate/common.hpp"

namespace sechgate {

// Physical constants of the cavity + two-transmon device. User-facing
// frequencies are linear (GHz / MHz); builders convert to rad/ns.
struct DeviceParams {
  double cavity_freq_ghz = 7.15;
  double q1_freq_ghz = 6.2;
  double q2_freq_ghz = 6.8;
  double anharmonicity1_mhz = 350.0;
  double anharmonicity2_mhz = 350.0;
  double coupling1_mhz = 130.0;
  double coupling2_mhz = 130.0;
  int cavity_levels = 3;
  int transmon_levels = 4;

  int dimension() const { return cavity_levels * transmon_levels * transmon_levels; }

  void validate(int dimension_cap = 4096) const {
    if (cavity_freq_ghz <= 0 || q1_freq_ghz <= 0 || q2_freq_ghz <= 0 ||
        anharmonicity1_mhz <= 0 || anharmonicity2_mhz <= 0 ||
        coupling1_mhz <= 0 || coupling2_mhz <= 0) {
      throw config_error("DeviceParams: frequencies, anharmonicities and "
                         "couplings must be strictly positive");
    }
    if (cavity_levels < 3) throw config_error("DeviceParams: cavity_levels must be >= 3");
    if (transmon_levels < 4) throw config_error("DeviceParams: transmon_levels must be >= 4");
    if (dimension() > dimension_cap) {
      throw config_error("DeviceParams: truncated dimension exceeds cap");
    }
  }

  // Bare product index for |i; j, k> (cavity, transmon 1, transmon 2).
  int bare_index(int i, int j, int k) const {
    return (i * transmon_levels + j) * transmon_levels + k;
  }
};

// Lowering operator of one subsystem embedded in the product space.
// which: 0 = cavity, 1 = transmon 1, 2 = transmon 2.
inline MatrixXd lowering_operator(const DeviceParams& p, int which) {
  const int nc = p.cavity_levels, nt = p.transmon_levels;
  MatrixXd a = MatrixXd::Zero(p.dimension(), p.dimension());
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nt; ++j) {
      for (int k = 0; k < nt; ++k) {
        const int r = p.bare_index(i, j, k);
        if (which == 0 && i + 1 < nc) {
          a(r, p.bare_index(i + 1, j, k)) = std::sqrt(i + 1.0);
        } else if (which == 1 && j + 1 < nt) {
          a(r, p.bare_index(i, j + 1, k)) = std::sqrt(j + 1.0);
        } else if (which == 2 && k + 1 < nt) {
          a(r, p.bare_index(i, j, k + 1)) = std::sqrt(k + 1.0);
        }
      }
    }
  }
  return a;
}

// Total excitation number n_c + n_1 + n_2 (diagonal in the bare basis).
// Commutes with the static Hamiltonian, which conserves excitations.
inline VectorXd excitation_number(const DeviceParams& p) {
  VectorXd n(p.dimension());
  for (int i = 0; i < p.cavity_levels; ++i)
    for (int j = 0; j < p.transmon_levels; ++j)
      for (int k = 0; k < p.transmon_levels; ++k)
        n(p.bare_index(i, j, k)) = i + j + k;
  return n;
}

// Static Hamiltonian in the bare product basis, rad/ns:
//   H0 = w_c n_c + sum_j [eps_j n_j - (eta_j/2) n_j (n_j - 1)]
//        + sum_j g_j (a_j^dag a + a^dag a_j)
inline MatrixXd build_static_hamiltonian(const DeviceParams& p, int dimension_cap = 4096) {
  p.validate(dimension_cap);
  const double wc = ghz_to_rad(p.cavity_freq_ghz);
  const double e1 = ghz_to_rad(p.q1_freq_ghz);
  const double e2 = ghz_to_rad(p.q2_freq_ghz);
  const double eta1 = mhz_to_rad(p.anharmonicity1_mhz);
  const double eta2 = mhz_to_rad(p.anharmonicity2_mhz);
  const double g1 = mhz_to_rad(p.coupling1_mhz);
  const double g2 = mhz_to_rad(p.coupling2_mhz);

  MatrixXd h = MatrixXd::Zero(p.dimension(), p.dimension());
  for (int i = 0; i < p.cavity_levels; ++i) {
    for (int j = 0; j < p.transmon_levels; ++j) {
      for (int k = 0; k < p.transmon_levels; ++k) {
        const int r = p.bare_index(i, j, k);
        h(r, r) = wc * i + e1 * j - 0.5 * eta1 * j * (j - 1) + e2 * k -
                  0.5 * eta2 * k * (k - 1);
      }
    }
  }
  const MatrixXd ac = lowering_operator(p, 0);
  const MatrixXd a1 = lowering_operator(p, 1);
  const MatrixXd a2 = lowering_operator(p, 2);
  h += g1 * (a1.transpose() * ac + ac.transpose() * a1);
  h += g2 * (a2.transpose() * ac + ac.transpose() * a2);
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
    throw numerical_error("build_static_hamiltonian: assembly not Hermitian");
  }
  return h;
}

// Eigenbasis of H0, with each eigenstate labeled by the bare state it
// overlaps most strongly with.
struct DressedBasis {
  VectorXd eigenvalues;          // ascending, rad/ns
  MatrixXd eigenvectors;         // columns are dressed states in the bare basis
  std::vector<int> dressed_of_bare;  // bijection bare index -> eigenindex
  std::vector<double> overlap_quality;  // |<bare|dressed>|^2 per assignment

  double energy_of_bare(int bare) const { return eigenvalues(dressed_of_bare[bare]); }
  Eigen::VectorXd state_of_bare(int bare) const {
    return eigenvectors.col(dressed_of_bare[bare]);
  }
};

// Greedy assignment in descending order of overlap magnitude with conflict
// exclusion; any assignment whose best overlap^2 is <= 0.5 is ambiguous.
inline DressedBasis diagonalize_dressed(const MatrixXd& h0) {
  const int dim = static_cast<int>(h0.rows());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h0);
  if (es.info() != Eigen::Success) {
    throw numerical_error("diagonalize_dressed: eigensolver failed");
  }
  DressedBasis db;
  db.eigenvalues = es.eigenvalues();
  db.eigenvectors = es.eigenvectors();

  struct Cand { double q; int bare, eig; };
  std::vector<Cand> cands;
  cands.reserve(static_cast<size_t>(dim) * dim);
  for (int b = 0; b < dim; ++b) {
    for (int e = 0; e < dim; ++e) {
      const double v = db.eigenvectors(b, e);
      cands.push_back({v * v, b, e});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.q != y.q) return x.q > y.q;
    if (x.bare != y.bare) return x.bare < y.bare;  // deterministic tie-break
    return x.eig < y.eig;
  });

  db.dressed_of_bare.assign(dim, -1);
  db.overlap_quality.assign(dim, 0.0);
  std::vector<char> eig_taken(dim, 0);
  int assigned = 0;
  for (const Cand& c : cands) {
    if (db.dressed_of_bare[c.bare] >= 0 || eig_taken[c.eig]) continue;
    db.dressed_of_bare[c.bare] = c.eig;
    db.overlap_quality[c.bare] = c.q;
    eig_taken[c.eig] = 1;
    if (++assigned == dim) break;
  }
  const double worst = *std::min_element(db.overlap_quality.begin(),
                                         db.overlap_quality.end());
  if (worst <= 0.5) {
    throw AmbiguousLabeling("diagonalize_dressed: best overlap^2 <= 0.5; "
                            "coupling too strong for dispersive labeling");
  }
  return db;
}

enum class TransitionFamily { IQSS, OQSS };

// Dressed transition frequencies, dipoles and splittings for the driven
// qubit. Block 1 has the spectator qubit in |0>, block 2 in |1>.
// Splitting sign convention: delta_x = w_x1 - w_x2 (reproduces the paper's
// +3.23 / -11.07 MHz at the reference parameters).
struct TransitionTable {
  int driven_qubit = 2;
  double w_i1 = 0, w_i2 = 0, w_o1 = 0, w_o2 = 0;  // rad/ns
  double d_i1 = 0, d_i2 = 0, d_o1 = 0, d_o2 = 0;  // dimensionless
  double delta_i = 0, delta_o = 0;                 // rad/ns, signed
  std::array<int, 4> qss_dressed;  // eigenindices of |00>,|01>,|10>,|11>

  double freq(TransitionFamily f, int block) const {
    if (f == TransitionFamily::IQSS) return block == 1 ? w_i1 : w_i2;
    return block == 1 ? w_o1 : w_o2;
  }
  double dipole(TransitionFamily f, int block) const {
    if (f == TransitionFamily::IQSS) return block == 1 ? d_i1 : d_i2;
    return block == 1 ? d_o1 : d_o2;
  }
  double splitting(TransitionFamily f) const {
    return f == TransitionFamily::IQSS ? delta_i : delta_o;
  }
};

inline TransitionTable extract_transitions(const DressedBasis& db,
                                           const DeviceParams& p,
                                           int driven_qubit = 2) {
  if (driven_qubit != 1 && driven_qubit != 2) {
    throw config_error("extract_transitions: driven qubit must be 1 or 2");
  }
  TransitionTable tt;
  tt.driven_qubit = driven_qubit;

  // (spectator state s, driven level m) -> bare triple
  const auto bare = [&](int s, int m) {
    return driven_qubit == 2 ? p.bare_index(0, s, m) : p.bare_index(0, m, s);
  };
  const auto energy = [&](int s, int m) { return db.energy_of_bare(bare(s, m)); };

  tt.w_i1 = energy(0, 1) - energy(0, 0);
  tt.w_i2 = energy(1, 1) - energy(1, 0);
  tt.w_o1 = energy(0, 2) - energy(0, 1);
  tt.w_o2 = energy(1, 2) - energy(1, 1);
  tt.delta_i = tt.w_i1 - tt.w_i2;
  tt.delta_o = tt.w_o1 - tt.w_o2;

  const MatrixXd a = lowering_operator(p, driven_qubit);
  const auto dip = [&](int s, int m_lo) {
    return std::abs(db.state_of_bare(bare(s, m_lo)).dot(a * db.state_of_bare(bare(s, m_lo + 1))));
  };
  tt.d_i1 = dip(0, 0);
  tt.d_i2 = dip(1, 0);
  tt.d_o1 = dip(0, 1);
  tt.d_o2 = dip(1, 1);

  // qubit-subspace states in |q1 q2> order, qubit 1 first factor
  tt.qss_dressed = {db.dressed_of_bare[p.bare_index(0, 0, 0)],
                    db.dressed_of_bare[p.bare_index(0, 0, 1)],
                    db.dressed_of_bare[p.bare_index(0, 1, 0)],
                    db.dressed_of_bare[p.bare_index(0, 1, 1)]};
  return tt;
}

// Rank-4 projector onto the dressed qubit subspace.
inline MatrixXd qss_projector(const DressedBasis& db, const TransitionTable& tt) {
  MatrixXd pr = MatrixXd::Zero(db.eigenvectors.rows(), db.eigenvectors.rows());
  for (int k : tt.qss_dressed) {
    pr += db.eigenvectors.col(k) * db.eigenvectors.col(k).transpose();
  }
  return pr;
}

// One-call assembly used by the protocol and simulation layers.
struct Device {
  DeviceParams params;
  MatrixXd h0;
  DressedBasis dressed;
  TransitionTable transitions;

  static Device make(const DeviceParams& p, int driven_qubit = 2) {
    Device d;
    d.params = p;
    d.h0 = build_static_hamiltonian(p);
    d.dressed = diagonalize_dressed(d.h0);
    d.transitions = extract_transitions(d.dressed, p, driven_qubit);
    return d;
  }
};

}  // namespace sechgate

#endif  // SECHGATE_DEVICE_MODEL_HPP
