#ifndef SECHGATE_INVARIANTS_HPP
#define SECHGATE_INVARIANTS_HPP

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sechgate/common.hpp"

namespace sechgate {

// Makhlin local invariants of a two-qubit unitary. Basis order
// |00>,|01>,|10>,|11> with qubit 1 the first factor.
struct LocalInvariants {
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
};

// Magic-basis transformation.
inline const Matrix4cd& magic_basis_q() {
  static const Matrix4cd q = [] {
    const Complex i(0.0, 1.0);
    Matrix4cd m;
    m << 1, 0, 0, i,
         0, i, 1, 0,
         0, i, -1, 0,
         1, 0, 0, -i;
    return Matrix4cd(m / std::sqrt(2.0));
  }();
  return q;
}

// G1 = Re tr(M)^2/(16 det U), G2 = Im ..., G3 = (tr(M)^2 - tr(M^2))/(4 det U)
// with M(U) = (Q^dag U Q)^T (Q^dag U Q). Requires U unitary to 1e-8.
inline LocalInvariants local_invariants(const Matrix4cd& u) {
  if (unitarity_defect(u) > 1e-8) {
    throw NonUnitaryInput("local_invariants: input is not unitary to 1e-8");
  }
  const Matrix4cd& q = magic_basis_q();
  const Matrix4cd ub = q.adjoint() * u * q;
  const Matrix4cd m = ub.transpose() * ub;
  const Complex det = u.determinant();
  const Complex tr = m.trace();
  const Complex tr2 = (m * m).trace();
  const Complex w1 = tr * tr / (16.0 * det);
  const Complex w3 = (tr * tr - tr2) / (4.0 * det);
  if (std::abs(w3.imag()) > 1e-10) {
    throw numerical_error("local_invariants: G3 imaginary residue exceeds 1e-10");
  }
  return {w1.real(), w1.imag(), w3.real()};
}

// Invariants of the target CPHASE(theta) = diag(1,1,1,e^{i theta}).
inline LocalInvariants cphase_target_invariants(double theta) {
  if (theta <= -two_pi || theta > two_pi) {
    throw std::invalid_argument("cphase_target_invariants: theta out of (-2pi, 2pi]");
  }
  const double c = std::cos(theta / 2.0);
  return {c * c, 0.0, 2.0 + std::cos(theta)};
}

inline double invariants_distance(const LocalInvariants& a, const LocalInvariants& b) {
  const double d1 = a.g1 - b.g1, d2 = a.g2 - b.g2, d3 = a.g3 - b.g3;
  return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

// Closest unitary (polar factor) of a possibly leaky projected operator,
// plus the pre-unitarization deviation max|U - W|.
inline std::pair<Matrix4cd, double> polar_unitarize(const Matrix4cd& u) {
  Eigen::JacobiSVD<Matrix4cd> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix4cd w = svd.matrixU() * svd.matrixV().adjoint();
  return {w, max_abs(u - w)};
}

// Invariants of a leakage-contaminated projected operator: re-unitarize by
// polar decomposition and report the deviation alongside.
struct UnitarizedInvariants {
  LocalInvariants invariants;
  double deviation = 0.0;
};

inline UnitarizedInvariants local_invariants_unitarized(const Matrix4cd& u) {
  const auto [w, dev] = polar_unitarize(u);
  return {local_invariants(w), dev};
}

}  // namespace sechgate

#endif  // SECHGATE_INVARIANTS_HPP
