#ifndef SECHGATE_TEST_UTIL_HPP
#define SECHGATE_TEST_UTIL_HPP

#include <random>

#include "sechgate/common.hpp"
#include "sechgate/device_model.hpp"

namespace sechgate::testutil {

// Reference device of the simulations (cavity 7.15 GHz, transmons 6.2 and
// 6.8 GHz, anharmonicity 350 MHz, couplings 130 MHz, 3 x 4 x 4 levels).
inline const Device& paper_device() {
  static const Device dev = Device::make(DeviceParams{});
  return dev;
}

inline double gauss(std::mt19937_64& rng) {
  // Box-Muller on explicit uniforms; reproducible across standard libraries
  double u1 = 0.0;
  while (u1 == 0.0) u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

inline Complex gauss_complex(std::mt19937_64& rng) {
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

// Haar-random unitary via QR of a Ginibre matrix with phase fixing.
inline MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
  MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss_complex(rng);
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Eigen::Matrix2cd haar_su2(std::mt19937_64& rng) {
  Eigen::Matrix2cd u = haar_unitary(2, rng);
  u /= std::sqrt(u.determinant());
  return u;
}

}  // namespace sechgate::testutil

#endif  // SECHGATE_TEST_UTIL_HPP
