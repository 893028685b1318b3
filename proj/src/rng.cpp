#include "mepol/rng.hpp"

#include <cmath>

namespace mepol {

double Rng::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

MatrixXc Rng::random_unitary(int n) {
  MatrixXc g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      g(i, j) = complex_normal();
    }
  }
  Eigen::HouseholderQR<MatrixXc> qr(g);
  MatrixXc q = qr.householderQ();
  const MatrixXc r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const Complex phase = (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1, 0);
    q.col(j) *= phase;
  }
  return q;
}

}  // namespace mepol
