#pragma once

#include <Eigen/Dense>
#include <complex>

namespace mepol {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Matrix6c = Eigen::Matrix<Complex, 6, 6>;
using Vector3c = Eigen::Vector3cd;
using Vector6c = Eigen::Matrix<Complex, 6, 1>;
using Matrix3r = Eigen::Matrix3d;
using Vector3r = Eigen::Vector3d;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

// Plain bilinear cross product for a real vector with a complex one.
// (Eigen's cross() conjugates complex operands, which is never wanted here.)
inline Vector3c cross_rc(const Vector3r& a, const Vector3c& b) {
  return Vector3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
                  a(0) * b(1) - a(1) * b(0));
}

}  // namespace mepol
