#pragma once

#include <array>

#include "mepol/types.hpp"

namespace mepol {

// block_tensor.hpp — complex 3x3 / 6x6 block algebra for magneto-electric
// response tensors.
//
// A response sample couples (P, M) to (D, B) through four 3x3 blocks
//
//     [ P ]   [ ee  em ] [ D ]
//     [ M ] = [ me  mm ] [ B ]
//
// The block matrix splits into a non-dissipative part (diagonal blocks
// Hermitian, cross blocks Hermitian-conjugate partners) and a dissipative
// part (diagonal blocks anti-Hermitian, me block equal to minus the
// conjugate transpose of the em block).  Passivity of the medium is the
// statement that the Hermitian 6x6 form -2i * (dissipative part) is
// positive semidefinite at positive frequency.

// One 6x6 response sample at a single (region, frequency).
struct BlockResponse {
  Matrix3c ee = Matrix3c::Zero();
  Matrix3c em = Matrix3c::Zero();
  Matrix3c me = Matrix3c::Zero();
  Matrix3c mm = Matrix3c::Zero();
  double omega = 0.0;  // signed angular frequency
  int region = 0;      // region label within a MediumModel

  static BlockResponse zero(double omega = 0.0, int region = 0);
  static BlockResponse from_matrix(const Matrix6c& m, double omega = 0.0,
                                   int region = 0);

  Matrix6c as_matrix() const;
  bool all_finite() const;
  double norm() const;  // Frobenius norm of the 6x6 matrix

  BlockResponse conjugate() const;  // entrywise complex conjugate

  BlockResponse& operator+=(const BlockResponse& other);
  BlockResponse operator+(const BlockResponse& other) const;
  BlockResponse operator-(const BlockResponse& other) const;
  BlockResponse operator*(double s) const;
};

struct SplitResponse {
  BlockResponse hermitian_part;    // non-dissipative
  BlockResponse dissipative_part;  // anti-Hermitian-type
};

// Splits M into its non-dissipative and dissipative parts:
//   H^{sn} = (M^{sn} + (M^{ns})^H) / 2,   A^{sn} = (M^{sn} - (M^{ns})^H) / 2.
// The parts sum back to M exactly; throws on non-finite input.
SplitResponse split_block(const BlockResponse& m);

// Minimum eigenvalue of the Hermitian form -2i * M_A.  Nonnegative means
// the medium only absorbs at this frequency.  Throws if -2i * M_A deviates
// from Hermitian by more than hermiticity_tol (relative Frobenius).
double passivity_margin(const BlockResponse& dissipative,
                        double hermiticity_tol = 1e-10);

// Cross-coupling bound report.  For each component pair (i, j) the
// dissipative blocks must satisfy |em_ij|^2 <= |ee_ii| * |mm_jj|;
// `excess` is the signed violation |em_ij|^2 - |ee_ii||mm_jj|.
struct CrossBoundEntry {
  int i = 0;
  int j = 0;
  double cross_sq = 0.0;   // |em_ij|^2
  double diag_prod = 0.0;  // |ee_ii| * |mm_jj|
  double excess = 0.0;
  bool pass = true;
};

struct CrossBoundReport {
  std::array<CrossBoundEntry, 9> entries{};
  double max_excess = 0.0;  // largest signed excess over all pairs
  bool pass = true;
};

// Pass criterion per entry: excess <= tol * max(1, |ee_ii||mm_jj|).
CrossBoundReport cross_bound_check(const BlockResponse& dissipative,
                                   double tol = 1e-10);

// Ascending eigenvalues of a Hermitian 6x6 matrix.
Eigen::Matrix<double, 6, 1> hermitian_eigenvalues(const Matrix6c& h);

}  // namespace mepol
