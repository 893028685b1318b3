#include "mepol/block_tensor.hpp"

#include <cmath>

#include "mepol/errors.hpp"

namespace mepol {

BlockResponse BlockResponse::zero(double omega, int region) {
  BlockResponse r;
  r.omega = omega;
  r.region = region;
  return r;
}

BlockResponse BlockResponse::from_matrix(const Matrix6c& m, double omega,
                                         int region) {
  BlockResponse r;
  r.ee = m.block<3, 3>(0, 0);
  r.em = m.block<3, 3>(0, 3);
  r.me = m.block<3, 3>(3, 0);
  r.mm = m.block<3, 3>(3, 3);
  r.omega = omega;
  r.region = region;
  return r;
}

Matrix6c BlockResponse::as_matrix() const {
  Matrix6c m;
  m.block<3, 3>(0, 0) = ee;
  m.block<3, 3>(0, 3) = em;
  m.block<3, 3>(3, 0) = me;
  m.block<3, 3>(3, 3) = mm;
  return m;
}

bool BlockResponse::all_finite() const {
  return as_matrix().allFinite();
}

double BlockResponse::norm() const { return as_matrix().norm(); }

BlockResponse BlockResponse::conjugate() const {
  BlockResponse r = *this;
  r.ee = ee.conjugate();
  r.em = em.conjugate();
  r.me = me.conjugate();
  r.mm = mm.conjugate();
  return r;
}

BlockResponse& BlockResponse::operator+=(const BlockResponse& other) {
  ee += other.ee;
  em += other.em;
  me += other.me;
  mm += other.mm;
  return *this;
}

BlockResponse BlockResponse::operator+(const BlockResponse& other) const {
  BlockResponse r = *this;
  r += other;
  return r;
}

BlockResponse BlockResponse::operator-(const BlockResponse& other) const {
  BlockResponse r = *this;
  r.ee -= other.ee;
  r.em -= other.em;
  r.me -= other.me;
  r.mm -= other.mm;
  return r;
}

BlockResponse BlockResponse::operator*(double s) const {
  BlockResponse r = *this;
  r.ee *= s;
  r.em *= s;
  r.me *= s;
  r.mm *= s;
  return r;
}

SplitResponse split_block(const BlockResponse& m) {
  if (!m.all_finite()) {
    fail_input("split_block: non-finite entry in response sample");
  }
  SplitResponse s;
  s.hermitian_part.omega = s.dissipative_part.omega = m.omega;
  s.hermitian_part.region = s.dissipative_part.region = m.region;

  const Matrix3c ee_h = m.ee.adjoint();
  const Matrix3c mm_h = m.mm.adjoint();
  const Matrix3c em_h = m.em.adjoint();
  const Matrix3c me_h = m.me.adjoint();

  s.hermitian_part.ee = 0.5 * (m.ee + ee_h);
  s.hermitian_part.mm = 0.5 * (m.mm + mm_h);
  s.hermitian_part.em = 0.5 * (m.em + me_h);
  s.hermitian_part.me = 0.5 * (m.me + em_h);

  s.dissipative_part.ee = 0.5 * (m.ee - ee_h);
  s.dissipative_part.mm = 0.5 * (m.mm - mm_h);
  s.dissipative_part.em = 0.5 * (m.em - me_h);
  s.dissipative_part.me = 0.5 * (m.me - em_h);
  return s;
}

Eigen::Matrix<double, 6, 1> hermitian_eigenvalues(const Matrix6c& h) {
  Eigen::SelfAdjointEigenSolver<Matrix6c> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail_numerical("hermitian_eigenvalues: eigensolver failed to converge");
  }
  return solver.eigenvalues();
}

double passivity_margin(const BlockResponse& dissipative,
                        double hermiticity_tol) {
  if (!dissipative.all_finite()) {
    fail_input("passivity_margin: non-finite entry");
  }
  const Matrix6c h = -2.0 * kI * dissipative.as_matrix();
  const double scale = std::max(h.norm(), 1e-300);
  const double dev = (h - Matrix6c(h.adjoint())).norm() / scale;
  if (dev > hermiticity_tol && h.norm() > 0.0) {
    fail_input("passivity_margin: -2i*M_A not Hermitian (relative deviation " +
               std::to_string(dev) + "); inconsistent dissipative split");
  }
  const Matrix6c h_sym = 0.5 * (h + Matrix6c(h.adjoint()));
  return hermitian_eigenvalues(h_sym)(0);
}

CrossBoundReport cross_bound_check(const BlockResponse& dissipative,
                                   double tol) {
  CrossBoundReport report;
  int idx = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CrossBoundEntry e;
      e.i = i;
      e.j = j;
      e.cross_sq = std::norm(dissipative.em(i, j));
      e.diag_prod = std::abs(dissipative.ee(i, i)) * std::abs(dissipative.mm(j, j));
      e.excess = e.cross_sq - e.diag_prod;
      e.pass = e.excess <= tol * std::max(1.0, e.diag_prod);
      report.entries[idx++] = e;
      report.max_excess = std::max(report.max_excess, e.excess);
      report.pass = report.pass && e.pass;
    }
  }
  return report;
}

}  // namespace mepol
