#include "mepol/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "mepol/errors.hpp"

namespace mepol {

namespace {

// Phase convention: scale a column so its largest-magnitude entry is real
// positive.
void fix_column_phase(Eigen::Ref<Vector6c> col) {
  int imax = 0;
  double best = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double a = std::abs(col(i));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best == 0.0) return;
  const Complex phase = col(imax) / best;
  col /= phase;
}

Matrix3c psd_sqrt_factor(const Matrix3c& h, double rank_tol,
                         const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
  if (es.info() != Eigen::Success) {
    fail_numerical(std::string(what) + ": eigensolver failed");
  }
  const auto& ev = es.eigenvalues();
  const double floor = -rank_tol * std::max(ev(2), 1.0);
  Matrix3c k = Matrix3c::Zero();
  int col = 0;
  for (int i = 2; i >= 0; --i) {
    if (ev(i) < floor) {
      fail_input(std::string(what) +
                 ": block not positive semidefinite (eigenvalue " +
                 std::to_string(ev(i)) + ")");
    }
    if (ev(i) > std::abs(floor)) {
      k.col(col) = es.eigenvectors().col(i) * std::sqrt(std::max(0.0, ev(i)));
      ++col;
    }
  }
  for (int j = 0; j < 3; ++j) {
    // reuse the 6-vector phase fixer on padded columns
    Vector6c tmp = Vector6c::Zero();
    tmp.head<3>() = k.col(j);
    fix_column_phase(tmp);
    k.col(j) = tmp.head<3>();
  }
  return k;
}

}  // namespace

BlockResponse CouplingSet::reconstruct() const {
  BlockResponse out = BlockResponse::zero(omega);
  for (const auto& ch : channels) {
    out.ee += 0.5 * kI * (ch.Le * ch.Le.adjoint());
    out.em += 0.5 * kI * (ch.Le * ch.Lm.adjoint());
    out.me += 0.5 * kI * (ch.Lm * ch.Le.adjoint());
    out.mm += 0.5 * kI * (ch.Lm * ch.Lm.adjoint());
  }
  return out;
}

CouplingSet factorize_gamma_A(const BlockResponse& m_a, double rank_tol) {
  if (!m_a.all_finite()) fail_input("factorize_gamma_A: non-finite input");
  const Matrix6c h = -2.0 * kI * m_a.as_matrix();
  const double herm_dev =
      (h - Matrix6c(h.adjoint())).norm() / std::max(h.norm(), 1e-300);
  if (h.norm() > 0.0 && herm_dev > 1e-8) {
    fail_input("factorize_gamma_A: -2i*M_A not Hermitian; input is not a "
               "consistent dissipative part");
  }
  Eigen::SelfAdjointEigenSolver<Matrix6c> es(0.5 * (h + Matrix6c(h.adjoint())));
  if (es.info() != Eigen::Success) {
    fail_numerical("factorize_gamma_A: eigensolver failed");
  }
  const auto& ev = es.eigenvalues();  // ascending
  const double s_max = std::max(ev(5), 0.0);
  const double cut = rank_tol * std::max(s_max, 1e-300);
  if (ev(0) < -cut) {
    fail_input("factorize_gamma_A: negative eigenvalue " +
               std::to_string(ev(0)) +
               " beyond rank tolerance; medium is not passive here");
  }

  CouplingSet set;
  set.omega = m_a.omega;
  std::vector<Vector6c> cols;
  std::vector<double> col_ev;
  for (int i = 5; i >= 0; --i) {  // descending
    if (ev(i) > cut) {
      Vector6c c = es.eigenvectors().col(i) * std::sqrt(ev(i));
      fix_column_phase(c);
      cols.push_back(c);
      col_ev.push_back(ev(i));
    }
  }
  // Within degenerate eigenvalue groups the eigenvector basis is solver
  // arbitrary; order columns there by the row of their largest entry so
  // the factors are reproducible (and isotropic inputs come out diagonal).
  for (size_t start = 0; start < cols.size();) {
    size_t end = start + 1;
    while (end < cols.size() &&
           std::abs(col_ev[end] - col_ev[start]) <= 1e-9 * s_max) {
      ++end;
    }
    std::sort(cols.begin() + static_cast<long>(start),
              cols.begin() + static_cast<long>(end),
              [](const Vector6c& a, const Vector6c& b) {
                int ia = 0, ib = 0;
                a.cwiseAbs().maxCoeff(&ia);
                b.cwiseAbs().maxCoeff(&ib);
                return ia < ib;
              });
    start = end;
  }
  set.rank = static_cast<int>(cols.size());
  const int n_channels = (set.rank + 2) / 3;
  set.channels.resize(static_cast<size_t>(n_channels));
  for (int l = 0; l < n_channels; ++l) {
    auto& ch = set.channels[static_cast<size_t>(l)];
    for (int j = 0; j < 3; ++j) {
      const size_t idx = static_cast<size_t>(3 * l + j);
      if (idx < cols.size()) {
        ch.Le.col(j) = cols[idx].head<3>();
        ch.Lm.col(j) = cols[idx].tail<3>();
      }
    }
  }
  return set;
}

double roundtrip_residual(const CouplingSet& k, const BlockResponse& m_a) {
  const double num = (k.reconstruct() - m_a).norm();
  const double den = m_a.norm();
  return den > 0.0 ? num / den : num;
}

CouplingSet isotropic_n1(double im_ee, double im_mm, int sign) {
  if (im_ee < 0.0 || im_mm < 0.0) {
    fail_input("isotropic_n1: negative dissipative strength (not passive)");
  }
  if (sign != 1 && sign != -1) fail_input("isotropic_n1: sign must be +-1");
  CouplingSet set;
  CouplingChannel ch;
  ch.Le = std::sqrt(2.0 * im_ee) * Matrix3c::Identity();
  ch.Lm = Complex(0.0, sign * std::sqrt(2.0 * im_mm)) * Matrix3c::Identity();
  set.channels.push_back(ch);
  set.rank = (im_ee > 0.0 || im_mm > 0.0) ? 3 : 0;
  return set;
}

std::pair<Matrix3c, Matrix3c> predicted_cross_n1(const CouplingSet& k) {
  BlockResponse rec = k.reconstruct();
  return {rec.em, rec.me};
}

CouplingSet partition_n3(const Matrix3c& a_ee, const Matrix3c& a_mm,
                         const Matrix3c& a_em, double channel3_scale,
                         double tol) {
  if (!(channel3_scale > 0.0)) {
    fail_input("partition_n3: channel3_scale must be positive");
  }
  CouplingSet set;
  set.channels.resize(3);

  // Channel 3 from the SVD of the cross block:
  //   A^em = (i/2) L_e3 L_m3^H  with  L_e3 = s U sqrt(2 S),
  //                                   L_m3 = (i sqrt(2)/s) V sqrt(S).
  Eigen::JacobiSVD<Matrix3c> svd(a_em,
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  const double s = std::sqrt(channel3_scale);
  Matrix3c le3 = Matrix3c::Zero();
  Matrix3c lm3 = Matrix3c::Zero();
  const double sv_cut = tol * std::max(sv(0), 1e-300);
  for (int j = 0; j < 3; ++j) {
    if (sv(j) <= sv_cut) continue;
    le3.col(j) = s * std::sqrt(2.0 * sv(j)) * svd.matrixU().col(j);
    lm3.col(j) = kI * (std::sqrt(2.0 * sv(j)) / s) * svd.matrixV().col(j);
  }
  set.channels[2].Le = le3;
  set.channels[2].Lm = lm3;

  // Verify the cross identity and compute the diagonal remainders.
  const Matrix3c em_rec = 0.5 * kI * (le3 * lm3.adjoint());
  if ((em_rec - a_em).norm() > 1e-10 * std::max(1.0, a_em.norm())) {
    fail_input("partition_n3: cross block not factorizable as a single "
               "channel product");
  }
  const Matrix3c ee_res =
      -2.0 * kI * (a_ee - 0.5 * kI * (le3 * le3.adjoint()));
  const Matrix3c mm_res =
      -2.0 * kI * (a_mm - 0.5 * kI * (lm3 * lm3.adjoint()));

  // Channels 1 and 2 factor the passive remainders; PSD failure means the
  // requested assignment is infeasible.
  set.channels[0].Le = psd_sqrt_factor(
      0.5 * (ee_res + Matrix3c(ee_res.adjoint())), tol,
      "partition_n3 (electric remainder)");
  set.channels[1].Lm = psd_sqrt_factor(
      0.5 * (mm_res + Matrix3c(mm_res.adjoint())), tol,
      "partition_n3 (magnetic remainder)");

  int rank = 0;
  for (const auto& ch : set.channels) {
    Eigen::Matrix<Complex, 6, 3> k6;
    k6.topRows<3>() = ch.Le;
    k6.bottomRows<3>() = ch.Lm;
    rank += static_cast<int>(
        Eigen::JacobiSVD<Eigen::Matrix<Complex, 6, 3>>(k6)
            .setThreshold(1e-10)
            .rank());
  }
  set.rank = rank;
  return set;
}

CouplingSet apply_gauge(const CouplingSet& k,
                        const std::vector<Matrix3c>& unitaries) {
  if (unitaries.size() != k.channels.size()) {
    fail_input("apply_gauge: one unitary per channel required");
  }
  for (const auto& u : unitaries) {
    const double dev = (u * u.adjoint() - Matrix3c::Identity()).norm();
    if (dev > 1e-10) fail_input("apply_gauge: matrix is not unitary");
  }
  CouplingSet out = k;
  for (size_t l = 0; l < k.channels.size(); ++l) {
    out.channels[l].Le = k.channels[l].Le * unitaries[l].adjoint();
    out.channels[l].Lm = k.channels[l].Lm * unitaries[l].adjoint();
  }
  return out;
}

}  // namespace mepol
