#pragma once

#include <vector>

#include "mepol/block_tensor.hpp"
#include "mepol/types.hpp"

namespace mepol {

// coupling.hpp — factorization of a dissipative response sample into
// channel coupling tensors, inverting
//
//   M_A = (i/2) sum_l K_l K_l^H,   K_l = [ L_e_l ; L_m_l ]  (6x3 stack).
//
// The factor columns come from the eigendecomposition of the Hermitian
// positive semidefinite form H = -2i M_A; eigenvalue/eigenvector pairs
// below the rank tolerance are dropped, the rest are grouped into channels
// of three columns (descending eigenvalue, zero-padded).  Each column's
// phase is fixed by making its largest-magnitude entry real positive so
// serialized factors are reproducible despite eigenvector phase ambiguity.

struct CouplingChannel {
  Matrix3c Le = Matrix3c::Zero();
  Matrix3c Lm = Matrix3c::Zero();
};

struct CouplingSet {
  std::vector<CouplingChannel> channels;
  int rank = 0;          // rank of -2i * M_A at the rank tolerance
  double omega = 0.0;

  BlockResponse reconstruct() const;  // (i/2) sum_l K_l K_l^H
};

// Factorizes M_A (at omega > 0).  rank_tol is relative to the largest
// eigenvalue of -2i M_A.  Throws not-passive when a negative eigenvalue
// beyond the tolerance appears.
CouplingSet factorize_gamma_A(const BlockResponse& m_a,
                              double rank_tol = 1e-10);

// |reconstruct(K) - M_A|_F / |M_A|_F (absolute when M_A = 0).
double roundtrip_residual(const CouplingSet& k, const BlockResponse& m_a);

// Single isotropic channel: L_e = sqrt(2 a) 1, L_m = sign i sqrt(2 b) 1,
// from scalar dissipative strengths a = Im G^ee >= 0, b = Im G^mm >= 0.
CouplingSet isotropic_n1(double im_ee, double im_mm, int sign);

// Cross blocks generated by an isotropic single channel:
//   A^em = sign sqrt(a b) 1,  A^me = -A^em.
std::pair<Matrix3c, Matrix3c> predicted_cross_n1(const CouplingSet& k);

// Three-channel split: channel 1 purely electric, channel 2 purely
// magnetic, channel 3 carrying the entire cross block.  channel3_scale
// reallocates diagonal weight between channel 3 and the remainders
// (L_e3 *= s, L_m3 /= s with s = sqrt(channel3_scale)); the cross block is
// unaffected.  Throws infeasible-partition when a remainder block fails to
// stay positive semidefinite.
CouplingSet partition_n3(const Matrix3c& a_ee, const Matrix3c& a_mm,
                         const Matrix3c& a_em, double channel3_scale = 1.0,
                         double tol = 1e-10);

// Right-multiplies every channel's tensors by U^H; the reconstructed
// response is invariant.
CouplingSet apply_gauge(const CouplingSet& k,
                        const std::vector<Matrix3c>& unitaries);

}  // namespace mepol
