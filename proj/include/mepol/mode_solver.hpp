#pragma once

#include <optional>
#include <vector>

#include "mepol/coupling.hpp"
#include "mepol/medium.hpp"
#include "mepol/spectral_grid.hpp"

namespace mepol {

// mode_solver.hpp — transverse-polariton modes on a periodic spectral grid.
//
// At each frequency the pair of curl equations closes into a single
// generalized eigenvalue problem over the transverse coefficients
// x = (d, b):
//
//   A x = Z B x,
//   A = i Kc M_H' + (w/c) 1,       B = (1/pi) Kc M_A',
//
// with the six-vector curl  Kc (u, v) = (-curl v, +curl u)  and the block
// matrices arranged as
//
//   M_H' = [ 1 - H^ee   -H^em  ]      M_A' = [ A^ee        A^em ]
//          [ -(H^em)^H  1-H^mm ],            [ -(A^em)^H   A^mm ].
//
// Pairs with |beta| below the filter threshold are loss-decoupled (infinite
// Z) and excluded.  Accepted modes are sorted by (Re Z, Im Z, index of the
// largest coefficient) and phase-fixed so the largest d coefficient is real
// positive.

struct UnitSystem {
  double hbar = 1.0;
  double c = 1.0;
};

struct OperatorPair {
  MatrixXc A;
  MatrixXc B;
  double omega = 0.0;
  int dim = 0;
};

struct SolveFilter {
  double beta_tol = 1e-12;      // relative to |B|
  double residual_tol = 1e-8;   // accepted-mode eigenresidual bound
};

struct ModeSolution {
  double omega = 0.0;
  Complex Z{0.0, 0.0};
  int n = -1;                      // deterministic mode index at this omega
  VectorXc coeffs;                 // [d(k,p); b(k,p)] transverse coefficients
  std::vector<Vector3c> D, B;      // per-cell fields
  std::vector<Vector3c> ET, HT;    // derived fields (filled by derived_EH)
  bool normalized = false;
  double eigen_residual = 0.0;
};

struct SolveStats {
  int finite = 0;
  int infinite = 0;       // |beta| below threshold
  int indeterminate = 0;  // alpha and beta both negligible
  int rejected_residual = 0;
};

// Per-(grid, model, omega) assembly context: block matrices per region and
// region-indicator transforms.
class Assembly {
 public:
  Assembly(const MediumModel& model, const MediumMap& map,
           const SpectralGrid& grid, double omega, UnitSystem units = {});

  OperatorPair operators() const;  // dense A, B on the transverse basis

  const SpectralGrid& grid() const { return *grid_; }
  const MediumModel& model() const { return *model_; }
  const MediumMap& map() const { return *map_; }
  double omega() const { return omega_; }
  const UnitSystem& units() const { return units_; }

  // Block matrices of region r at this frequency.
  const Matrix6c& mh_prime(int r) const { return mh_[static_cast<size_t>(r)]; }
  const Matrix6c& ma_prime(int r) const { return ma_[static_cast<size_t>(r)]; }

  int dim() const { return 4 * grid_->k_count(); }

  // basis index helpers: field 0 = d, 1 = b
  int index(int field, int ik, int pol) const;

  std::vector<Vector3c> cells_from_coeffs(const VectorXc& coeffs,
                                          int field) const;

 private:
  const MediumModel* model_;
  const MediumMap* map_;
  const SpectralGrid* grid_;
  double omega_;
  UnitSystem units_;
  std::vector<Matrix6c> mh_, ma_;  // per region
  // indicator transforms: per region, per difference triple (flattened)
  std::vector<std::vector<Complex>> indicator_;
  int nx_ = 0, ny_ = 0, nz_ = 0;

  Complex indicator(int r, const std::array<int, 3>& diff) const;
  friend OperatorPair assemble(const Assembly&);
};

OperatorPair assemble(const Assembly& ctx);

// QZ solve of the assembled pair; modes carry reconstructed cell fields.
std::vector<ModeSolution> solve(const Assembly& ctx, const OperatorPair& pair,
                                const SolveFilter& filter = {},
                                SolveStats* stats = nullptr);

// Scales the mode so that  -i int (D,B)^H M_A' (D,B) dV = 2 hbar /
// (|Z|^2/pi^2 + 1).  Throws a degenerate-mode error when the quadratic form
// is not strictly positive.
void normalize(ModeSolution& mode, const Assembly& ctx);

// Fills ET/HT:  (ET, HT) = M_H' x - (Z / i pi) M_A' x  per cell.
void derived_EH(ModeSolution& mode, const Assembly& ctx);

// max over cells of the curl-equation defects, relative to field scale:
//   -i w D = c curl HT,   -i w B = -c curl ET.
double curl_consistency(const ModeSolution& mode, const Assembly& ctx);

// max_k |k.D(k)| / max_k |D(k)| and the B analogue (spectral basis).
double transversality(const ModeSolution& mode, const Assembly& ctx);

// Residual of the classical frequency-domain curl equations with the full
// response at complex frequency z, for given per-cell fields.
double classical_maxwell_residual(const std::vector<Vector3c>& D,
                                  const std::vector<Vector3c>& B,
                                  Complex z, const MediumModel& model,
                                  const MediumMap& map,
                                  const SpectralGrid& grid,
                                  UnitSystem units = {});

// Plane-wave reduction for a homogeneous medium: the dense 4x4 problem on
// the transverse amplitude pair (d1, d2, b1, b2) at one (k, w).
struct OracleMode {
  Complex Z{0.0, 0.0};
  Eigen::Matrix<Complex, 4, 1> amplitude;  // (d1, d2, b1, b2)
  double eigen_residual = 0.0;
};

std::vector<OracleMode> homogeneous_oracle(const MediumModel& model,
                                           int region, const Vector3r& k,
                                           double omega,
                                           UnitSystem units = {},
                                           const SolveFilter& filter = {});

// 4x4 operator pair backing the oracle (exposed for structural tests).
void homogeneous_operators(const MediumModel& model, int region,
                           const Vector3r& k, double omega, UnitSystem units,
                           Eigen::Matrix<Complex, 4, 4>& A4,
                           Eigen::Matrix<Complex, 4, 4>& B4);

// Internal medium amplitudes of a normalized mode.  The a-field separates
// into a principal-value part sampled on omega_prime and a delta-function
// coefficient proportional to Z.
struct InternalAmplitudes {
  std::vector<double> omega_prime;
  // [channel][cell][omega' index] -> 3-vector
  std::vector<std::vector<std::vector<Vector3c>>> a_pv;
  std::vector<std::vector<std::vector<Vector3c>>> b;
  // [channel][cell] -> 3-vector (coefficient of delta(w' - w))
  std::vector<std::vector<Vector3c>> a_delta;
};

InternalAmplitudes internal_amplitudes(const ModeSolution& mode,
                                       const Assembly& ctx,
                                       const std::vector<double>& omega_prime);

}  // namespace mepol
