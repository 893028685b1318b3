#pragma once

#include <vector>

#include "mepol/mode_solver.hpp"

namespace mepol {

// field_assembly.hpp — artifacts built on top of solved mode families:
// noise spectra, the canonical commutator sum rule, classical synthesis
// from mode amplitudes, and energy/flux bookkeeping.

// --- noise spectra ------------------------------------------------------------

// Per-mode noise coefficient fields.  The polarization coefficient is
// (Z/(i pi) - 1) [A^ee D + A^em B] per cell; the magnetization coefficient
// uses the me/mm row.  Longitudinal-channel contributions are not part of
// the transverse expansion and are excluded by construction (tp_only).
struct NoiseSpectra {
  double omega = 0.0;
  std::vector<std::vector<Vector3c>> P;  // [mode][cell]
  std::vector<std::vector<Vector3c>> M;
  bool tp_only = true;
};

NoiseSpectra noise_spectra_TP(const std::vector<ModeSolution>& modes,
                              const Assembly& ctx);

// --- commutator sum rule ------------------------------------------------------

// Equal-time commutator of the transverse field pair, evaluated per
// wavevector for a homogeneous medium.  Gathering the plane-wave mode
// families at +k and -k, the expansion gives the e^{ik(r-r')} coefficient
//
//   S_full = V [ sum_{n@+k} int (dw/2pi) d_i conj(b_j)
//              - sum_{n@-k} int (dw/2pi) conj(d_i) b_j ],
//
// whose exact value is -hbar c eps_{ikj} k_k / V * V = the spectral
// curl-of-delta kernel.  The reported S is -i * S_full so that the
// reference value reads  i hbar c eps_{ikj} k_k.
struct SumRuleResult {
  Complex S{0.0, 0.0};
  Complex target{0.0, 0.0};
  Complex residual{0.0, 0.0};
  double coverage = 1.0;       // captured fraction of the dissipative weight
  bool coverage_warning = false;
  int mode_count = 0;
};

SumRuleResult commutator_sum_rule(const MediumModel& model, int region,
                                  const Vector3r& k,
                                  const std::vector<double>& omega_grid,
                                  int i, int j, UnitSystem units = {},
                                  double coverage_min = 0.99);

// --- synthesis ----------------------------------------------------------------

// Mode families per frequency bin, with Riemann weights dw/(2 pi).
struct ModeBank {
  std::vector<double> omega;                      // bin centers, ascending
  std::vector<double> weight;                     // quadrature weight / (2 pi)
  std::vector<std::vector<ModeSolution>> modes;   // normalized, ET/HT filled
};

// Builds the bank by assembling and solving per bin; modes that fail to
// normalize (loss-decoupled) are dropped.
ModeBank solve_mode_bank(const MediumModel& model, const MediumMap& map,
                         const SpectralGrid& grid,
                         const std::vector<double>& omega_bins,
                         UnitSystem units = {}, const SolveFilter& filter = {},
                         int workers = 1);

struct Amplitudes {
  std::vector<std::vector<Complex>> alpha;  // [bin][mode]
};

// Projection of a classical initial state (medium at rest) onto the mode
// families:  alpha_{qn} = (1/hbar w) int dV (ET* . D0 + HT* . B0).
Amplitudes project_initial_state(const ModeBank& bank,
                                 const std::vector<Vector3c>& D0,
                                 const std::vector<Vector3c>& B0,
                                 const SpectralGrid& grid,
                                 UnitSystem units = {});

// Real fields at time t from the weighted mode sum
//   D(r,t) = sum_q w_q sum_n 2 Re[ alpha_{qn} Dv(r) e^{-i w_q t} ].
// E and H carry the transverse parts only (flagged); P = D - E, M = B - H.
struct FieldState {
  double t = 0.0;
  std::vector<Vector3r> D, B, E, H, P, M;
  bool tp_only = true;
};

FieldState synthesize_classical(const ModeBank& bank, const Amplitudes& amps,
                                double t, const SpectralGrid& grid);

// Amplitude-weighted per-bin field sums: once the amplitudes are fixed the
// mode index collapses, making long time scans O(bins x cells) per step.
// Produces the same fields as synthesize_classical.
struct AggregatedBank {
  std::vector<double> omega;
  std::vector<double> weight;
  // [bin][cell]
  std::vector<std::vector<Vector3c>> D, B, E, H;
};

AggregatedBank aggregate_bank(const ModeBank& bank, const Amplitudes& amps,
                              const SpectralGrid& grid);

FieldState synthesize_from_aggregate(const AggregatedBank& agg, double t,
                                     const SpectralGrid& grid);

// Trig-polynomial evaluation of an aggregated complex field at an arbitrary
// position (cell values -> DFT -> evaluation), including the k = 0 mean.
Vector3c evaluate_trig(const std::vector<Vector3c>& cells,
                       const SpectralGrid& grid, const Vector3r& position);

// --- energy and flux ----------------------------------------------------------

struct EnergyFlux {
  double U_DB = 0.0;                // (1/2) int (D.D + B.B) dV
  std::vector<Vector3r> S;          // c E x H per cell
};

EnergyFlux energy_and_flux(const FieldState& state, const SpectralGrid& grid,
                           UnitSystem units = {});

// Transverse Gaussian wavepacket built in k-space along a grid axis:
// coefficients  exp(-(m - m0)^2 / (2 sigma^2))  on positive axis modes,
// polarized along pol with the vacuum partner B = k_hat x D.  Returns
// per-cell complex envelope fields (real part = physical packet).
void gaussian_packet(const SpectralGrid& grid, int axis, int m_center,
                     double m_sigma, const Vector3r& pol, double amplitude,
                     std::vector<Vector3c>& D0, std::vector<Vector3c>& B0);

}  // namespace mepol
