#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mepol/medium.hpp"

namespace mepol {

// causality.hpp — validation of the fundamental response-function
// structure: the dispersion-relation (Hilbert-transform) closure between
// the non-dissipative and dissipative parts, time-reversal/Onsager
// symmetry, kernel causality, and the dissipated-energy functional.
//
// The Hilbert pair used throughout (full-line integrals folded onto
// omega' > 0 by the reality condition G(-w) = G(w)^*):
//
//   H(w) = 2i PV int (dw'/2pi)  A(w') / (w - w'),
//   A(w) = 2i PV int (dw'/2pi)  H(w') / (w - w').
//
// Both use the same singularity-subtraction engine as the dispersion
// integrals in medium.cpp; sample arrays are extended beyond the grid by a
// fitted C / w'^p decay before integration so that poles near the grid
// edges stay interior.

struct ValidationReport {
  std::string name;
  double tolerance = 0.0;
  double max_residual = 0.0;
  bool pass = false;
  std::vector<double> omega;     // per-sample trace (parallel arrays)
  std::vector<double> residual;
};

// Low-frequency behavior of the sampled function, used when extending
// samples below the grid: dissipative parts vanish at w = 0, Hermitian
// parts approach a constant.
enum class LowEnd { vanishes, constant };

// Hilbert transform of block samples given on grid `omega` (all > 0),
// evaluated at `w` (> 0, inside the grid span).
BlockResponse hilbert_A_to_H(const std::vector<double>& omega,
                             const std::vector<BlockResponse>& gamma_a,
                             double w);
BlockResponse hilbert_H_to_A(const std::vector<double>& omega,
                             const std::vector<BlockResponse>& gamma_h,
                             double w);

// Max over the grid of |H_rec(w) - H(w)|_F / |G(w)|_F for the model's own
// parts; the workhorse behind the dispersion-closure acceptance check.
ValidationReport kk_residual(const MediumModel& model, int region,
                             const std::vector<double>& omega,
                             double tolerance = 1e-3);

// Onsager symmetry of the full response: {G^ss}_rev = (G^ss)^T and
// {G^sn}_rev = -(G^ns)^T for s != n, where _rev flips the model's declared
// time-reversal-odd parameters.
ValidationReport onsager_residual(const MediumModel& model, int region,
                                  const std::vector<double>& omega,
                                  double tolerance = 1e-10);

// Same symmetry applied separately to the dissipative and non-dissipative
// parts.
ValidationReport time_reversal_residual(const MediumModel& model, int region,
                                        const std::vector<double>& omega,
                                        double tolerance = 1e-10);

// Acausal leakage of the reconstructed kernel: the kernel is rebuilt from
// the full frequency response without the causal gate,
//   G_rec(t) = int_0^inf (dw/pi) Re{ e^{-iwt} G(w) },
// and the report carries max_{t<0} |G_rec(t)| / max_t |G_rec(t)|.  Small
// residuals certify that the model's parts form a Hilbert pair.
ValidationReport causality_residual(const MediumModel& model, int region,
                                    double tolerance = 1e-3);

// Dissipated energy 2 int_0^inf (dw/2pi) (-iw) sum_r V_r x^H M_A x for
// spectra sampled on `omega`; x = (D, B) per site.  Sites are (region,
// volume) pairs carrying their own spectra.
struct SpectralSite {
  int region = 0;
  double volume = 1.0;
  std::vector<Vector3c> D;  // per omega sample
  std::vector<Vector3c> B;
};

double dissipated_energy(const MediumModel& model,
                         const std::vector<double>& omega,
                         const std::vector<SpectralSite>& sites,
                         double reality_tol = 1e-8);

// Same functional with the dissipative part supplied directly (allows
// probing non-model responses such as gain blocks).
double dissipated_energy_from(
    const std::function<Matrix6c(int region, double omega)>& gamma_a,
    const std::vector<double>& omega, const std::vector<SpectralSite>& sites,
    double reality_tol = 1e-8);

}  // namespace mepol
