#pragma once

#include <string>
#include <vector>

#include "mepol/block_tensor.hpp"
#include "mepol/quadrature.hpp"
#include "mepol/types.hpp"

namespace mepol {

// medium.hpp — parametric causal magneto-electric media.
//
// Each region carries a set of oscillator bands.  A band couples the fields
// to one bosonic channel through a pair of 3x3 coupling profiles
//
//   L_e(w) = sqrt(2 Im chi_e(w)) * O,
//   L_m(w) = sign * i * sqrt(2 Im chi_m(w)) * O,
//
// where chi(w) = f w0^2 / (w0^2 - w^2 - i gamma w) is a Lorentz resonance
// and O is a real orientation matrix.  The dissipative response follows
// pointwise from the coupling products,
//
//   A^{sn}(w>0) = (i/2) sum_l L_s(w) L_n(w)^H,
//
// extended to negative frequency by the reality condition G(-w) = G(w)^*.
// The non-dissipative part is the principal-value dispersion integral of
// the coupling products; diagonal blocks reduce to the Lorentz closed form
// while the cross block needs one scalar PV quadrature,
//
//   eta(w) = (2w/pi) PV int_0^inf Im chi_u(v) / (v^2 - w^2) dv,
//
// giving  H^{em}(w) = -i s sqrt(f_e f_m) eta(w) O O^T  (no elementary
// closed form exists for this cosine-transform partner).

enum class BandKind { electric, magnetic, cross };

struct Band {
  BandKind kind = BandKind::electric;
  double strength_e = 0.0;  // f_e >= 0 (electric oscillator strength)
  double strength_m = 0.0;  // f_m >= 0
  double omega0 = 1.0;      // resonance center, > 0
  double gamma = 0.1;       // linewidth, > 0 (zero width breaks causality checks)
  int sign = +1;            // phase of the magnetic coupling, +1 or -1
  Matrix3r orientation = Matrix3r::Identity();

  void validate() const;  // throws invalid_input on bad parameters
};

struct Region {
  std::string name;
  std::vector<Band> bands;
  // When set, the non-dissipative part is evaluated through the dispersion
  // integral of the coupling products instead of closed forms.
  bool hermitian_from_quadrature = false;
};

// Deliberate symmetry corruptions for negative-control fixtures.
enum class Corruption { none, flip_me_sign };

// Lorentz resonance f w0^2 / (w0^2 - w^2 - i gamma w).  Requires gamma > 0
// (a dissipationless resonance breaks every Kramers-Kronig based check)
// and f >= 0, w0 > 0.
Complex lorentz_closed_form(double f, double omega0, double gamma,
                            double omega);

// Unit-strength resonance continued to complex frequency.
Complex lorentz_unit(double omega0, double gamma, Complex z);

struct CouplingSample {
  Matrix3c Le = Matrix3c::Zero();
  Matrix3c Lm = Matrix3c::Zero();
};

struct QuadratureSpec {
  OmegaGrid grid;
  double tail_budget = 1e-3;  // max |tail| / |result| before failing
};

class MediumModel {
 public:
  MediumModel() = default;
  MediumModel(std::vector<Region> regions, OmegaGrid quad_grid = OmegaGrid{},
              Corruption corruption = Corruption::none);

  int region_count() const { return static_cast<int>(regions_.size()); }
  const Region& region(int r) const;
  const std::vector<Region>& regions() const { return regions_; }
  const OmegaGrid& quad_grid() const { return quad_grid_; }
  Corruption corruption() const { return corruption_; }

  // Full / non-dissipative / dissipative response at (region, omega).
  // omega may be negative; the reality condition is applied.
  BlockResponse gamma(int r, double omega) const;
  BlockResponse gamma_H(int r, double omega) const;
  BlockResponse gamma_A(int r, double omega) const;

  // Causal analytic continuation of the full response (closed forms plus
  // the spectral integral for the cross block).  Valid for Im z > -gamma/2.
  Matrix6c gamma_at_complex(int r, Complex z) const;

  // Coupling tensors per channel at omega > 0.
  std::vector<CouplingSample> couplings(int r, double omega) const;

  // Pointwise dissipative part re-derived from the coupling profiles.
  BlockResponse gamma_A_from_couplings(int r, double omega) const;

  // Dispersion integral of the coupling products on the given grid.
  // Throws when the fitted-tail estimate exceeds spec.tail_budget.
  BlockResponse gamma_H_from_couplings(int r, double omega,
                                       const QuadratureSpec& spec) const;

  // Kernel support bound: time at which every band envelope has decayed
  // below 1e-8 of its peak.
  double response_time(int r) const;

  // Model with declared time-reversal-odd parameters flipped.  The bands
  // here carry none, so this is the identity map; corruption is preserved.
  MediumModel time_reversed() const;

 private:
  std::vector<Region> regions_;
  OmegaGrid quad_grid_;
  Corruption corruption_ = Corruption::none;

  BlockResponse gamma_H_positive(int r, double omega) const;
  BlockResponse gamma_A_positive(int r, double omega) const;
  double cross_eta(const Band& b, double omega) const;     // eta(w), w > 0
  Complex cross_scalar_complex(const Band& b, Complex z) const;
};

// --- time-domain kernel -----------------------------------------------------

// Kernel samples on a uniform grid spanning [-t_max, t_max]; the samples at
// t < 0 are exactly zero (causal gate).  Entries are real 6x6 matrices in
// the same block arrangement as BlockResponse.
struct TimeKernel {
  double dt = 0.0;
  int half_count = 0;  // samples at t = 0, dt, ..., (half_count-1) dt
  std::vector<Eigen::Matrix<double, 6, 6>> causal;  // t >= 0 half
  double response_time = 0.0;
  double aliasing_estimate = 0.0;

  int total_count() const { return 2 * half_count - 1; }
  // Sample at t = (k - half_count + 1) * dt for k in [0, total_count).
  Eigen::Matrix<double, 6, 6> at(int k) const;
};

struct KernelSpec {
  double dt = 0.02;
  double t_max = 0.0;       // 0 -> use response_time
  double resolution = 80.0; // quadrature points per linewidth
  double span_factor = 12.0;  // minimum span in units of max(w0)
  double tail_tol = 2e-6;     // truncated tail weight relative to peak
  double aliasing_tol = 1e-3;  // spectral weight fraction above Nyquist
};

// Evaluates the causal kernel of region r by Filon quadrature of the
// coupling-product spectral density.  Throws a grid error when the spectral
// weight above the t-grid Nyquist frequency exceeds aliasing_tol.
TimeKernel time_kernel(const MediumModel& model, int r, const KernelSpec& spec);

// --- constitutive convolution -----------------------------------------------

struct TimeSeries3 {
  double dt = 0.0;
  std::vector<Vector3r> samples;
};

struct ConstitutiveResult {
  TimeSeries3 P;
  TimeSeries3 M;
  int valid_from = 0;  // first index with full kernel support
};

// Discrete time convolution of the kernel with field histories (Simpson
// weights over the kernel support).  D and B must share the kernel's dt;
// histories shorter than the kernel support raise a window error.
ConstitutiveResult apply_constitutive(const TimeKernel& kernel,
                                      const TimeSeries3& D,
                                      const TimeSeries3& B);

// Filon quadrature of int_a^b f(x) e^{i t x} dx on a uniform grid (odd
// sample count preferred; a leftover panel is handled separately).  Exposed
// for kernel oracles in tests.
Complex filon_integral_uniform(double a, double h,
                               const std::vector<double>& f, double t);

}  // namespace mepol
