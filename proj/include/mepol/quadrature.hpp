#pragma once

#include <functional>
#include <vector>

#include "mepol/types.hpp"

namespace mepol {

// quadrature.hpp — frequency grids, composite quadrature on non-uniform
// nodes, and the principal-value engine shared by the dispersion-integral
// evaluations and the discrete Hilbert transform.
//
// Principal-value scheme (singularity subtraction): for a pole at w inside
// [a, X],
//
//   PV int_a^X f(x)/(x - w) dx
//     = int_a^X [f(x) - f(w)]/(x - w) dx  +  f(w) * ln((X - w)/(w - a)),
//
// where the first integrand is smooth at x = w (it tends to f'(w)) and is
// integrated with the composite quadrature below.  The remainder beyond X is
// handled by a fitted C/x^p tail when requested by the caller.

enum class GridKind { log_spaced, linear };

// Strictly increasing positive frequency sample grid.
struct OmegaGrid {
  GridKind kind = GridKind::log_spaced;
  double omega_min = 1e-3;
  double omega_max = 1e3;
  int count = 2048;

  std::vector<double> values() const;

  OmegaGrid refined(int factor) const;  // same span, count*factor samples
};

// Integrates samples y on nodes x (piecewise quadratic where possible,
// trapezoid on a leftover last panel).  Nodes must be strictly increasing.
double integrate_nonuniform(const std::vector<double>& x,
                            const std::vector<double>& y);
Complex integrate_nonuniform(const std::vector<double>& x,
                             const std::vector<Complex>& y);

// PV integral of f(x)/(x - w) over the node span, pole at w strictly inside.
// f is given by samples on the nodes.  If w collides with a node the
// subtracted integrand at that node is replaced by a centered difference
// estimate of f'(w).
Complex pv_integral(const std::vector<double>& x,
                    const std::vector<Complex>& f, double w);

// Analytic tails  int_X^inf x^{-2} / (x - w) dx  and the (x + w) variant,
// used with a fitted C/x^2 decay beyond the grid edge.  Requires X > |w|.
double tail_integral_minus(double X, double w);  // 1/(x^2 (x - w))
double tail_integral_plus(double X, double w);   // 1/(x^2 (x + w))

}  // namespace mepol
