#include "mepol/quadrature.hpp"

#include <cmath>

#include "mepol/errors.hpp"

namespace mepol {

std::vector<double> OmegaGrid::values() const {
  if (count < 3) fail_input("OmegaGrid: need at least 3 samples");
  if (!(omega_min > 0.0) || !(omega_max > omega_min)) {
    fail_input("OmegaGrid: require 0 < omega_min < omega_max");
  }
  std::vector<double> v(static_cast<size_t>(count));
  if (kind == GridKind::log_spaced) {
    const double lmin = std::log(omega_min);
    const double lmax = std::log(omega_max);
    for (int i = 0; i < count; ++i) {
      v[static_cast<size_t>(i)] =
          std::exp(lmin + (lmax - lmin) * i / (count - 1));
    }
    v.front() = omega_min;
    v.back() = omega_max;
  } else {
    for (int i = 0; i < count; ++i) {
      v[static_cast<size_t>(i)] =
          omega_min + (omega_max - omega_min) * i / (count - 1);
    }
  }
  return v;
}

OmegaGrid OmegaGrid::refined(int factor) const {
  OmegaGrid g = *this;
  g.count = (count - 1) * factor + 1;
  return g;
}

namespace {

// Integral over [x0, x2] of the quadratic through (x0,y0), (x1,y1), (x2,y2).
template <typename T>
T quadratic_panel(double x0, double x1, double x2, T y0, T y1, T y2) {
  const double h = x2 - x0;
  const double h0 = x1 - x0;
  const double h1 = x2 - x1;
  // Weights from exact integration of the Lagrange basis.
  const double w0 = h * (2.0 * h0 - h1) / (6.0 * h0);
  const double w1 = h * h * h / (6.0 * h0 * h1);
  const double w2 = h * (2.0 * h1 - h0) / (6.0 * h1);
  return w0 * y0 + w1 * y1 + w2 * y2;
}

template <typename T>
T integrate_impl(const std::vector<double>& x, const std::vector<T>& y) {
  if (x.size() != y.size()) fail_input("integrate: node/sample size mismatch");
  if (x.size() < 2) fail_input("integrate: need at least 2 nodes");
  T total{};
  size_t i = 0;
  for (; i + 2 < x.size(); i += 2) {
    total += quadratic_panel(x[i], x[i + 1], x[i + 2], y[i], y[i + 1], y[i + 2]);
  }
  if (i + 1 < x.size()) {  // one panel left: trapezoid
    total += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  }
  return total;
}

}  // namespace

double integrate_nonuniform(const std::vector<double>& x,
                            const std::vector<double>& y) {
  return integrate_impl(x, y);
}

Complex integrate_nonuniform(const std::vector<double>& x,
                             const std::vector<Complex>& y) {
  return integrate_impl(x, y);
}

Complex pv_integral(const std::vector<double>& x,
                    const std::vector<Complex>& f, double w) {
  if (x.size() != f.size() || x.size() < 3) {
    fail_input("pv_integral: bad sample arrays");
  }
  const double a = x.front();
  const double X = x.back();
  if (!(w > a && w < X)) {
    fail_input("pv_integral: pole must lie strictly inside the node span");
  }

  // Value of f at the pole: cubic interpolation through the four nearest
  // nodes (or the node value when the pole sits on a node).
  size_t hi = 1;
  while (hi < x.size() && x[hi] < w) ++hi;
  const size_t lo = hi - 1;
  Complex fw;
  const double eps = 1e-14 * (std::abs(w) + x[1] - x[0]);
  int node_hit = -1;
  if (std::abs(x[lo] - w) <= eps) {
    fw = f[lo];
    node_hit = static_cast<int>(lo);
  } else if (hi < x.size() && std::abs(x[hi] - w) <= eps) {
    fw = f[hi];
    node_hit = static_cast<int>(hi);
  } else {
    const size_t first =
        (lo == 0) ? 0 : std::min(lo - 1, x.size() - 4);
    fw = Complex(0, 0);
    for (size_t a = first; a < first + 4; ++a) {
      double lag = 1.0;
      for (size_t b = first; b < first + 4; ++b) {
        if (a != b) lag *= (w - x[b]) / (x[a] - x[b]);
      }
      fw += lag * f[a];
    }
  }

  std::vector<Complex> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (static_cast<int>(i) == node_hit) {
      // Smooth limit [f(x)-f(w)]/(x-w) -> f'(w), centered difference.
      const size_t il = (i == 0) ? i : i - 1;
      const size_t ir = (i + 1 == x.size()) ? i : i + 1;
      g[i] = (f[ir] - f[il]) / (x[ir] - x[il]);
    } else {
      g[i] = (f[i] - fw) / (x[i] - w);
    }
  }
  const Complex smooth = integrate_nonuniform(x, g);
  const double log_term = std::log((X - w) / (w - a));
  return smooth + fw * log_term;
}

double tail_integral_minus(double X, double w) {
  if (!(X > std::abs(w)) || X <= 0.0) {
    fail_input("tail_integral_minus: require X > |w|");
  }
  if (w == 0.0) return 1.0 / (2.0 * X * X);
  // int_X^inf dx / (x^2 (x-w)) = -(1/w^2) log1p(-w/X) - 1/(w X)
  return -std::log1p(-w / X) / (w * w) - 1.0 / (w * X);
}

double tail_integral_plus(double X, double w) {
  return tail_integral_minus(X, -w);
}

}  // namespace mepol
