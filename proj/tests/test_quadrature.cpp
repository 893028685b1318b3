#include <doctest.h>

#include <cmath>

#include "mepol/medium.hpp"
#include "mepol/quadrature.hpp"

using namespace mepol;

TEST_CASE("nonuniform quadratic integration: smooth function on log grid") {
  OmegaGrid g{GridKind::log_spaced, 0.1, 10.0, 801};
  const auto x = g.values();
  std::vector<double> f(x.size());
  for (size_t i = 0; i < x.size(); ++i) f[i] = 1.0 / (1.0 + x[i] * x[i]);
  // int_0.1^10 dx/(1+x^2) = atan(10) - atan(0.1)
  const double exact = std::atan(10.0) - std::atan(0.1);
  CHECK(integrate_nonuniform(x, f) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("pv integral: analytic check with a Lorentzian numerator") {
  // PV int_a^X  1/((x^2+1)(x-w)) dx has a closed form via partial fractions:
  // 1/((x^2+1)(x-w)) = [ (x + w)/(x^2+1) * (-1) + (x - w)^{-1} (1) ] /(w^2+1)
  const double a = 0.05, X = 40.0, w = 2.0;
  OmegaGrid g{GridKind::log_spaced, a, X, 4001};
  const auto x = g.values();
  std::vector<Complex> f(x.size());
  for (size_t i = 0; i < x.size(); ++i) f[i] = 1.0 / (1.0 + x[i] * x[i]);
  const Complex pv = pv_integral(x, f, w);
  const double exact =
      (std::log((X - w) / (w - a)) -
       0.5 * std::log((1.0 + X * X) / (1.0 + a * a)) -
       w * (std::atan(X) - std::atan(a))) /
      (w * w + 1.0);
  CHECK(pv.real() == doctest::Approx(exact).epsilon(1e-8));
  CHECK(std::abs(pv.imag()) < 1e-12);
}

TEST_CASE("pv integral tolerates a pole on a grid node") {
  const double a = 0.05, X = 40.0;
  OmegaGrid g{GridKind::log_spaced, a, X, 2001};
  const auto x = g.values();
  std::vector<Complex> f(x.size());
  for (size_t i = 0; i < x.size(); ++i) f[i] = 1.0 / (1.0 + x[i] * x[i]);
  const double w = x[1000];  // exactly a node
  const Complex pv = pv_integral(x, f, w);
  const double exact =
      (std::log((X - w) / (w - a)) -
       0.5 * std::log((1.0 + X * X) / (1.0 + a * a)) -
       w * (std::atan(X) - std::atan(a))) /
      (w * w + 1.0);
  CHECK(pv.real() == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("tail integrals match brute force") {
  const double X = 50.0, w = 3.0;
  // brute force on a fine grid out to 1e6
  OmegaGrid g{GridKind::log_spaced, X, 1e6, 20001};
  const auto x = g.values();
  std::vector<double> fm(x.size()), fp(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    fm[i] = 1.0 / (x[i] * x[i] * (x[i] - w));
    fp[i] = 1.0 / (x[i] * x[i] * (x[i] + w));
  }
  CHECK(tail_integral_minus(X, w) ==
        doctest::Approx(integrate_nonuniform(x, fm)).epsilon(1e-6));
  CHECK(tail_integral_plus(X, w) ==
        doctest::Approx(integrate_nonuniform(x, fp)).epsilon(1e-6));
}

TEST_CASE("filon handles fast oscillation without aliasing") {
  // int_0^20 e^{-x} e^{i t x} dx = (1 - e^{-20(1 - i t)}) / (1 - i t)
  const int n = 2001;
  const double h = 20.0 / (n - 1);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = std::exp(-i * h);
  for (double t : {0.0, 0.3, 2.0, 40.0, 400.0}) {
    const Complex exact =
        (1.0 - std::exp(Complex(-20.0, 20.0 * t))) / Complex(1.0, -t);
    const Complex got = filon_integral_uniform(0.0, h, f, t);
    CHECK(std::abs(got - exact) < 2e-6);
  }
}
