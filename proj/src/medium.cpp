#include "mepol/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mepol/errors.hpp"

namespace mepol {

namespace {

Matrix3r outer(const Matrix3r& o) { return o * o.transpose(); }

// Unit-strength Im chi on the real axis.
double im_chi_unit(double omega0, double gamma, double w) {
  const double d = omega0 * omega0 - w * w;
  const double den = d * d + gamma * gamma * w * w;
  return omega0 * omega0 * gamma * w / den;
}

}  // namespace

void Band::validate() const {
  if (gamma <= 0.0) {
    fail_input("band: gamma <= 0 defines a dissipationless resonance, which "
               "breaks the dispersion-relation checks");
  }
  if (omega0 <= 0.0) fail_input("band: omega0 must be positive");
  if (strength_e < 0.0 || strength_m < 0.0) {
    fail_input("band: oscillator strengths must be nonnegative");
  }
  if (sign != 1 && sign != -1) fail_input("band: sign must be +1 or -1");
  if (!orientation.allFinite()) fail_input("band: non-finite orientation");
  switch (kind) {
    case BandKind::electric:
      if (strength_e == 0.0) fail_input("band: electric band needs strength_e > 0");
      break;
    case BandKind::magnetic:
      if (strength_m == 0.0) fail_input("band: magnetic band needs strength_m > 0");
      break;
    case BandKind::cross:
      if (strength_e == 0.0 || strength_m == 0.0) {
        fail_input("band: cross band needs both strengths > 0");
      }
      break;
  }
}

Complex lorentz_closed_form(double f, double omega0, double gamma,
                            double omega) {
  if (gamma <= 0.0) {
    fail_input("lorentz_closed_form: gamma <= 0 (non-dissipative model)");
  }
  if (f < 0.0 || omega0 <= 0.0) {
    fail_input("lorentz_closed_form: require f >= 0 and omega0 > 0");
  }
  const Complex den(omega0 * omega0 - omega * omega, -gamma * omega);
  return f * omega0 * omega0 / den;
}

Complex lorentz_unit(double omega0, double gamma, Complex z) {
  return omega0 * omega0 / (omega0 * omega0 - z * z - kI * gamma * z);
}

MediumModel::MediumModel(std::vector<Region> regions, OmegaGrid quad_grid,
                         Corruption corruption)
    : regions_(std::move(regions)),
      quad_grid_(quad_grid),
      corruption_(corruption) {
  for (const auto& reg : regions_) {
    for (const auto& band : reg.bands) band.validate();
  }
}

const Region& MediumModel::region(int r) const {
  if (r < 0 || r >= region_count()) {
    fail_input("medium: region index " + std::to_string(r) + " out of range");
  }
  return regions_[static_cast<size_t>(r)];
}

std::vector<CouplingSample> MediumModel::couplings(int r, double omega) const {
  if (!(omega > 0.0)) fail_input("couplings: defined for omega > 0 only");
  const Region& reg = region(r);
  std::vector<CouplingSample> out;
  out.reserve(reg.bands.size());
  for (const auto& b : reg.bands) {
    CouplingSample s;
    if (b.kind != BandKind::magnetic) {
      const double im = b.strength_e * im_chi_unit(b.omega0, b.gamma, omega);
      s.Le = std::sqrt(2.0 * std::max(0.0, im)) * b.orientation;
    }
    if (b.kind != BandKind::electric) {
      const double im = b.strength_m * im_chi_unit(b.omega0, b.gamma, omega);
      s.Lm = Complex(0.0, b.sign * std::sqrt(2.0 * std::max(0.0, im))) *
             b.orientation;
    }
    out.push_back(std::move(s));
  }
  return out;
}

BlockResponse MediumModel::gamma_A_positive(int r, double omega) const {
  const Region& reg = region(r);
  BlockResponse out = BlockResponse::zero(omega, r);
  for (const auto& b : reg.bands) {
    const Matrix3r oo = outer(b.orientation);
    const double imu = im_chi_unit(b.omega0, b.gamma, omega);
    if (b.kind != BandKind::magnetic) {
      out.ee += kI * (b.strength_e * imu) * oo;
    }
    if (b.kind != BandKind::electric) {
      out.mm += kI * (b.strength_m * imu) * oo;
    }
    if (b.kind == BandKind::cross) {
      const double cross =
          b.sign * std::sqrt(b.strength_e * b.strength_m) * imu;
      out.em += cross * oo;
      out.me -= cross * oo;
    }
  }
  if (corruption_ == Corruption::flip_me_sign) out.me = -out.me;
  return out;
}

double MediumModel::cross_eta(const Band& b, double omega) const {
  // eta(w) = (1/pi) [ PV int Im chi_u/(v - w) dv - int Im chi_u/(v + w) dv ]
  // on a grid extended well past the working span (the integrand is known
  // analytically, so the extension is exact sampling, not extrapolation).
  OmegaGrid ext = quad_grid_;
  ext.omega_min = quad_grid_.omega_min / 1000.0;
  ext.omega_max = quad_grid_.omega_max * 8.0;
  const double decades_before =
      std::log10(quad_grid_.omega_max / quad_grid_.omega_min);
  const double decades_after = decades_before + 3.0 + std::log10(8.0);
  ext.count = static_cast<int>(quad_grid_.count * decades_after / decades_before);

  const std::vector<double> x = ext.values();
  std::vector<Complex> pole_part(x.size());
  std::vector<Complex> smooth_part(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double im = im_chi_unit(b.omega0, b.gamma, x[i]);
    pole_part[i] = im;
    smooth_part[i] = im / (x[i] + omega);
  }
  const Complex pv = pv_integral(x, pole_part, omega);
  const Complex reg = integrate_nonuniform(x, smooth_part);
  const double X = x.back();
  const double c2 = im_chi_unit(b.omega0, b.gamma, X) * X * X;
  const double tail =
      c2 * (tail_integral_minus(X, omega) - tail_integral_plus(X, omega));
  return (pv.real() - reg.real() + tail) / kPi;
}

BlockResponse MediumModel::gamma_H_positive(int r, double omega) const {
  const Region& reg = region(r);
  if (reg.hermitian_from_quadrature) {
    QuadratureSpec spec{quad_grid_, 1e-3};
    BlockResponse h = gamma_H_from_couplings(r, omega, spec);
    if (corruption_ == Corruption::flip_me_sign) h.me = -h.me;
    return h;
  }
  BlockResponse out = BlockResponse::zero(omega, r);
  for (const auto& b : reg.bands) {
    const Matrix3r oo = outer(b.orientation);
    const double re_u = lorentz_unit(b.omega0, b.gamma, Complex(omega, 0)).real();
    if (b.kind != BandKind::magnetic) out.ee += (b.strength_e * re_u) * oo;
    if (b.kind != BandKind::electric) out.mm += (b.strength_m * re_u) * oo;
    if (b.kind == BandKind::cross) {
      const Complex cross = -kI * (b.sign *
                            std::sqrt(b.strength_e * b.strength_m) *
                            cross_eta(b, omega));
      out.em += cross * oo;
      out.me -= cross * oo;
    }
  }
  if (corruption_ == Corruption::flip_me_sign) out.me = -out.me;
  return out;
}

BlockResponse MediumModel::gamma_A(int r, double omega) const {
  if (omega == 0.0) return BlockResponse::zero(0.0, r);
  if (omega > 0.0) return gamma_A_positive(r, omega);
  BlockResponse out = gamma_A_positive(r, -omega).conjugate();
  out.omega = omega;
  return out;
}

BlockResponse MediumModel::gamma_H(int r, double omega) const {
  if (omega == 0.0) {
    // Static limit: real diagonal closed forms, vanishing cross block.
    const Region& reg = region(r);
    BlockResponse out = BlockResponse::zero(0.0, r);
    for (const auto& b : reg.bands) {
      const Matrix3r oo = outer(b.orientation);
      if (b.kind != BandKind::magnetic) out.ee += b.strength_e * oo;
      if (b.kind != BandKind::electric) out.mm += b.strength_m * oo;
    }
    return out;
  }
  if (omega > 0.0) return gamma_H_positive(r, omega);
  BlockResponse out = gamma_H_positive(r, -omega).conjugate();
  out.omega = omega;
  return out;
}

BlockResponse MediumModel::gamma(int r, double omega) const {
  BlockResponse g = gamma_H(r, omega) + gamma_A(r, omega);
  g.omega = omega;
  g.region = r;
  return g;
}

Matrix6c MediumModel::gamma_at_complex(int r, Complex z) const {
  if (!(z.real() > 0.0)) {
    fail_input("gamma_at_complex: requires Re z > 0");
  }
  const Region& reg = region(r);
  BlockResponse out = BlockResponse::zero(z.real(), r);
  for (const auto& b : reg.bands) {
    const Matrix3r oo = outer(b.orientation);
    const Complex chi_u = lorentz_unit(b.omega0, b.gamma, z);
    if (b.kind != BandKind::magnetic) out.ee += (b.strength_e * chi_u) * oo;
    if (b.kind != BandKind::electric) out.mm += (b.strength_m * chi_u) * oo;
    if (b.kind == BandKind::cross) {
      const Complex g = cross_scalar_complex(b, z);
      const Complex cross = b.sign * std::sqrt(b.strength_e * b.strength_m) * g;
      out.em += cross * oo;
      out.me -= cross * oo;
    }
  }
  if (corruption_ == Corruption::flip_me_sign) out.me = -out.me;
  return out.as_matrix();
}

Complex MediumModel::cross_scalar_complex(const Band& b, Complex z) const {
  const double tiny = 1e-12 * (std::abs(z) + 1.0);
  if (std::abs(z.imag()) <= tiny) {
    const double w = z.real();
    return Complex(im_chi_unit(b.omega0, b.gamma, w), -cross_eta(b, w));
  }
  // Spectral form, valid off the real axis:
  //   G(z) = -(2iz/pi) int_0^inf Im chi_u(v) / (v^2 - z^2) dv.
  OmegaGrid ext = quad_grid_;
  ext.omega_min = quad_grid_.omega_min / 1000.0;
  ext.omega_max = quad_grid_.omega_max * 8.0;
  ext.count = quad_grid_.count * 2;
  const std::vector<double> x = ext.values();
  std::vector<Complex> f(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double im = im_chi_unit(b.omega0, b.gamma, x[i]);
    f[i] = im / (x[i] * x[i] - z * z);
  }
  Complex g = -(2.0 * kI * z / kPi) * integrate_nonuniform(x, f);
  if (z.imag() < 0.0) {
    // Causal continuation through the real axis picks up the discontinuity
    // of the spectral form: the analytic extension of Im chi_u.
    const Complex chi = lorentz_unit(b.omega0, b.gamma, z);
    const Complex chi_anti =
        b.omega0 * b.omega0 /
        (b.omega0 * b.omega0 - z * z + kI * b.gamma * z);
    g += -kI * (chi - chi_anti);
  }
  return g;
}

BlockResponse MediumModel::gamma_A_from_couplings(int r, double omega) const {
  if (omega == 0.0) fail_input("gamma_A_from_couplings: omega must be nonzero");
  const double aw = std::abs(omega);
  const auto ls = couplings(r, aw);
  BlockResponse out = BlockResponse::zero(omega, r);
  for (const auto& l : ls) {
    out.ee += 0.5 * kI * (l.Le * l.Le.adjoint());
    out.em += 0.5 * kI * (l.Le * l.Lm.adjoint());
    out.me += 0.5 * kI * (l.Lm * l.Le.adjoint());
    out.mm += 0.5 * kI * (l.Lm * l.Lm.adjoint());
  }
  if (omega < 0.0) {
    // Reality condition G(-w) = G(w)^*; for purely real coupling products
    // this coincides with the odd sign rule.
    out = out.conjugate();
    out.omega = omega;
  }
  return out;
}

BlockResponse MediumModel::gamma_H_from_couplings(
    int r, double omega, const QuadratureSpec& spec) const {
  if (omega < 0.0) {
    BlockResponse h = gamma_H_from_couplings(r, -omega, spec);
    h = h.conjugate();
    h.omega = omega;
    return h;
  }
  // H^{sn}(w) = PV int_0^inf (dv/2pi) [2v Re K(v) + 2iw Im K(v)]/(v^2-w^2)
  //   with K(v) = sum_l L_s(v) L_n(v)^H.  Partial fractions split the pole:
  //   1/(v^2-w^2) = (1/2w)[1/(v-w) - 1/(v+w)].
  OmegaGrid ext = quad_grid_;
  ext.omega_min = quad_grid_.omega_min / 1000.0;
  ext.omega_max = quad_grid_.omega_max * 8.0;
  {
    const double d0 = std::log10(quad_grid_.omega_max / quad_grid_.omega_min);
    const double d1 = d0 + 3.0 + std::log10(8.0);
    ext.count = static_cast<int>(quad_grid_.count * d1 / d0);
  }
  const std::vector<double> x = ext.values();

  std::vector<Matrix6c> kk(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    BlockResponse a = gamma_A_from_couplings(r, x[i]);
    // Recover K = -2i * Gamma_A at positive frequency.
    kk[i] = -2.0 * kI * a.as_matrix();
  }

  Matrix6c result = Matrix6c::Zero();
  double tail_ratio = 0.0;
  std::vector<Complex> pole_f(x.size());
  std::vector<Complex> reg_f(x.size());
  for (int a = 0; a < 6; ++a) {
    for (int c = 0; c < 6; ++c) {
      for (size_t i = 0; i < x.size(); ++i) {
        const Complex k = kk[i](a, c);
        const Complex kt = kk[i](c, a);  // K^H entry: conj(kt)
        const Complex re_k = 0.5 * (k + std::conj(kt));
        const Complex im_k = (k - std::conj(kt)) / (2.0 * kI);
        const Complex g =
            (2.0 * x[i] * re_k + 2.0 * kI * omega * im_k) / (2.0 * kPi);
        pole_f[i] = g / (2.0 * omega);
        reg_f[i] = g / ((2.0 * omega) * (x[i] + omega));
      }
      const Complex pv = pv_integral(x, pole_f, omega);
      const Complex reg = integrate_nonuniform(x, reg_f);
      const double X = x.back();
      const Complex c2 = pole_f.back() * X * X;
      const Complex tail =
          c2 * (tail_integral_minus(X, omega) - tail_integral_plus(X, omega));
      const Complex entry = pv - reg + tail;
      result(a, c) = entry;
      const double denom = std::abs(entry) + 1e-300;
      tail_ratio = std::max(tail_ratio, std::abs(tail) / denom);
    }
  }
  // Only meaningful when the result itself is non-negligible.
  if (tail_ratio > spec.tail_budget && result.norm() > 1e-10) {
    fail_numerical(
        "gamma_H_from_couplings: tail estimate exceeds budget (ratio " +
        std::to_string(tail_ratio) + "); extend the quadrature grid");
  }
  return BlockResponse::from_matrix(result, omega, r);
}

double MediumModel::response_time(int r) const {
  const Region& reg = region(r);
  double t = 0.0;
  for (const auto& b : reg.bands) {
    // envelope exp(-gamma t / 2) below 1e-8 of peak
    t = std::max(t, 2.0 * std::log(1e8) / b.gamma);
  }
  return t;
}

MediumModel MediumModel::time_reversed() const { return *this; }

// --- Filon quadrature --------------------------------------------------------

namespace {

struct FilonMoments {
  Complex m0, m1, m2;
};

FilonMoments filon_moments(double theta) {
  FilonMoments m;
  if (std::abs(theta) < 0.2) {
    const double t2 = theta * theta;
    m.m0 = 2.0 * (1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0);
    m.m1 = 2.0 * kI * theta *
           (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0 - t2 * t2 * t2 / 45360.0);
    m.m2 = 2.0 * (1.0 / 3.0 - t2 / 10.0 + t2 * t2 / 168.0 -
                  t2 * t2 * t2 / 6480.0);
  } else {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    m.m0 = 2.0 * s / theta;
    m.m1 = 2.0 * kI * (s - theta * c) / (theta * theta);
    m.m2 = 2.0 * ((theta * theta - 2.0) * s + 2.0 * theta * c) /
           (theta * theta * theta);
  }
  return m;
}

}  // namespace

Complex filon_integral_uniform(double a, double h,
                               const std::vector<double>& f, double t) {
  const size_t n = f.size();
  if (n < 2) fail_input("filon_integral_uniform: need at least 2 samples");
  Complex total = 0.0;
  const double theta = t * h;
  const FilonMoments m = filon_moments(theta);
  size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double xc = a + (static_cast<double>(i) + 1.0) * h;
    const Complex phase = std::exp(kI * (t * xc));
    const Complex w0 = 0.5 * (m.m2 - m.m1);
    const Complex w1 = m.m0 - m.m2;
    const Complex w2 = 0.5 * (m.m2 + m.m1);
    total += h * phase * (w0 * f[i] + w1 * f[i + 1] + w2 * f[i + 2]);
  }
  if (i + 1 < n) {  // leftover panel, linear Filon with half step
    const double hh = 0.5 * h;
    const double xm = a + (static_cast<double>(i)) * h + hh;
    const FilonMoments ml = filon_moments(t * hh);
    const Complex phase = std::exp(kI * (t * xm));
    total += hh * phase *
             (0.5 * (ml.m0 - ml.m1) * f[i] + 0.5 * (ml.m0 + ml.m1) * f[i + 1]);
  }
  return total;
}

Eigen::Matrix<double, 6, 6> TimeKernel::at(int k) const {
  const int rel = k - (half_count - 1);
  if (rel < 0) return Eigen::Matrix<double, 6, 6>::Zero();
  return causal[static_cast<size_t>(rel)];
}

TimeKernel time_kernel(const MediumModel& model, int r,
                       const KernelSpec& spec) {
  const Region& reg = model.region(r);
  TimeKernel kernel;
  kernel.dt = spec.dt;
  kernel.response_time = model.response_time(r);
  const double t_max = spec.t_max > 0.0 ? spec.t_max : kernel.response_time;
  kernel.half_count = std::max(2, static_cast<int>(std::ceil(t_max / spec.dt)) + 1);
  kernel.causal.assign(static_cast<size_t>(kernel.half_count),
                       Eigen::Matrix<double, 6, 6>::Zero());
  if (reg.bands.empty()) return kernel;

  // Uniform quadrature grid resolving every linewidth; the span is pushed
  // out until the truncated w^-3 lineshape tail is below tail_tol of the
  // kernel peak scale (~ f w0 per band).
  double dw = std::numeric_limits<double>::max();
  double span = 0.0;
  for (const auto& b : reg.bands) {
    dw = std::min(dw, b.gamma / spec.resolution);
    const double by_factor = spec.span_factor * b.omega0 + 40.0 * b.gamma;
    const double by_tail =
        std::sqrt(b.gamma * b.omega0 / (kPi * spec.tail_tol));
    span = std::max(span, std::max(by_factor, by_tail));
  }
  const int n_w = static_cast<int>(std::ceil(span / dw)) | 1;  // odd count
  const double h = span / (n_w - 1);

  // Aliasing check: spectral weight above the t-grid Nyquist frequency,
  // relative to the total weight, using the asymptotic w^-3 tail of the
  // lineshape beyond the quadrature span.
  const double nyquist = kPi / spec.dt;
  double weight_total = 0.0;
  double weight_alias = 0.0;
  for (const auto& b : reg.bands) {
    const double f = std::max(b.strength_e, b.strength_m);
    const double total = f * (kPi / 2.0) * b.omega0;  // int_0^inf Im chi
    weight_total += total;
    const double from = std::max(nyquist, 2.0 * b.omega0);
    weight_alias += f * b.gamma * b.omega0 * b.omega0 / (2.0 * from * from);
    if (nyquist < 2.0 * b.omega0) weight_alias += total;  // oscillation unresolved
  }
  kernel.aliasing_estimate = weight_alias / std::max(weight_total, 1e-300);
  if (kernel.aliasing_estimate > spec.aliasing_tol) {
    fail_numerical("time_kernel: t-grid too coarse for the band content "
                   "(aliasing estimate " +
                   std::to_string(kernel.aliasing_estimate) + ")");
  }

  for (const auto& b : reg.bands) {
    const Matrix3r oo = outer(b.orientation);
    std::vector<double> im_u(static_cast<size_t>(n_w));
    for (int i = 0; i < n_w; ++i) {
      im_u[static_cast<size_t>(i)] = im_chi_unit(b.omega0, b.gamma, i * h);
    }
    const double cross_f = (b.kind == BandKind::cross)
                               ? b.sign * std::sqrt(b.strength_e * b.strength_m)
                               : 0.0;
    for (int k = 0; k < kernel.half_count; ++k) {
      const double t = k * spec.dt;
      // F(t) = int Im chi_u e^{i w t} dw: sine transform = Im, cosine = Re.
      const Complex F = filon_integral_uniform(0.0, h, im_u, t);
      auto& sample = kernel.causal[static_cast<size_t>(k)];
      const double sine_part = (2.0 / kPi) * F.imag();
      const double cos_part = (2.0 / kPi) * F.real();
      if (b.kind != BandKind::magnetic) {
        sample.block<3, 3>(0, 0) += b.strength_e * sine_part * oo;
      }
      if (b.kind != BandKind::electric) {
        sample.block<3, 3>(3, 3) += b.strength_m * sine_part * oo;
      }
      if (b.kind == BandKind::cross) {
        const double me_sign =
            (model.corruption() == Corruption::flip_me_sign) ? 1.0 : -1.0;
        sample.block<3, 3>(0, 3) += cross_f * cos_part * oo;
        sample.block<3, 3>(3, 0) += me_sign * cross_f * cos_part * oo;
      }
    }
  }
  // The causal gate: the t = 0 sample sits on the step; the distributional
  // half-weight is irrelevant here because the kernel vanishes at 0+ for
  // every band (sine transforms) and the cosine part carries measure-zero
  // weight in the convolution.
  return kernel;
}

namespace {

std::vector<double> simpson_weights(int n) {
  std::vector<double> w(static_cast<size_t>(n), 0.0);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  if (n == 2) {
    w[0] = w[1] = 0.5;
    return w;
  }
  const int odd_n = (n % 2 == 1) ? n : n - 1;
  w[0] = 1.0 / 3.0;
  for (int i = 1; i + 1 < odd_n; ++i) {
    w[static_cast<size_t>(i)] = (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
  }
  w[static_cast<size_t>(odd_n - 1)] = 1.0 / 3.0;
  if (odd_n != n) {  // trapezoid on the final panel
    w[static_cast<size_t>(n - 2)] += 0.5;
    w[static_cast<size_t>(n - 1)] += 0.5;
  }
  return w;
}

}  // namespace

ConstitutiveResult apply_constitutive(const TimeKernel& kernel,
                                      const TimeSeries3& D,
                                      const TimeSeries3& B) {
  if (D.samples.size() != B.samples.size() || D.dt != B.dt) {
    fail_input("apply_constitutive: D and B histories must share a grid");
  }
  if (std::abs(D.dt - kernel.dt) > 1e-12 * kernel.dt) {
    fail_input("apply_constitutive: history grid must match the kernel grid");
  }
  const int n = static_cast<int>(D.samples.size());
  const int k_len = kernel.half_count;
  if (n < k_len) {
    fail_numerical("apply_constitutive: history shorter than the kernel "
                   "support (needs " + std::to_string(k_len) + " samples)");
  }
  const std::vector<double> w = simpson_weights(k_len);

  ConstitutiveResult out;
  out.P.dt = out.M.dt = D.dt;
  out.P.samples.assign(static_cast<size_t>(n), Vector3r::Zero());
  out.M.samples.assign(static_cast<size_t>(n), Vector3r::Zero());
  out.valid_from = k_len - 1;

  for (int t = 0; t < n; ++t) {
    Vector3r p = Vector3r::Zero();
    Vector3r m = Vector3r::Zero();
    const int kmax = std::min(k_len, t + 1);
    for (int k = 0; k < kmax; ++k) {
      const auto& g = kernel.causal[static_cast<size_t>(k)];
      const Vector3r& d = D.samples[static_cast<size_t>(t - k)];
      const Vector3r& b = B.samples[static_cast<size_t>(t - k)];
      const double wk = w[static_cast<size_t>(k)] * kernel.dt;
      p += wk * (g.block<3, 3>(0, 0) * d + g.block<3, 3>(0, 3) * b);
      m += wk * (g.block<3, 3>(3, 0) * d + g.block<3, 3>(3, 3) * b);
    }
    out.P.samples[static_cast<size_t>(t)] = p;
    out.M.samples[static_cast<size_t>(t)] = m;
  }
  return out;
}

}  // namespace mepol
