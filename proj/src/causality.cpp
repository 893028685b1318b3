#include "mepol/causality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mepol/errors.hpp"

namespace mepol {

namespace {

// Extends entry samples f on nodes x by a fitted c / x^p decay above the
// grid and by the declared low-end behavior below it.  Returns new nodes
// and a lambda-free sample matrix (per 6x6 entry).
struct ExtendedSamples {
  std::vector<double> x;
  std::vector<Matrix6c> f;
};

ExtendedSamples extend_samples(const std::vector<double>& x,
                               const std::vector<Matrix6c>& f, LowEnd low) {
  const size_t n = x.size();
  const double lo = x.front();
  const double hi = x.back();

  // Log-spaced extension nodes: two decades down, one decade up.
  const int n_low = 96;
  const int n_high = 64;
  std::vector<double> xl(n_low), xh(n_high);
  for (int i = 0; i < n_low; ++i) {
    // strictly below the first node: lo * 1e-2 ... lo * 1e-2/n_low
    xl[static_cast<size_t>(i)] =
        lo * std::pow(1e-2, 1.0 - static_cast<double>(i) / n_low);
  }
  for (int i = 0; i < n_high; ++i) {
    xh[static_cast<size_t>(i)] =
        hi * std::pow(1e1, static_cast<double>(i + 1) / n_high);
  }

  // Per-entry high-end decay exponent from two nodes a decade apart.
  size_t ref = n - 1;
  while (ref > 0 && x[ref] > hi / 10.0) --ref;
  Eigen::Matrix<double, 6, 6> p;
  for (int a = 0; a < 6; ++a) {
    for (int c = 0; c < 6; ++c) {
      const double v1 = std::abs(f[ref](a, c));
      const double v2 = std::abs(f[n - 1](a, c));
      double expo = 2.0;
      if (v1 > 0.0 && v2 > 0.0) {
        expo = std::log(v1 / v2) / std::log(x[n - 1] / x[ref]);
        expo = std::clamp(expo, 1.0, 6.0);
      }
      p(a, c) = expo;
    }
  }

  ExtendedSamples out;
  out.x.reserve(n + n_low + n_high);
  out.f.reserve(n + n_low + n_high);
  for (int i = 0; i < n_low; ++i) {
    out.x.push_back(xl[static_cast<size_t>(i)]);
    if (low == LowEnd::vanishes) {
      // Dissipative parts vanish linearly at w = 0.
      out.f.push_back(f.front() * (xl[static_cast<size_t>(i)] / lo));
    } else {
      out.f.push_back(f.front());
    }
  }
  for (size_t i = 0; i < n; ++i) {
    out.x.push_back(x[i]);
    out.f.push_back(f[i]);
  }
  for (int i = 0; i < n_high; ++i) {
    const double xi = xh[static_cast<size_t>(i)];
    Matrix6c fi;
    for (int a = 0; a < 6; ++a) {
      for (int c = 0; c < 6; ++c) {
        fi(a, c) = f[n - 1](a, c) * std::pow(hi / xi, p(a, c));
      }
    }
    out.x.push_back(xi);
    out.f.push_back(fi);
  }
  return out;
}

// Shared fold: 2i int_0^inf (dw'/2pi) [ F(w')/(w-w') + F(w')^*/(w+w') ].
Matrix6c hilbert_fold(const std::vector<double>& omega,
                      const std::vector<Matrix6c>& samples, double w,
                      LowEnd low) {
  if (omega.size() != samples.size() || omega.size() < 8) {
    fail_input("hilbert transform: bad sample arrays");
  }
  if (!(w > 0.0)) fail_input("hilbert transform: evaluation needs w > 0");
  const ExtendedSamples ext = extend_samples(omega, samples, low);
  const size_t m = ext.x.size();

  Matrix6c result;
  std::vector<Complex> pole_f(m), reg_f(m);
  for (int a = 0; a < 6; ++a) {
    for (int c = 0; c < 6; ++c) {
      double entry_scale = 0.0;
      for (size_t i = 0; i < m; ++i) {
        entry_scale = std::max(entry_scale, std::abs(ext.f[i](a, c)));
      }
      if (entry_scale == 0.0) {
        result(a, c) = 0.0;
        continue;
      }
      for (size_t i = 0; i < m; ++i) {
        const Complex v = ext.f[i](a, c);
        pole_f[i] = v;
        reg_f[i] = std::conj(v) / (ext.x[i] + w);
      }
      // PV int F/(w - w') = -PV int F/(w' - w).
      const Complex pv = -pv_integral(ext.x, pole_f, w);
      const Complex reg = integrate_nonuniform(ext.x, reg_f);
      // Analytic stub for the [0, eps) strip when F(0) is a constant:
      // int_0^eps [F/(w-w') + F^*/(w+w')] dw'.
      Complex stub = 0.0;
      if (low == LowEnd::constant && w > ext.x.front()) {
        const double eps = ext.x.front();
        const Complex f0 = ext.f.front()(a, c);
        stub = f0 * std::log(w / (w - eps)) +
               std::conj(f0) * std::log((w + eps) / w);
      }
      result(a, c) = (2.0 * kI / (2.0 * kPi)) * (pv + reg + stub);
    }
  }
  return result;
}

std::vector<Matrix6c> to_matrices(const std::vector<BlockResponse>& v) {
  std::vector<Matrix6c> out;
  out.reserve(v.size());
  for (const auto& b : v) out.push_back(b.as_matrix());
  return out;
}

}  // namespace

BlockResponse hilbert_A_to_H(const std::vector<double>& omega,
                             const std::vector<BlockResponse>& gamma_a,
                             double w) {
  const Matrix6c h =
      hilbert_fold(omega, to_matrices(gamma_a), w, LowEnd::vanishes);
  return BlockResponse::from_matrix(h, w, gamma_a.front().region);
}

BlockResponse hilbert_H_to_A(const std::vector<double>& omega,
                             const std::vector<BlockResponse>& gamma_h,
                             double w) {
  const Matrix6c a =
      hilbert_fold(omega, to_matrices(gamma_h), w, LowEnd::constant);
  return BlockResponse::from_matrix(a, w, gamma_h.front().region);
}

ValidationReport kk_residual(const MediumModel& model, int region,
                             const std::vector<double>& omega,
                             double tolerance) {
  std::vector<BlockResponse> ga, gh;
  ga.reserve(omega.size());
  gh.reserve(omega.size());
  for (double w : omega) {
    ga.push_back(model.gamma_A(region, w));
    gh.push_back(model.gamma_H(region, w));
  }
  ValidationReport rep;
  rep.name = "kk_closure";
  rep.tolerance = tolerance;
  rep.omega = omega;
  rep.residual.resize(omega.size());
  for (size_t i = 0; i < omega.size(); ++i) {
    const BlockResponse rec = hilbert_A_to_H(omega, ga, omega[i]);
    const double scale = (gh[i] + ga[i]).norm();
    rep.residual[i] = (rec - gh[i]).norm() / std::max(scale, 1e-300);
    rep.max_residual = std::max(rep.max_residual, rep.residual[i]);
  }
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

namespace {

double onsager_pair_residual(const BlockResponse& rev, const BlockResponse& g) {
  const double scale = std::max(g.norm(), 1e-300);
  double r = 0.0;
  r = std::max(r, (rev.ee - g.ee.transpose().eval()).norm());
  r = std::max(r, (rev.mm - g.mm.transpose().eval()).norm());
  r = std::max(r, (rev.em + g.me.transpose().eval()).norm());
  r = std::max(r, (rev.me + g.em.transpose().eval()).norm());
  return r / scale;
}

}  // namespace

ValidationReport onsager_residual(const MediumModel& model, int region,
                                  const std::vector<double>& omega,
                                  double tolerance) {
  const MediumModel rev = model.time_reversed();
  ValidationReport rep;
  rep.name = "onsager";
  rep.tolerance = tolerance;
  rep.omega = omega;
  rep.residual.resize(omega.size());
  for (size_t i = 0; i < omega.size(); ++i) {
    rep.residual[i] = onsager_pair_residual(rev.gamma(region, omega[i]),
                                            model.gamma(region, omega[i]));
    rep.max_residual = std::max(rep.max_residual, rep.residual[i]);
  }
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

ValidationReport time_reversal_residual(const MediumModel& model, int region,
                                        const std::vector<double>& omega,
                                        double tolerance) {
  const MediumModel rev = model.time_reversed();
  ValidationReport rep;
  rep.name = "time_reversal_parts";
  rep.tolerance = tolerance;
  rep.omega = omega;
  rep.residual.resize(omega.size());
  for (size_t i = 0; i < omega.size(); ++i) {
    const double ra = onsager_pair_residual(rev.gamma_A(region, omega[i]),
                                            model.gamma_A(region, omega[i]));
    const double rh = onsager_pair_residual(rev.gamma_H(region, omega[i]),
                                            model.gamma_H(region, omega[i]));
    rep.residual[i] = std::max(ra, rh);
    rep.max_residual = std::max(rep.max_residual, rep.residual[i]);
  }
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

ValidationReport causality_residual(const MediumModel& model, int region,
                                    double tolerance) {
  // Rebuild the kernel with no causal gate from the full response: a
  // Hilbert-consistent response must make it vanish for t < 0.
  const Region& reg = model.region(region);
  ValidationReport rep;
  rep.name = "causality";
  rep.tolerance = tolerance;
  if (reg.bands.empty()) {
    rep.pass = true;
    return rep;
  }
  double gamma_min = std::numeric_limits<double>::max();
  double omega_ref = 0.0;
  for (const auto& b : reg.bands) {
    gamma_min = std::min(gamma_min, b.gamma);
    omega_ref = std::max(omega_ref, b.omega0);
  }
  // Dense uniform grid over the absorptive support; Filon in time.
  const double span = 12.0 * omega_ref + 40.0 * gamma_min;
  const int n_w = (static_cast<int>(span / (gamma_min / 60.0)) | 1);
  const double h = span / (n_w - 1);
  std::vector<std::vector<double>> re_entries(36), im_entries(36);
  for (auto& v : re_entries) v.resize(static_cast<size_t>(n_w));
  for (auto& v : im_entries) v.resize(static_cast<size_t>(n_w));
  for (int i = 0; i < n_w; ++i) {
    const double w = std::max(i * h, 1e-9 * h);
    const Matrix6c g = model.gamma(region, w).as_matrix();
    for (int a = 0; a < 6; ++a) {
      for (int c = 0; c < 6; ++c) {
        re_entries[static_cast<size_t>(a * 6 + c)][static_cast<size_t>(i)] =
            g(a, c).real();
        im_entries[static_cast<size_t>(a * 6 + c)][static_cast<size_t>(i)] =
            g(a, c).imag();
      }
    }
  }
  const double t_span = model.response_time(region);
  const int n_t = 240;
  double peak = 0.0, acausal = 0.0;
  std::vector<double> ts, rs;
  for (int k = -n_t; k <= n_t; ++k) {
    const double t = t_span * k / n_t;
    // G(t) = int_0^inf (dw/pi) Re{ e^{-iwt} G(w) }
    //      = int (dw/pi) [ Re G cos(wt) + Im G sin(wt) ].
    double norm2 = 0.0;
    for (int e = 0; e < 36; ++e) {
      const Complex fre = filon_integral_uniform(
          0.0, h, re_entries[static_cast<size_t>(e)], -t);
      const Complex fim = filon_integral_uniform(
          0.0, h, im_entries[static_cast<size_t>(e)], -t);
      const double val = (fre.real() - fim.imag()) / kPi;
      norm2 += val * val;
    }
    const double norm = std::sqrt(norm2);
    peak = std::max(peak, norm);
    if (t < -1e-12) {
      acausal = std::max(acausal, norm);
      ts.push_back(t);
      rs.push_back(norm);
    }
  }
  rep.omega = std::move(ts);  // trace abscissa is time here
  for (double& v : rs) v /= std::max(peak, 1e-300);
  rep.residual = std::move(rs);
  rep.max_residual = acausal / std::max(peak, 1e-300);
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

double dissipated_energy(const MediumModel& model,
                         const std::vector<double>& omega,
                         const std::vector<SpectralSite>& sites,
                         double reality_tol) {
  return dissipated_energy_from(
      [&model](int region, double w) {
        return model.gamma_A(region, w).as_matrix();
      },
      omega, sites, reality_tol);
}

double dissipated_energy_from(
    const std::function<Matrix6c(int region, double omega)>& gamma_a,
    const std::vector<double>& omega, const std::vector<SpectralSite>& sites,
    double reality_tol) {
  for (const auto& s : sites) {
    if (s.D.size() != omega.size() || s.B.size() != omega.size()) {
      fail_input("dissipated_energy: spectra must be sampled on the grid");
    }
  }
  std::vector<Complex> integrand(omega.size(), Complex(0, 0));
  for (size_t i = 0; i < omega.size(); ++i) {
    Complex q = 0.0;
    for (const auto& s : sites) {
      const Matrix6c ma = gamma_a(s.region, omega[i]);
      Vector6c x;
      x.head<3>() = s.D[i];
      x.tail<3>() = s.B[i];
      q += s.volume * (x.adjoint() * ma * x)(0, 0);
    }
    integrand[i] = 2.0 * (-kI * omega[i]) * q / (2.0 * kPi);
  }
  const Complex total = integrate_nonuniform(omega, integrand);
  const double scale = std::max(std::abs(total), 1e-300);
  if (std::abs(total.imag()) > reality_tol * scale &&
      std::abs(total.imag()) > 1e-14) {
    fail_input("dissipated_energy: non-real result (imaginary fraction " +
               std::to_string(std::abs(total.imag()) / scale) +
               "); spectra violate the reality condition");
  }
  return total.real();
}

}  // namespace mepol
