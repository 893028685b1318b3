#include "mepol/mode_solver.hpp"

#include <algorithm>
#include <cmath>

#include "mepol/errors.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace mepol {

namespace {

Matrix6c mh_prime_of(const BlockResponse& h) {
  Matrix6c m;
  m.block<3, 3>(0, 0) = Matrix3c::Identity() - h.ee;
  m.block<3, 3>(0, 3) = -h.em;
  m.block<3, 3>(3, 0) = -Matrix3c(h.em.adjoint());
  m.block<3, 3>(3, 3) = Matrix3c::Identity() - h.mm;
  return m;
}

Matrix6c ma_prime_of(const BlockResponse& a) {
  Matrix6c m;
  m.block<3, 3>(0, 0) = a.ee;
  m.block<3, 3>(0, 3) = a.em;
  m.block<3, 3>(3, 0) = -Matrix3c(a.em.adjoint());
  m.block<3, 3>(3, 3) = a.mm;
  return m;
}

}  // namespace

Assembly::Assembly(const MediumModel& model, const MediumMap& map,
                   const SpectralGrid& grid, double omega, UnitSystem units)
    : model_(&model), map_(&map), grid_(&grid), omega_(omega), units_(units) {
  if (static_cast<int>(map.region_of_cell.size()) != grid.cell_count()) {
    fail_input("Assembly: medium map does not cover the grid");
  }
  nx_ = grid.spec().points[0];
  ny_ = grid.spec().points[1];
  nz_ = grid.spec().points[2];

  mh_.resize(static_cast<size_t>(model.region_count()));
  ma_.resize(static_cast<size_t>(model.region_count()));
  for (int r = 0; r < model.region_count(); ++r) {
    const SplitResponse parts = split_block(model.gamma(r, omega));
    mh_[static_cast<size_t>(r)] = mh_prime_of(parts.hermitian_part);
    ma_[static_cast<size_t>(r)] = ma_prime_of(parts.dissipative_part);
  }

  // Region indicator transforms over the difference lattice (periodic):
  // I_r(q) = (1/N) sum_{c in r} e^{-i q . r_c}, q indexed modulo N.
  const int n_cells = grid.cell_count();
  indicator_.assign(static_cast<size_t>(model.region_count()),
                    std::vector<Complex>(static_cast<size_t>(n_cells),
                                         Complex(0, 0)));
  for (int c = 0; c < n_cells; ++c) {
    const int r = map.region_at(c);
    if (r >= model.region_count()) {
      fail_input("Assembly: map references region " + std::to_string(r) +
                 " outside the model");
    }
    const Vector3r pos = grid.cell_position(c);
    for (int qz = 0; qz < nz_; ++qz) {
      for (int qy = 0; qy < ny_; ++qy) {
        for (int qx = 0; qx < nx_; ++qx) {
          const double arg = 2.0 * kPi * (static_cast<double>(qx) * pos(0) / grid.spec().box[0] +
                                          static_cast<double>(qy) * pos(1) / grid.spec().box[1] +
                                          static_cast<double>(qz) * pos(2) / grid.spec().box[2]);
          const int qi = qx + nx_ * (qy + ny_ * qz);
          indicator_[static_cast<size_t>(r)][static_cast<size_t>(qi)] +=
              Complex(std::cos(arg), -std::sin(arg)) /
              static_cast<double>(n_cells);
        }
      }
    }
  }
}

Complex Assembly::indicator(int r, const std::array<int, 3>& diff) const {
  auto wrap = [](int m, int n) { return ((m % n) + n) % n; };
  const int qx = wrap(diff[0], nx_);
  const int qy = wrap(diff[1], ny_);
  const int qz = wrap(diff[2], nz_);
  return indicator_[static_cast<size_t>(r)]
                   [static_cast<size_t>(qx + nx_ * (qy + ny_ * qz))];
}

int Assembly::index(int field, int ik, int pol) const {
  return field * 2 * grid_->k_count() + 2 * ik + pol;
}

std::vector<Vector3c> Assembly::cells_from_coeffs(const VectorXc& coeffs,
                                                  int field) const {
  const int nk = grid_->k_count();
  std::vector<Vector3c> cells(static_cast<size_t>(grid_->cell_count()),
                              Vector3c::Zero());
  for (int ik = 0; ik < nk; ++ik) {
    const Vector3c amp =
        coeffs(index(field, ik, 0)) * grid_->pol1(ik).cast<Complex>() +
        coeffs(index(field, ik, 1)) * grid_->pol2(ik).cast<Complex>();
    for (int c = 0; c < grid_->cell_count(); ++c) {
      cells[static_cast<size_t>(c)] += amp * grid_->phase(ik, c);
    }
  }
  return cells;
}

OperatorPair assemble(const Assembly& ctx) {
  const SpectralGrid& grid = *ctx.grid_;
  const int nk = grid.k_count();
  const int dim = ctx.dim();
  OperatorPair pair;
  pair.omega = ctx.omega_;
  pair.dim = dim;
  pair.A = MatrixXc::Zero(dim, dim);
  pair.B = MatrixXc::Zero(dim, dim);

  const int n_regions = ctx.model_->region_count();
  const double w_over_c = ctx.omega_ / ctx.units_.c;

  for (int ko = 0; ko < nk; ++ko) {
    const Vector3r kv = grid.k_vector(ko);
    const auto& to = grid.k_triple(ko);
    for (int ki = 0; ki < nk; ++ki) {
      const auto& ti = grid.k_triple(ki);
      const std::array<int, 3> diff = {to[0] - ti[0], to[1] - ti[1],
                                       to[2] - ti[2]};
      // Medium coupling between coefficient rows: sum over regions of the
      // block matrices weighted by the indicator transform.
      Matrix6c mh = Matrix6c::Zero();
      Matrix6c ma = Matrix6c::Zero();
      bool any = false;
      for (int r = 0; r < n_regions; ++r) {
        const Complex s = ctx.indicator(r, diff);
        if (std::abs(s) < 1e-300) continue;
        any = true;
        mh += s * ctx.mh_[static_cast<size_t>(r)];
        ma += s * ctx.ma_[static_cast<size_t>(r)];
      }
      if (!any && ko != ki) continue;

      for (int fi = 0; fi < 2; ++fi) {
        for (int pi = 0; pi < 2; ++pi) {
          const Vector3r pol_in =
              (pi == 0) ? grid.pol1(ki) : grid.pol2(ki);
          Vector6c x = Vector6c::Zero();
          if (fi == 0) {
            x.head<3>() = pol_in.cast<Complex>();
          } else {
            x.tail<3>() = pol_in.cast<Complex>();
          }
          const Vector6c yh = mh * x;
          const Vector6c ya = ma * x;
          const Vector3c yh_e = yh.head<3>(), yh_m = yh.tail<3>();
          const Vector3c ya_e = ya.head<3>(), ya_m = ya.tail<3>();
          // A: d-row  + k x (M_H' x)_m ; b-row  - k x (M_H' x)_e
          // B: d-row  -(i/pi) k x (M_A' x)_m ; b-row +(i/pi) k x (M_A' x)_e
          const Vector3c kx_yh_m = cross_rc(kv, yh_m);
          const Vector3c kx_yh_e = cross_rc(kv, yh_e);
          const Vector3c kx_ya_m = cross_rc(kv, ya_m);
          const Vector3c kx_ya_e = cross_rc(kv, ya_e);
          const int col = ctx.index(fi, ki, pi);
          for (int po = 0; po < 2; ++po) {
            const Vector3r pol_out =
                (po == 0) ? grid.pol1(ko) : grid.pol2(ko);
            const Vector3c pc = pol_out.cast<Complex>();
            pair.A(ctx.index(0, ko, po), col) += pc.dot(kx_yh_m);
            pair.A(ctx.index(1, ko, po), col) -= pc.dot(kx_yh_e);
            pair.B(ctx.index(0, ko, po), col) +=
                (-kI / kPi) * pc.dot(kx_ya_m);
            pair.B(ctx.index(1, ko, po), col) +=
                (kI / kPi) * pc.dot(kx_ya_e);
          }
        }
      }
    }
    for (int po = 0; po < 2; ++po) {
      pair.A(ctx.index(0, ko, po), ctx.index(0, ko, po)) += w_over_c;
      pair.A(ctx.index(1, ko, po), ctx.index(1, ko, po)) += w_over_c;
    }
  }
  return pair;
}

OperatorPair Assembly::operators() const { return assemble(*this); }

namespace {

// Phase-fix: largest-|.| d coefficient made real positive; returns the
// index of the overall largest coefficient for deterministic ordering.
int fix_mode_phase(VectorXc& v, int d_block_size) {
  int imax_d = 0;
  double best_d = -1.0;
  for (int i = 0; i < d_block_size; ++i) {
    if (std::abs(v(i)) > best_d) {
      best_d = std::abs(v(i));
      imax_d = i;
    }
  }
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      imax = i;
    }
  }
  const int ref = best_d > 0.0 ? imax_d : imax;
  if (std::abs(v(ref)) > 0.0) {
    v *= std::abs(v(ref)) / v(ref);
  }
  return imax;
}

}  // namespace

std::vector<ModeSolution> solve(const Assembly& ctx, const OperatorPair& pair,
                                const SolveFilter& filter, SolveStats* stats) {
  const int n = pair.dim;
  MatrixXc a = pair.A;
  MatrixXc b = pair.B;
  VectorXc alpha(n), beta(n);
  MatrixXc vr(n, n), vl(1, 1);
  const lapack_int info = LAPACKE_zggev(
      LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, b.data(), n, alpha.data(),
      beta.data(), vl.data(), 1, vr.data(), n);
  if (info != 0) {
    fail_numerical("solve: zggev failed (info " + std::to_string(info) +
                   "); pencil may be ill conditioned");
  }

  const double b_scale = pair.B.norm();
  const double a_scale = pair.A.norm();
  SolveStats local;
  struct Raw {
    Complex Z;
    VectorXc v;
    double residual;
    int fingerprint;
  };
  std::vector<Raw> raws;
  for (int j = 0; j < n; ++j) {
    const double ab = std::abs(alpha(j));
    const double bb = std::abs(beta(j));
    if (bb <= filter.beta_tol * std::max(b_scale, 1e-300)) {
      if (ab <= filter.beta_tol * std::max(a_scale, 1e-300)) {
        ++local.indeterminate;
      } else {
        ++local.infinite;
      }
      continue;
    }
    Raw r;
    r.Z = alpha(j) / beta(j);
    r.v = vr.col(j);
    const VectorXc av = pair.A * r.v;
    const VectorXc bv = pair.B * r.v;
    const double denom = av.norm() + std::abs(r.Z) * bv.norm();
    r.residual = (av - r.Z * bv).norm() / std::max(denom, 1e-300);
    if (r.residual > filter.residual_tol) {
      ++local.rejected_residual;
      continue;
    }
    r.fingerprint = fix_mode_phase(r.v, 2 * ctx.grid().k_count());
    ++local.finite;
    raws.push_back(std::move(r));
  }

  // Degenerate eigenvalue groups come back as arbitrary mixtures; when the
  // k-block projections of the group members are themselves eigenvectors
  // (block-diagonal pencils, parity pairs), re-span the group with k-pure
  // vectors so mode identities are deterministic and single modes carry a
  // single wavevector.
  {
    const int nk = ctx.grid().k_count();
    const double z_scale = 1.0 + pair.A.norm() / std::max(b_scale, 1e-300);
    std::sort(raws.begin(), raws.end(), [](const Raw& x, const Raw& y) {
      if (x.Z.real() != y.Z.real()) return x.Z.real() < y.Z.real();
      return x.Z.imag() < y.Z.imag();
    });
    size_t start = 0;
    while (start < raws.size()) {
      size_t end = start + 1;
      while (end < raws.size() &&
             std::abs(raws[end].Z - raws[start].Z) <= 1e-9 * z_scale) {
        ++end;
      }
      const size_t g = end - start;
      if (g > 1) {
        std::vector<VectorXc> pool;
        for (int ik = 0; ik < nk && pool.size() < g; ++ik) {
          for (size_t j = start; j < end && pool.size() < g; ++j) {
            VectorXc u = VectorXc::Zero(raws[j].v.size());
            for (int f = 0; f < 2; ++f) {
              for (int p = 0; p < 2; ++p) {
                const int idx = ctx.index(f, ik, p);
                u(idx) = raws[j].v(idx);
              }
            }
            if (u.norm() < 1e-8 * raws[j].v.norm()) continue;
            const VectorXc au = pair.A * u;
            const VectorXc bu = pair.B * u;
            const double res =
                (au - raws[start].Z * bu).norm() /
                std::max(au.norm() + std::abs(raws[start].Z) * bu.norm(),
                         1e-300);
            if (res > filter.residual_tol) continue;
            // Gram-Schmidt against the pool
            for (const auto& q : pool) u -= q.dot(u) * q;
            if (u.norm() < 1e-6) continue;
            u.normalize();
            pool.push_back(u);
          }
        }
        if (pool.size() == g) {
          for (size_t j = 0; j < g; ++j) {
            raws[start + j].v = pool[j];
            const VectorXc av = pair.A * raws[start + j].v;
            const VectorXc bv = pair.B * raws[start + j].v;
            raws[start + j].residual =
                (av - raws[start + j].Z * bv).norm() /
                std::max(av.norm() + std::abs(raws[start + j].Z) * bv.norm(),
                         1e-300);
            raws[start + j].fingerprint =
                fix_mode_phase(raws[start + j].v, 2 * nk);
          }
        }
      }
      start = end;
    }
  }

  std::sort(raws.begin(), raws.end(), [](const Raw& x, const Raw& y) {
    if (x.Z.real() != y.Z.real()) return x.Z.real() < y.Z.real();
    if (x.Z.imag() != y.Z.imag()) return x.Z.imag() < y.Z.imag();
    return x.fingerprint < y.fingerprint;
  });

  std::vector<ModeSolution> modes;
  modes.reserve(raws.size());
  for (size_t j = 0; j < raws.size(); ++j) {
    ModeSolution m;
    m.omega = pair.omega;
    m.Z = raws[j].Z;
    m.n = static_cast<int>(j);
    m.coeffs = std::move(raws[j].v);
    m.eigen_residual = raws[j].residual;
    m.D = ctx.cells_from_coeffs(m.coeffs, 0);
    m.B = ctx.cells_from_coeffs(m.coeffs, 1);
    modes.push_back(std::move(m));
  }
  if (stats) *stats = local;
  return modes;
}

namespace {

// -i int (D,B)^H M_A' (D,B) dV over the grid; real up to rounding.
double loss_quadratic_form(const ModeSolution& mode, const Assembly& ctx) {
  const SpectralGrid& grid = ctx.grid();
  Complex acc = 0.0;
  for (int c = 0; c < grid.cell_count(); ++c) {
    const int r = ctx.map().region_at(c);
    Vector6c x;
    x.head<3>() = mode.D[static_cast<size_t>(c)];
    x.tail<3>() = mode.B[static_cast<size_t>(c)];
    acc += (x.adjoint() * ctx.ma_prime(r) * x)(0, 0);
  }
  return (-kI * acc).real() * grid.cell_volume();
}

}  // namespace

void normalize(ModeSolution& mode, const Assembly& ctx) {
  const double q = loss_quadratic_form(mode, ctx);
  const double z2 = std::norm(mode.Z) / (kPi * kPi);
  const double target = 2.0 * ctx.units().hbar / (z2 + 1.0);
  if (!(q > 0.0) || q < 1e-250) {
    fail_numerical("normalize: loss quadratic form is not strictly positive "
                   "(mode decoupled from absorption); q = " +
                   std::to_string(q));
  }
  const double scale = std::sqrt(target / q);
  mode.coeffs *= scale;
  for (auto& v : mode.D) v *= scale;
  for (auto& v : mode.B) v *= scale;
  for (auto& v : mode.ET) v *= scale;
  for (auto& v : mode.HT) v *= scale;
  mode.normalized = true;
}

void derived_EH(ModeSolution& mode, const Assembly& ctx) {
  const SpectralGrid& grid = ctx.grid();
  const Complex zfac = mode.Z / (kI * kPi);
  mode.ET.assign(static_cast<size_t>(grid.cell_count()), Vector3c::Zero());
  mode.HT.assign(static_cast<size_t>(grid.cell_count()), Vector3c::Zero());
  for (int c = 0; c < grid.cell_count(); ++c) {
    const int r = ctx.map().region_at(c);
    Vector6c x;
    x.head<3>() = mode.D[static_cast<size_t>(c)];
    x.tail<3>() = mode.B[static_cast<size_t>(c)];
    const Vector6c eh = ctx.mh_prime(r) * x - zfac * (ctx.ma_prime(r) * x);
    mode.ET[static_cast<size_t>(c)] = eh.head<3>();
    mode.HT[static_cast<size_t>(c)] = eh.tail<3>();
  }
}

namespace {

// Spectral curl of per-cell values (k = 0 sheet dropped).
std::vector<Vector3c> spectral_curl(const std::vector<Vector3c>& cells,
                                    const SpectralGrid& grid) {
  std::vector<Vector3c> out(cells.size(), Vector3c::Zero());
  for (int ik = 0; ik < grid.k_count(); ++ik) {
    const Vector3c coef = grid.coefficient(cells, ik);
    const Vector3c curled =
        kI * cross_rc(grid.k_vector(ik), coef);
    for (int c = 0; c < grid.cell_count(); ++c) {
      out[static_cast<size_t>(c)] += curled * grid.phase(ik, c);
    }
  }
  return out;
}

double max_norm(const std::vector<Vector3c>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}

}  // namespace

double curl_consistency(const ModeSolution& mode, const Assembly& ctx) {
  if (mode.ET.empty()) {
    fail_input("curl_consistency: derived fields missing (call derived_EH)");
  }
  const SpectralGrid& grid = ctx.grid();
  const double c_light = ctx.units().c;
  const std::vector<Vector3c> curl_ht = spectral_curl(mode.HT, grid);
  const std::vector<Vector3c> curl_et = spectral_curl(mode.ET, grid);
  const Complex miw = -kI * mode.omega;
  double num = 0.0;
  for (int c = 0; c < grid.cell_count(); ++c) {
    const size_t i = static_cast<size_t>(c);
    num = std::max(num, (miw * mode.D[i] - c_light * curl_ht[i]).norm());
    num = std::max(num, (miw * mode.B[i] + c_light * curl_et[i]).norm());
  }
  const double den = mode.omega * std::max(max_norm(mode.D), max_norm(mode.B)) +
                     c_light * std::max(max_norm(curl_ht), max_norm(curl_et));
  return num / std::max(den, 1e-300);
}

double transversality(const ModeSolution& mode, const Assembly& ctx) {
  const SpectralGrid& grid = ctx.grid();
  double num = 0.0, den = 1e-300;
  for (int ik = 0; ik < grid.k_count(); ++ik) {
    const Vector3c dk = grid.coefficient(mode.D, ik);
    const Vector3c bk = grid.coefficient(mode.B, ik);
    const Vector3r khat = grid.k_vector(ik).normalized();
    num = std::max(num, std::abs(khat.cast<Complex>().dot(dk)));
    num = std::max(num, std::abs(khat.cast<Complex>().dot(bk)));
    den = std::max(den, std::max(dk.norm(), bk.norm()));
  }
  return num / den;
}

double classical_maxwell_residual(const std::vector<Vector3c>& D,
                                  const std::vector<Vector3c>& B, Complex z,
                                  const MediumModel& model,
                                  const MediumMap& map,
                                  const SpectralGrid& grid,
                                  UnitSystem units) {
  std::vector<Vector3c> e_cl(D.size()), h_cl(D.size());
  for (int c = 0; c < grid.cell_count(); ++c) {
    const size_t i = static_cast<size_t>(c);
    const Matrix6c g = model.gamma_at_complex(map.region_at(c), z);
    const Vector3c e = D[i] - g.block<3, 3>(0, 0) * D[i] -
                       g.block<3, 3>(0, 3) * B[i];
    const Vector3c h = B[i] - g.block<3, 3>(3, 0) * D[i] -
                       g.block<3, 3>(3, 3) * B[i];
    e_cl[i] = e;
    h_cl[i] = h;
  }
  const std::vector<Vector3c> curl_h = spectral_curl(h_cl, grid);
  const std::vector<Vector3c> curl_e = spectral_curl(e_cl, grid);
  double num = 0.0;
  const Complex miw = -kI * z;
  for (size_t i = 0; i < D.size(); ++i) {
    num = std::max(num, (miw * D[i] - units.c * curl_h[i]).norm());
    num = std::max(num, (miw * B[i] + units.c * curl_e[i]).norm());
  }
  const double den =
      std::abs(z) * std::max(max_norm(D), max_norm(B)) +
      units.c * std::max(max_norm(curl_h), max_norm(curl_e));
  return num / std::max(den, 1e-300);
}

void homogeneous_operators(const MediumModel& model, int region,
                           const Vector3r& k, double omega, UnitSystem units,
                           Eigen::Matrix<Complex, 4, 4>& A4,
                           Eigen::Matrix<Complex, 4, 4>& B4) {
  const SplitResponse parts = split_block(model.gamma(region, omega));
  const Matrix6c mh = mh_prime_of(parts.hermitian_part);
  const Matrix6c ma = ma_prime_of(parts.dissipative_part);

  // Transverse polarization pair (same convention as SpectralGrid).
  const Vector3r khat = k.normalized();
  int axis = 0;
  double best = std::abs(khat(0));
  for (int a = 1; a < 3; ++a) {
    if (std::abs(khat(a)) < best - 1e-14) {
      best = std::abs(khat(a));
      axis = a;
    }
  }
  Vector3r e = Vector3r::Zero();
  e(axis) = 1.0;
  const Vector3r p1 = e.cross(khat).normalized();
  const Vector3r p2 = khat.cross(p1);

  auto project = [&](const Matrix3c& m) {
    Eigen::Matrix<Complex, 2, 2> t;
    t(0, 0) = p1.cast<Complex>().dot(m * p1.cast<Complex>());
    t(0, 1) = p1.cast<Complex>().dot(m * p2.cast<Complex>());
    t(1, 0) = p2.cast<Complex>().dot(m * p1.cast<Complex>());
    t(1, 1) = p2.cast<Complex>().dot(m * p2.cast<Complex>());
    return t;
  };

  Eigen::Matrix<Complex, 4, 4> mh4, ma4;
  mh4.block<2, 2>(0, 0) = project(mh.block<3, 3>(0, 0));
  mh4.block<2, 2>(0, 2) = project(mh.block<3, 3>(0, 3));
  mh4.block<2, 2>(2, 0) = project(mh.block<3, 3>(3, 0));
  mh4.block<2, 2>(2, 2) = project(mh.block<3, 3>(3, 3));
  ma4.block<2, 2>(0, 0) = project(ma.block<3, 3>(0, 0));
  ma4.block<2, 2>(0, 2) = project(ma.block<3, 3>(0, 3));
  ma4.block<2, 2>(2, 0) = project(ma.block<3, 3>(3, 0));
  ma4.block<2, 2>(2, 2) = project(ma.block<3, 3>(3, 3));

  Eigen::Matrix<Complex, 2, 2> c2;
  c2 << 0.0, -kI * k.norm(), kI * k.norm(), 0.0;
  Eigen::Matrix<Complex, 4, 4> kc = Eigen::Matrix<Complex, 4, 4>::Zero();
  kc.block<2, 2>(0, 2) = -c2;
  kc.block<2, 2>(2, 0) = c2;

  A4 = kI * kc * mh4 +
       (omega / units.c) * Eigen::Matrix<Complex, 4, 4>::Identity();
  B4 = (1.0 / kPi) * kc * ma4;
}

std::vector<OracleMode> homogeneous_oracle(const MediumModel& model,
                                           int region, const Vector3r& k,
                                           double omega, UnitSystem units,
                                           const SolveFilter& filter) {
  Eigen::Matrix<Complex, 4, 4> a4, b4;
  homogeneous_operators(model, region, k, omega, units, a4, b4);
  Eigen::Matrix<Complex, 4, 4> a = a4, b = b4;
  Eigen::Matrix<Complex, 4, 1> alpha, beta;
  Eigen::Matrix<Complex, 4, 4> vr, vl;
  const lapack_int info = LAPACKE_zggev(
      LAPACK_COL_MAJOR, 'N', 'V', 4, a.data(), 4, b.data(), 4, alpha.data(),
      beta.data(), vl.data(), 4, vr.data(), 4);
  if (info != 0) {
    fail_numerical("homogeneous_oracle: zggev failed (info " +
                   std::to_string(info) + ")");
  }
  std::vector<OracleMode> out;
  const double b_scale = b4.norm();
  for (int j = 0; j < 4; ++j) {
    if (std::abs(beta(j)) <= filter.beta_tol * std::max(b_scale, 1e-300)) {
      continue;
    }
    OracleMode m;
    m.Z = alpha(j) / beta(j);
    m.amplitude = vr.col(j);
    const Eigen::Matrix<Complex, 4, 1> av = a4 * m.amplitude;
    const Eigen::Matrix<Complex, 4, 1> bv = b4 * m.amplitude;
    m.eigen_residual = (av - m.Z * bv).norm() /
                       std::max(av.norm() + std::abs(m.Z) * bv.norm(), 1e-300);
    // Phase: largest d amplitude real positive.
    int ref = 0;
    double bestamp = -1.0;
    for (int i = 0; i < 2; ++i) {
      if (std::abs(m.amplitude(i)) > bestamp) {
        bestamp = std::abs(m.amplitude(i));
        ref = i;
      }
    }
    if (bestamp <= 0.0) {
      for (int i = 0; i < 4; ++i) {
        if (std::abs(m.amplitude(i)) > bestamp) {
          bestamp = std::abs(m.amplitude(i));
          ref = i;
        }
      }
    }
    if (std::abs(m.amplitude(ref)) > 0.0) {
      m.amplitude *= std::abs(m.amplitude(ref)) / m.amplitude(ref);
    }
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const OracleMode& x, const OracleMode& y) {
    if (x.Z.real() != y.Z.real()) return x.Z.real() < y.Z.real();
    return x.Z.imag() < y.Z.imag();
  });
  return out;
}

InternalAmplitudes internal_amplitudes(const ModeSolution& mode,
                                       const Assembly& ctx,
                                       const std::vector<double>& omega_prime) {
  if (!mode.normalized) {
    fail_input("internal_amplitudes: mode must be normalized first");
  }
  const double w = mode.omega;
  for (double wp : omega_prime) {
    if (std::abs(wp - w) < 1e-9 * std::max(1.0, w)) {
      fail_input("internal_amplitudes: omega' grid contains the mode "
                 "frequency (pole collision); shift the grid");
    }
  }
  const SpectralGrid& grid = ctx.grid();
  const MediumModel& model = ctx.model();
  const double pref = 1.0 / std::sqrt(kPi * ctx.units().hbar);

  int n_channels = 0;
  for (int r = 0; r < model.region_count(); ++r) {
    n_channels = std::max(
        n_channels, static_cast<int>(model.region(r).bands.size()));
  }
  InternalAmplitudes out;
  out.omega_prime = omega_prime;
  out.a_pv.assign(static_cast<size_t>(n_channels), {});
  out.b.assign(static_cast<size_t>(n_channels), {});
  out.a_delta.assign(static_cast<size_t>(n_channels), {});
  for (int l = 0; l < n_channels; ++l) {
    out.a_pv[static_cast<size_t>(l)].assign(
        static_cast<size_t>(grid.cell_count()),
        std::vector<Vector3c>(omega_prime.size(), Vector3c::Zero()));
    out.b[static_cast<size_t>(l)] = out.a_pv[static_cast<size_t>(l)];
    out.a_delta[static_cast<size_t>(l)].assign(
        static_cast<size_t>(grid.cell_count()), Vector3c::Zero());
  }

  for (int c = 0; c < grid.cell_count(); ++c) {
    const int r = ctx.map().region_at(c);
    const size_t ci = static_cast<size_t>(c);
    const auto ls_at_w = model.couplings(r, w);
    for (size_t l = 0; l < ls_at_w.size(); ++l) {
      const Vector3c drive_delta =
          ls_at_w[l].Le.adjoint() * mode.D[ci] +
          ls_at_w[l].Lm.adjoint() * mode.B[ci];
      out.a_delta[l][ci] = mode.Z * pref * drive_delta;
    }
    for (size_t iw = 0; iw < omega_prime.size(); ++iw) {
      const auto ls = model.couplings(r, omega_prime[iw]);
      for (size_t l = 0; l < ls.size(); ++l) {
        const Vector3c drive_conj =
            ls[l].Le.adjoint() * mode.D[ci] + ls[l].Lm.adjoint() * mode.B[ci];
        const Vector3c drive_plain =
            ls[l].Le.transpose() * mode.D[ci] +
            ls[l].Lm.transpose() * mode.B[ci];
        out.a_pv[l][ci][iw] =
            pref / (omega_prime[iw] - w) * drive_conj;
        out.b[l][ci][iw] = pref / (omega_prime[iw] + w) * drive_plain;
      }
    }
  }
  return out;
}

}  // namespace mepol
