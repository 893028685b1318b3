#include "mepol/field_assembly.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mepol/errors.hpp"

namespace mepol {

NoiseSpectra noise_spectra_TP(const std::vector<ModeSolution>& modes,
                              const Assembly& ctx) {
  NoiseSpectra out;
  out.omega = ctx.omega();
  const SpectralGrid& grid = ctx.grid();
  for (const auto& mode : modes) {
    if (!mode.normalized) {
      fail_input("noise_spectra_TP: modes must be normalized");
    }
    std::vector<Vector3c> p(static_cast<size_t>(grid.cell_count()));
    std::vector<Vector3c> m(static_cast<size_t>(grid.cell_count()));
    const Complex factor = mode.Z / (kI * kPi) - 1.0;
    for (int c = 0; c < grid.cell_count(); ++c) {
      const size_t ci = static_cast<size_t>(c);
      const Matrix6c& ma = ctx.ma_prime(ctx.map().region_at(c));
      Vector6c x;
      x.head<3>() = mode.D[ci];
      x.tail<3>() = mode.B[ci];
      const Vector6c y = ma * x;
      p[ci] = factor * y.head<3>();
      m[ci] = factor * y.tail<3>();
    }
    out.P.push_back(std::move(p));
    out.M.push_back(std::move(m));
  }
  return out;
}

namespace {

// Levi-Civita symbol.
double epsilon_ijk(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
      (i == 2 && j == 0 && k == 1)) {
    return 1.0;
  }
  return -1.0;
}

struct PlaneWaveModes {
  // 3-vector amplitudes of the normalized plane-wave modes at one (k, w).
  std::vector<Vector3c> d, b;
};

// Solves and normalizes the per-k plane-wave modes; volume factor V = 1 is
// used in the normalization so amplitudes are per unit volume.
PlaneWaveModes plane_wave_modes(const MediumModel& model, int region,
                                const Vector3r& k, double omega,
                                UnitSystem units) {
  const auto oracle = homogeneous_oracle(model, region, k, omega, units);

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

  const SplitResponse parts = split_block(model.gamma(region, omega));
  Matrix6c ma;
  ma.block<3, 3>(0, 0) = parts.dissipative_part.ee;
  ma.block<3, 3>(0, 3) = parts.dissipative_part.em;
  ma.block<3, 3>(3, 0) = -Matrix3c(parts.dissipative_part.em.adjoint());
  ma.block<3, 3>(3, 3) = parts.dissipative_part.mm;

  PlaneWaveModes out;
  for (const auto& m : oracle) {
    Vector3c d = m.amplitude(0) * p1.cast<Complex>() +
                 m.amplitude(1) * p2.cast<Complex>();
    Vector3c b = m.amplitude(2) * p1.cast<Complex>() +
                 m.amplitude(3) * p2.cast<Complex>();
    Vector6c x;
    x.head<3>() = d;
    x.tail<3>() = b;
    const double q = (-kI * (x.adjoint() * ma * x)(0, 0)).real();
    if (!(q > 0.0)) continue;  // loss-decoupled configuration
    const double z2 = std::norm(m.Z) / (kPi * kPi);
    const double target = 2.0 * units.hbar / (z2 + 1.0);
    const double scale = std::sqrt(target / q);
    out.d.push_back(d * scale);
    out.b.push_back(b * scale);
  }
  return out;
}

}  // namespace

SumRuleResult commutator_sum_rule(const MediumModel& model, int region,
                                  const Vector3r& k,
                                  const std::vector<double>& omega_grid,
                                  int i, int j, UnitSystem units,
                                  double coverage_min) {
  if (i < 0 || i > 2 || j < 0 || j > 2) {
    fail_input("commutator_sum_rule: component indices must be 0..2");
  }
  SumRuleResult res;

  std::vector<Complex> integrand(omega_grid.size(), Complex(0, 0));
  std::vector<double> weight(omega_grid.size(), 0.0);
  for (size_t q = 0; q < omega_grid.size(); ++q) {
    const double w = omega_grid[q];
    const PlaneWaveModes plus = plane_wave_modes(model, region, k, w, units);
    const PlaneWaveModes minus =
        plane_wave_modes(model, region, -k, w, units);
    Complex acc = 0.0;
    for (size_t n = 0; n < plus.d.size(); ++n) {
      acc += plus.d[n](i) * std::conj(plus.b[n](j));
    }
    for (size_t n = 0; n < minus.d.size(); ++n) {
      acc -= std::conj(minus.d[n](i)) * minus.b[n](j);
    }
    integrand[q] = acc / (2.0 * kPi);
    res.mode_count += static_cast<int>(plus.d.size() + minus.d.size());
    const Matrix6c ma = model.gamma_A(region, w).as_matrix();
    weight[q] = (-kI * ma.trace()).real();
  }
  const Complex s_full = integrate_nonuniform(omega_grid, integrand);
  res.S = -kI * s_full;

  double target_k = 0.0;
  for (int kk = 0; kk < 3; ++kk) {
    target_k += epsilon_ijk(i, kk, j) * k(kk);
  }
  res.target = kI * units.hbar * units.c * target_k;
  res.residual = res.S - res.target;

  // Dissipative-weight coverage of the grid, with asymptotic tails.
  const double w_grid = integrate_nonuniform(omega_grid, weight);
  const double below = 0.5 * weight.front() * omega_grid.front();
  const double above = 0.5 * weight.back() * omega_grid.back();
  res.coverage = w_grid / std::max(w_grid + below + above, 1e-300);
  res.coverage_warning = res.coverage < coverage_min;
  return res;
}

ModeBank solve_mode_bank(const MediumModel& model, const MediumMap& map,
                         const SpectralGrid& grid,
                         const std::vector<double>& omega_bins,
                         UnitSystem units, const SolveFilter& filter,
                         int workers) {
  ModeBank bank;
  bank.omega = omega_bins;
  bank.weight.resize(omega_bins.size());
  const size_t nq = omega_bins.size();
  for (size_t q = 0; q < nq; ++q) {
    const double lo = (q == 0) ? omega_bins[0]
                               : 0.5 * (omega_bins[q - 1] + omega_bins[q]);
    const double hi = (q + 1 == nq)
                          ? omega_bins[nq - 1]
                          : 0.5 * (omega_bins[q] + omega_bins[q + 1]);
    bank.weight[q] = (hi - lo) / (2.0 * kPi);
  }
  bank.modes.resize(nq);

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t q = next.fetch_add(1);
      if (q >= nq) return;
      Assembly ctx(model, map, grid, omega_bins[q], units);
      const OperatorPair pair = assemble(ctx);
      std::vector<ModeSolution> modes = solve(ctx, pair, filter);
      std::vector<ModeSolution> kept;
      for (auto& m : modes) {
        derived_EH(m, ctx);
        try {
          normalize(m, ctx);
        } catch (const Error&) {
          continue;  // loss-decoupled; excluded from the TP family
        }
        kept.push_back(std::move(m));
      }
      bank.modes[q] = std::move(kept);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return bank;
}

Amplitudes project_initial_state(const ModeBank& bank,
                                 const std::vector<Vector3c>& D0,
                                 const std::vector<Vector3c>& B0,
                                 const SpectralGrid& grid, UnitSystem units) {
  Amplitudes amps;
  amps.alpha.resize(bank.omega.size());
  const double cell_v = grid.cell_volume();
  for (size_t q = 0; q < bank.omega.size(); ++q) {
    const double w = bank.omega[q];
    amps.alpha[q].resize(bank.modes[q].size());
    for (size_t n = 0; n < bank.modes[q].size(); ++n) {
      const ModeSolution& m = bank.modes[q][n];
      Complex acc = 0.0;
      for (int c = 0; c < grid.cell_count(); ++c) {
        // Eigen's dot conjugates its first argument: ET.dot(D0) = ET^* . D0.
        const size_t ci = static_cast<size_t>(c);
        acc += m.ET[ci].dot(D0[ci]);
        acc += m.HT[ci].dot(B0[ci]);
      }
      amps.alpha[q][n] = acc * cell_v / (units.hbar * w);
    }
  }
  return amps;
}

FieldState synthesize_classical(const ModeBank& bank, const Amplitudes& amps,
                                double t, const SpectralGrid& grid) {
  if (amps.alpha.size() != bank.omega.size()) {
    fail_input("synthesize_classical: amplitude bins do not match the bank");
  }
  const size_t n_cells = static_cast<size_t>(grid.cell_count());
  FieldState st;
  st.t = t;
  st.D.assign(n_cells, Vector3r::Zero());
  st.B.assign(n_cells, Vector3r::Zero());
  st.E.assign(n_cells, Vector3r::Zero());
  st.H.assign(n_cells, Vector3r::Zero());
  for (size_t q = 0; q < bank.omega.size(); ++q) {
    if (amps.alpha[q].size() != bank.modes[q].size()) {
      fail_input("synthesize_classical: amplitude list does not match the "
                 "mode family at bin " + std::to_string(q));
    }
    const Complex osc = std::exp(-kI * (bank.omega[q] * t));
    for (size_t n = 0; n < bank.modes[q].size(); ++n) {
      const Complex a = amps.alpha[q][n] * bank.weight[q] * osc;
      if (a == Complex(0.0, 0.0)) continue;
      const ModeSolution& m = bank.modes[q][n];
      for (size_t c = 0; c < n_cells; ++c) {
        st.D[c] += 2.0 * (a * m.D[c]).real();
        st.B[c] += 2.0 * (a * m.B[c]).real();
        st.E[c] += 2.0 * (a * m.ET[c]).real();
        st.H[c] += 2.0 * (a * m.HT[c]).real();
      }
    }
  }
  st.P.resize(n_cells);
  st.M.resize(n_cells);
  for (size_t c = 0; c < n_cells; ++c) {
    st.P[c] = st.D[c] - st.E[c];
    st.M[c] = st.B[c] - st.H[c];
  }
  return st;
}

AggregatedBank aggregate_bank(const ModeBank& bank, const Amplitudes& amps,
                              const SpectralGrid& grid) {
  if (amps.alpha.size() != bank.omega.size()) {
    fail_input("aggregate_bank: amplitude bins do not match the bank");
  }
  const size_t n_cells = static_cast<size_t>(grid.cell_count());
  AggregatedBank agg;
  agg.omega = bank.omega;
  agg.weight = bank.weight;
  const size_t nq = bank.omega.size();
  agg.D.assign(nq, std::vector<Vector3c>(n_cells, Vector3c::Zero()));
  agg.B = agg.D;
  agg.E = agg.D;
  agg.H = agg.D;
  for (size_t q = 0; q < nq; ++q) {
    if (amps.alpha[q].size() != bank.modes[q].size()) {
      fail_input("aggregate_bank: amplitude list mismatch at bin " +
                 std::to_string(q));
    }
    for (size_t n = 0; n < bank.modes[q].size(); ++n) {
      const Complex a = amps.alpha[q][n];
      if (a == Complex(0.0, 0.0)) continue;
      const ModeSolution& m = bank.modes[q][n];
      for (size_t c = 0; c < n_cells; ++c) {
        agg.D[q][c] += a * m.D[c];
        agg.B[q][c] += a * m.B[c];
        agg.E[q][c] += a * m.ET[c];
        agg.H[q][c] += a * m.HT[c];
      }
    }
  }
  return agg;
}

FieldState synthesize_from_aggregate(const AggregatedBank& agg, double t,
                                     const SpectralGrid& grid) {
  const size_t n_cells = static_cast<size_t>(grid.cell_count());
  FieldState st;
  st.t = t;
  st.D.assign(n_cells, Vector3r::Zero());
  st.B.assign(n_cells, Vector3r::Zero());
  st.E.assign(n_cells, Vector3r::Zero());
  st.H.assign(n_cells, Vector3r::Zero());
  for (size_t q = 0; q < agg.omega.size(); ++q) {
    const Complex osc = agg.weight[q] * std::exp(-kI * (agg.omega[q] * t));
    for (size_t c = 0; c < n_cells; ++c) {
      st.D[c] += 2.0 * (osc * agg.D[q][c]).real();
      st.B[c] += 2.0 * (osc * agg.B[q][c]).real();
      st.E[c] += 2.0 * (osc * agg.E[q][c]).real();
      st.H[c] += 2.0 * (osc * agg.H[q][c]).real();
    }
  }
  st.P.resize(n_cells);
  st.M.resize(n_cells);
  for (size_t c = 0; c < n_cells; ++c) {
    st.P[c] = st.D[c] - st.E[c];
    st.M[c] = st.B[c] - st.H[c];
  }
  return st;
}

Vector3c evaluate_trig(const std::vector<Vector3c>& cells,
                       const SpectralGrid& grid, const Vector3r& position) {
  Vector3c acc = Vector3c::Zero();
  for (int ik = 0; ik < grid.k_count(); ++ik) {
    const double arg = grid.k_vector(ik).dot(position);
    acc += grid.coefficient(cells, ik) * Complex(std::cos(arg), std::sin(arg));
  }
  Vector3c mean = Vector3c::Zero();
  for (const auto& v : cells) mean += v;
  acc += mean / static_cast<double>(cells.size());
  return acc;
}

EnergyFlux energy_and_flux(const FieldState& state, const SpectralGrid& grid,
                           UnitSystem units) {
  EnergyFlux out;
  out.S.resize(state.D.size());
  for (size_t c = 0; c < state.D.size(); ++c) {
    out.U_DB += 0.5 * (state.D[c].squaredNorm() + state.B[c].squaredNorm());
    out.S[c] = units.c * state.E[c].cross(state.H[c]);
  }
  out.U_DB *= grid.cell_volume();
  return out;
}

void gaussian_packet(const SpectralGrid& grid, int axis, int m_center,
                     double m_sigma, const Vector3r& pol, double amplitude,
                     std::vector<Vector3c>& D0, std::vector<Vector3c>& B0) {
  if (axis < 0 || axis > 2) fail_input("gaussian_packet: bad axis");
  if (m_center <= 0) fail_input("gaussian_packet: carrier index must be > 0");
  const size_t n_cells = static_cast<size_t>(grid.cell_count());
  D0.assign(n_cells, Vector3c::Zero());
  B0.assign(n_cells, Vector3c::Zero());
  const Vector3r pol_n = pol.normalized();
  for (int ik = 0; ik < grid.k_count(); ++ik) {
    const auto& tri = grid.k_triple(ik);
    bool on_axis = true;
    for (int a = 0; a < 3; ++a) {
      if (a != axis && tri[static_cast<size_t>(a)] != 0) on_axis = false;
    }
    const int m = tri[static_cast<size_t>(axis)];
    if (!on_axis || m <= 0) continue;
    const double g = std::exp(-0.5 * std::pow((m - m_center) / m_sigma, 2));
    if (g < 1e-12) continue;
    const Vector3r khat = grid.k_vector(ik).normalized();
    const Vector3c d = amplitude * g * pol_n.cast<Complex>();
    const Vector3c b = cross_rc(khat, d);
    for (int c = 0; c < grid.cell_count(); ++c) {
      const Complex ph = grid.phase(ik, c);
      D0[static_cast<size_t>(c)] += d * ph;
      B0[static_cast<size_t>(c)] += b * ph;
    }
  }
}

}  // namespace mepol
