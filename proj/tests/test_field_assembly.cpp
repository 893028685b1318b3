#include <doctest.h>

#include <cmath>

#include "mepol/causality.hpp"
#include "mepol/errors.hpp"
#include "mepol/field_assembly.hpp"

using namespace mepol;

namespace {

MediumModel lorentz_bulk() {
  Band b;
  b.kind = BandKind::electric;
  b.strength_e = 0.5;
  b.omega0 = 1.0;
  b.gamma = 0.1;
  Region r{"bulk", {b}, false};
  return MediumModel({r});
}

SpectralGrid line_grid(int n, double length) {
  GridSpec spec;
  spec.box = {length, 1.0, 1.0};
  spec.points = {n, 1, 1};
  return SpectralGrid(spec);
}

MediumMap uniform_map(const SpectralGrid& grid) {
  MediumMap map;
  map.region_of_cell.assign(static_cast<size_t>(grid.cell_count()), 0);
  return map;
}

}  // namespace

TEST_CASE("noise coefficients vanish exactly at Z = i pi") {
  const MediumModel m = lorentz_bulk();
  const SpectralGrid grid = line_grid(5, 7.0);
  const MediumMap map = uniform_map(grid);
  Assembly ctx(m, map, grid, 1.02);
  auto modes = solve(ctx, ctx.operators());
  REQUIRE_FALSE(modes.empty());
  for (auto& mode : modes) {
    derived_EH(mode, ctx);
    normalize(mode, ctx);
  }
  const NoiseSpectra ns = noise_spectra_TP(modes, ctx);
  CHECK(ns.tp_only);

  // direct re-evaluation oracle for the first mode
  {
    const ModeSolution& mode = modes.front();
    const Complex factor = mode.Z / (kI * kPi) - 1.0;
    const SplitResponse parts = split_block(m.gamma(0, mode.omega));
    double max_dev = 0.0;
    for (int c = 0; c < grid.cell_count(); ++c) {
      const size_t ci = static_cast<size_t>(c);
      const Vector3c expect =
          factor * (parts.dissipative_part.ee * mode.D[ci] +
                    parts.dissipative_part.em * mode.B[ci]);
      max_dev = std::max(max_dev, (ns.P[0][ci] - expect).norm());
    }
    CHECK(max_dev < 1e-12);
  }

  // forcing Z -> i pi turns the coefficients off; the norm scales linearly
  // with the offset
  std::vector<ModeSolution> synth_modes = modes;
  double prev = -1.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    synth_modes[0].Z = kI * (kPi * (1.0 + eps));
    const NoiseSpectra at_eps = noise_spectra_TP(synth_modes, ctx);
    double norm = 0.0;
    for (const auto& v : at_eps.P[0]) norm += v.squaredNorm();
    norm = std::sqrt(norm);
    if (prev > 0.0) {
      CHECK(norm == doctest::Approx(prev / 10.0).epsilon(1e-6));
    }
    prev = norm;
  }
  synth_modes[0].Z = kI * kPi;
  const NoiseSpectra at_zero = noise_spectra_TP(synth_modes, ctx);
  for (const auto& v : at_zero.P[0]) CHECK(v.norm() == 0.0);
  for (const auto& v : at_zero.M[0]) CHECK(v.norm() == 0.0);

  // unnormalized input rejected
  std::vector<ModeSolution> raw = solve(ctx, ctx.operators());
  CHECK_THROWS_AS(noise_spectra_TP(raw, ctx), Error);
}

TEST_CASE("commutator sum rule hits the canonical kernel") {
  const MediumModel m = lorentz_bulk();
  const Vector3r k(0.0, 0.0, 1.0);
  OmegaGrid g{GridKind::log_spaced, 1e-2, 1e2, 800};
  const SumRuleResult res = commutator_sum_rule(m, 0, k, g.values(), 0, 1);
  // eps_{x k y} k_k = eps_{xzy} = -1: target is -i hbar c |k|
  CHECK(res.target == Complex(0.0, -1.0));
  CHECK(std::abs(res.residual) < 2e-3);
  CHECK_FALSE(res.coverage_warning);

  // i = j vanishes identically
  const SumRuleResult diag = commutator_sum_rule(m, 0, k, g.values(), 1, 1);
  CHECK(std::abs(diag.S) < 1e-14);
  CHECK(std::abs(diag.target) == 0.0);

  // refinement shrinks the residual
  OmegaGrid g2 = g.refined(2);
  const SumRuleResult res2 = commutator_sum_rule(m, 0, k, g2.values(), 0, 1);
  CHECK(std::abs(res2.residual) < std::abs(res.residual));

  // vacuum: no modes; the report carries the full kernel as residual
  Region vac{"vacuum", {}, false};
  const MediumModel v({vac});
  const SumRuleResult empty = commutator_sum_rule(v, 0, k, g.values(), 0, 1);
  CHECK(empty.mode_count == 0);
  CHECK(std::abs(empty.S) == 0.0);
  CHECK(std::abs(empty.residual + empty.target) < 1e-14);
}

TEST_CASE("synthesis: zero amplitudes, single-mode norm, two-line spectrum") {
  const MediumModel m = lorentz_bulk();
  const SpectralGrid grid = line_grid(5, 7.0);
  const MediumMap map = uniform_map(grid);
  const std::vector<double> bins = {0.8, 1.25};
  ModeBank bank = solve_mode_bank(m, map, grid, bins);
  REQUIRE(bank.modes.size() == 2);
  REQUIRE_FALSE(bank.modes[0].empty());
  REQUIRE_FALSE(bank.modes[1].empty());

  Amplitudes zero;
  zero.alpha.resize(2);
  zero.alpha[0].assign(bank.modes[0].size(), Complex(0, 0));
  zero.alpha[1].assign(bank.modes[1].size(), Complex(0, 0));
  const FieldState silent = synthesize_classical(bank, zero, 3.0, grid);
  for (const auto& v : silent.D) CHECK(v.norm() == 0.0);
  for (const auto& v : silent.P) CHECK(v.norm() == 0.0);

  // single mode: L2 norm of D is constant in time
  Amplitudes one = zero;
  one.alpha[0][0] = Complex(1.0, 0.0);
  auto l2 = [&](double t) {
    const FieldState st = synthesize_classical(bank, one, t, grid);
    double acc = 0.0;
    for (const auto& v : st.D) acc += v.squaredNorm();
    return std::sqrt(acc);
  };
  const double n0 = l2(0.0);
  CHECK(n0 > 0.0);
  for (double t : {0.7, 2.2, 5.9}) {
    CHECK(l2(t) == doctest::Approx(n0).epsilon(1e-10));
  }

  // two modes at distinct bins: the time trace holds exactly two lines
  Amplitudes two = zero;
  two.alpha[0][0] = Complex(1.0, 0.0);
  two.alpha[1][0] = Complex(0.7, 0.2);
  const int nt = 8192;
  const double dt = 0.05;
  std::vector<double> trace(nt);
  for (int it = 0; it < nt; ++it) {
    const FieldState st = synthesize_classical(bank, two, it * dt, grid);
    // oblique probe direction so any transverse polarization registers
    trace[static_cast<size_t>(it)] = st.D[0](1) + 0.6 * st.D[0](2);
  }
  // Hann-windowed line strengths at the mode frequencies and two controls
  auto line = [&](double w) {
    Complex acc = 0.0;
    double wsum = 0.0;
    for (int it = 0; it < nt; ++it) {
      const double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * it / (nt - 1));
      acc += hann * trace[static_cast<size_t>(it)] *
             std::exp(kI * (w * it * dt));
      wsum += hann;
    }
    return std::abs(acc) / wsum;
  };
  const double l1 = line(bins[0]);
  const double l2b = line(bins[1]);
  const double off1 = line(0.55);
  const double off2 = line(1.65);
  CHECK(l1 > 50.0 * off1);
  CHECK(l2b > 50.0 * off2);
}

TEST_CASE("energy and flux of a circularly polarized vacuum wave") {
  Region vac{"vacuum", {}, false};
  const MediumModel v({vac});
  const SpectralGrid grid = line_grid(7, 7.0);
  const MediumMap map = uniform_map(grid);
  const int ik = grid.find_k({1, 0, 0});
  const double kmag = grid.k_vector(ik).norm();

  // circular polarization: |D| = d everywhere, rightward propagation
  const double d = 0.35;
  FieldState st;
  st.t = 0.0;
  const size_t n = static_cast<size_t>(grid.cell_count());
  st.D.resize(n);
  st.B.resize(n);
  for (int c = 0; c < grid.cell_count(); ++c) {
    const double ph = kmag * grid.cell_position(c)(0);
    const Vector3r e1 = grid.pol1(ik), e2 = grid.pol2(ik);
    st.D[static_cast<size_t>(c)] = d * (std::cos(ph) * e1 + std::sin(ph) * e2);
    st.B[static_cast<size_t>(c)] =
        d * (std::cos(ph) * e2 - std::sin(ph) * e1);
  }
  st.E = st.D;
  st.H = st.B;
  st.P.assign(n, Vector3r::Zero());
  st.M.assign(n, Vector3r::Zero());

  const EnergyFlux ef = energy_and_flux(st, grid);
  CHECK(ef.U_DB == doctest::Approx(d * d * grid.volume()).epsilon(1e-12));
  for (const auto& s : ef.S) {
    CHECK(s.norm() == doctest::Approx(d * d).epsilon(1e-12));
    CHECK(s(0) > 0.0);  // directed along +k
  }

  // zero fields
  FieldState dark = st;
  for (auto& v : dark.D) v.setZero();
  for (auto& v : dark.B) v.setZero();
  for (auto& v : dark.E) v.setZero();
  for (auto& v : dark.H) v.setZero();
  const EnergyFlux none = energy_and_flux(dark, grid);
  CHECK(none.U_DB == 0.0);

  // standing wave (counter-propagating pair): E and H in spatial
  // quadrature, so the volume-integrated flux cancels
  FieldState standing = st;
  for (int c = 0; c < grid.cell_count(); ++c) {
    const double ph = kmag * grid.cell_position(c)(0);
    standing.E[static_cast<size_t>(c)] =
        2.0 * d * std::cos(ph) * grid.pol1(ik);
    standing.H[static_cast<size_t>(c)] =
        2.0 * d * std::sin(ph) * grid.pol2(ik);
  }
  const EnergyFlux sw = energy_and_flux(standing, grid);
  Vector3r total = Vector3r::Zero();
  for (const auto& s : sw.S) total += s * grid.cell_volume();
  CHECK(total.norm() < 1e-12);
}

TEST_CASE("projection reconstructs a packet and the books balance") {
  // Two-region stack: packet launched in the vacuum, absorbed in the slab.
  Band b;
  b.kind = BandKind::electric;
  b.strength_e = 0.8;
  b.omega0 = 1.0;
  b.gamma = 0.5;
  Region vac{"vacuum", {}, false};
  Region slab{"slab", {b}, false};
  const MediumModel model({vac, slab});
  const int n_cells = 17;
  const SpectralGrid grid = line_grid(n_cells, 17.0);
  MediumMap map;
  map.region_of_cell.assign(n_cells, 0);
  for (int c = 6; c < 11; ++c) map.region_of_cell[static_cast<size_t>(c)] = 1;

  std::vector<Vector3c> d0c, b0c;
  gaussian_packet(grid, 0, 3, 1.5, Vector3r::UnitY(), 1.0, d0c, b0c);
  std::vector<Vector3c> d0(d0c.size()), b0(b0c.size());
  for (size_t i = 0; i < d0c.size(); ++i) {
    d0[i] = d0c[i].real().cast<Complex>();
    b0[i] = b0c[i].real().cast<Complex>();
  }

  OmegaGrid og{GridKind::linear, 0.02, 4.0, 400};
  const ModeBank bank =
      solve_mode_bank(model, map, grid, og.values(), UnitSystem{}, SolveFilter{}, 2);
  const Amplitudes amps = project_initial_state(bank, d0, b0, grid);
  const FieldState st0 = synthesize_classical(bank, amps, 0.0, grid);

  double num = 0.0, den = 0.0;
  for (int c = 0; c < n_cells; ++c) {
    const size_t ci = static_cast<size_t>(c);
    num += (st0.D[ci] - d0[ci].real().matrix()).squaredNorm();
    den += d0[ci].real().matrix().squaredNorm();
  }
  CHECK(std::sqrt(num / den) < 5e-3);

  // P = D - E holds by construction and vanishes in the vacuum
  for (int c = 0; c < 6; ++c) {
    CHECK(st0.P[static_cast<size_t>(c)].norm() < 1e-12);
  }
  CHECK(st0.tp_only);
}
