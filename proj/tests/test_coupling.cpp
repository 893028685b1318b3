#include <doctest.h>

#include <cmath>

#include "mepol/coupling.hpp"
#include "mepol/errors.hpp"
#include "mepol/rng.hpp"

using namespace mepol;

namespace {

BlockResponse random_passive(Rng& rng, int rank_drop = 0) {
  // M_A = (i/2) G G^H is passive by construction.
  Eigen::Matrix<Complex, 6, 6> g;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g(i, j) = rng.complex_normal();
  for (int j = 0; j < rank_drop; ++j) g.col(5 - j).setZero();
  const Matrix6c m = 0.5 * kI * (g * g.adjoint());
  BlockResponse r = BlockResponse::from_matrix(m, 1.0);
  return r;
}

}  // namespace

TEST_CASE("factorization: single dielectric channel") {
  BlockResponse a;
  a.omega = 1.0;
  a.ee = Complex(0, 5) * Matrix3c::Identity();
  const CouplingSet k = factorize_gamma_A(a);
  CHECK(k.rank == 3);
  CHECK(k.channels.size() == 1);
  CHECK((k.channels[0].Le - std::sqrt(10.0) * Matrix3c::Identity()).norm() <
        1e-12);
  CHECK(k.channels[0].Lm.norm() < 1e-12);
  CHECK(roundtrip_residual(k, a) < 1e-12);
}

TEST_CASE("factorization: zero response has empty factors") {
  BlockResponse zero;
  zero.omega = 1.0;
  const CouplingSet k = factorize_gamma_A(zero);
  CHECK(k.rank == 0);
  CHECK(k.channels.empty());
  CHECK(roundtrip_residual(k, zero) == 0.0);
}

TEST_CASE("factorization: isotropic magneto-electric response is rank 3") {
  const double s10 = std::sqrt(10.0);
  BlockResponse a;
  a.omega = 1.0;
  a.ee = Complex(0, 5) * Matrix3c::Identity();
  a.mm = Complex(0, 2) * Matrix3c::Identity();
  a.em = s10 * Matrix3c::Identity();
  a.me = -s10 * Matrix3c::Identity();
  const CouplingSet k = factorize_gamma_A(a);
  CHECK(k.rank == 3);
  CHECK(k.channels.size() == 1);
  CHECK(roundtrip_residual(k, a) < 1e-12);
}

TEST_CASE("factorization rejects gain") {
  BlockResponse gain;
  gain.omega = 1.0;
  gain.ee = Complex(0, -1) * Matrix3c::Identity();
  CHECK_THROWS_AS(factorize_gamma_A(gain), Error);
}

TEST_CASE("factorization round trip over random passive samples") {
  Rng rng(20240811);
  for (int trial = 0; trial < 60; ++trial) {
    const BlockResponse a = random_passive(rng, trial % 4);
    const CouplingSet k = factorize_gamma_A(a);
    CHECK(roundtrip_residual(k, a) < 1e-12);
  }
}

TEST_CASE("isotropic single channel and its fixed cross coupling") {
  const CouplingSet k = isotropic_n1(5.0, 2.0, +1);
  CHECK((k.channels[0].Le - std::sqrt(10.0) * Matrix3c::Identity()).norm() <
        1e-14);
  CHECK((k.channels[0].Lm - Complex(0, 2) * Matrix3c::Identity()).norm() <
        1e-14);
  const auto [em, me] = predicted_cross_n1(k);
  CHECK((em - std::sqrt(10.0) * Matrix3c::Identity()).norm() < 1e-13);
  CHECK((me + std::sqrt(10.0) * Matrix3c::Identity()).norm() < 1e-13);

  // pure channels
  const CouplingSet mag = isotropic_n1(0.0, 2.0, +1);
  CHECK(mag.channels[0].Le.norm() == 0.0);
  const CouplingSet die = isotropic_n1(5.0, 0.0, -1);
  CHECK(die.channels[0].Lm.norm() == 0.0);

  // sign symmetry flips both cross blocks
  const auto [emm, mem] = predicted_cross_n1(isotropic_n1(5.0, 2.0, -1));
  CHECK((emm + em).norm() < 1e-13);
  CHECK((mem + me).norm() < 1e-13);

  CHECK_THROWS_AS(isotropic_n1(-1.0, 2.0, +1), Error);
}

TEST_CASE("three-channel partition: worked example") {
  const double s10 = std::sqrt(10.0);
  const Matrix3c ee = Complex(0, 6) * Matrix3c::Identity();
  const Matrix3c mm = Complex(0, 3) * Matrix3c::Identity();
  const Matrix3c em = s10 * Matrix3c::Identity();
  // channel-3 electric weight 5 -> scale 5/sqrt(10)
  const CouplingSet k = partition_n3(ee, mm, em, 5.0 / s10);
  // channel 1 purely electric, channel 2 purely magnetic
  CHECK(k.channels[0].Lm.norm() == 0.0);
  CHECK(k.channels[1].Le.norm() == 0.0);
  // channel 3 reproduces the (5i, 2i, sqrt10) pattern
  const Matrix3c ee3 = 0.5 * kI *
                       (k.channels[2].Le * k.channels[2].Le.adjoint());
  const Matrix3c mm3 = 0.5 * kI *
                       (k.channels[2].Lm * k.channels[2].Lm.adjoint());
  CHECK((ee3 - Complex(0, 5) * Matrix3c::Identity()).norm() < 1e-12);
  CHECK((mm3 - Complex(0, 2) * Matrix3c::Identity()).norm() < 1e-12);
  // remainders i*1 each; full reconstruction
  BlockResponse target;
  target.ee = ee;
  target.mm = mm;
  target.em = em;
  target.me = -em.adjoint();
  CHECK(roundtrip_residual(k, target) < 1e-10);
}

TEST_CASE("three-channel partition: degenerate cases") {
  // no cross block: reduces to independent factorizations
  const Matrix3c ee = Complex(0, 2) * Matrix3c::Identity();
  const Matrix3c mm = Complex(0, 1) * Matrix3c::Identity();
  const CouplingSet k = partition_n3(ee, mm, Matrix3c::Zero());
  CHECK(k.channels[2].Le.norm() == 0.0);
  CHECK(k.channels[2].Lm.norm() == 0.0);

  // single-channel input: channels 1 and 2 empty at the exact scale
  const double s10 = std::sqrt(10.0);
  const CouplingSet k1 =
      partition_n3(Complex(0, 5) * Matrix3c::Identity(),
                   Complex(0, 2) * Matrix3c::Identity(),
                   s10 * Matrix3c::Identity(), 5.0 / s10);
  CHECK(k1.channels[0].Le.norm() < 1e-7);
  CHECK(k1.channels[1].Lm.norm() < 1e-7);

  // infeasible: cross loss exceeding the diagonal budget
  CHECK_THROWS_AS(partition_n3(Complex(0, 1) * Matrix3c::Identity(),
                               Complex(0, 1) * Matrix3c::Identity(),
                               2.0 * Matrix3c::Identity()),
                  Error);
}

TEST_CASE("gauge transformations leave the response invariant") {
  Rng rng(77);
  BlockResponse a;
  a.omega = 1.0;
  a.ee = Complex(0, 5) * Matrix3c::Identity();
  a.mm = Complex(0, 2) * Matrix3c::Identity();
  a.em = std::sqrt(10.0) * Matrix3c::Identity();
  a.me = -std::sqrt(10.0) * Matrix3c::Identity();
  const CouplingSet k = factorize_gamma_A(a);

  // identity gauge: exact
  std::vector<Matrix3c> id(k.channels.size(), Matrix3c::Identity());
  const CouplingSet same = apply_gauge(k, id);
  CHECK((same.reconstruct().as_matrix() - k.reconstruct().as_matrix())
            .norm() == 0.0);

  // diagonal phase
  Matrix3c u = Matrix3c::Identity();
  u(1, 1) = std::exp(kI * 0.7);
  const CouplingSet phased = apply_gauge(k, {u});
  CHECK((phased.reconstruct() - a).norm() < 1e-14 * a.norm());

  // seeded random unitaries
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix3c ru = rng.random_unitary(3);
    const CouplingSet g = apply_gauge(k, {ru});
    CHECK((g.reconstruct() - a).norm() < 1e-13 * a.norm());
  }

  // non-unitary input rejected
  CHECK_THROWS_AS(apply_gauge(k, {2.0 * Matrix3c::Identity()}), Error);
}

TEST_CASE("every factorizable sample satisfies the cross-coupling bound") {
  Rng rng(5150);
  for (int trial = 0; trial < 40; ++trial) {
    const BlockResponse a = random_passive(rng, trial % 3);
    CHECK(cross_bound_check(a, 1e-10).pass);
  }
}
