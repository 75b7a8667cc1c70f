#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lsi/functionals.hpp"
#include "lsi/random_fields.hpp"

using namespace lsi;

namespace {

PeriodicGrid canon() { return PeriodicGrid(1024, 80.0, 0.0); }

SolitonProfile canonical_profile() { return ground_state_profile(canonical_params(), kDefaultTheta, canon()); }

// Dilations up to q = 3 stay resolved to the top-band tolerance only on the finer grid.
SolitonProfile fine_profile() {
  return ground_state_profile(canonical_params(), kDefaultTheta, PeriodicGrid(2048, 80.0, 0.0));
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

TEST(Invariants, ZeroState) {
  const auto r = invariants(LsiState::zero(canon()), canonical_params());
  EXPECT_EQ(r.I1, 0.0);
  EXPECT_EQ(r.I2, 0.0);
  EXPECT_EQ(r.I3, 0.0);
  EXPECT_EQ(r.I4, 0.0);
  EXPECT_EQ(r.L, 0.0);
}

TEST(Invariants, CanonicalSoliton) {
  const auto prof = canonical_profile();
  const auto r = invariants(solitary_state(prof, 0.0), prof.params);
  EXPECT_NEAR(r.I1, 2.0, 1e-12);
  EXPECT_NEAR(r.I2, 2.0, 1e-12);
  EXPECT_NEAR(r.I3, -16.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.I4, 0.0, 1e-12);
  EXPECT_NEAR(r.L, 8.0 / 3.0, 1e-12);
  // gradient part 16/3 against coupling -16/3
  EXPECT_NEAR(r.I4_scale, 32.0 / 3.0, 1e-11);
}

TEST(Invariants, TermsMatchDirectQuadrature) {
  // Independent evaluation from closed-form derivatives of the solitary wave.
  const auto prof = canonical_profile();
  const auto& g = prof.grid();
  const auto& p = prof.params;
  const auto s = solitary_state(prof, 0.0);
  RealField grad(g), mom(g), wsq(g), coup(g);
  const double a = std::cos(kDefaultTheta) * std::sqrt(2.0);
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    const double r = a * sech(x);
    const double rx = -a * sech(x) * std::tanh(x);
    grad[j] = 2.0 * (rx * rx + r * r);
    mom[j] = -2.0 * 2.0 * r * r;
    wsq[j] = s.w[j] * s.w[j];
    coup[j] = p.beta * 2.0 * r * r * s.w[j];
  }
  const auto inv = invariants(s, p);
  EXPECT_NEAR(inv.I3, quadrature(wsq) + quadrature(mom), 1e-12);
  EXPECT_NEAR(inv.I4, quadrature(grad) + quadrature(coup), 1e-12);
}

TEST(Invariants, GaugeAndTranslationInvariant) {
  const auto prof = canonical_profile();
  const auto& g = prof.grid();
  Rng rng(4);
  auto s = solitary_state(prof, 0.0);
  s.phi += random_band_limited(g, rng, 20) * cplx(0.1, 0.0);
  s.w += random_bumps(g, rng) * 0.2;
  const auto base = invariants(s, prof.params);

  auto rotated = s;
  rotated.phi *= std::polar(1.0, 0.7);
  rotated.psi *= std::polar(1.0, -2.1);
  const auto r = invariants(rotated, prof.params);
  EXPECT_NEAR(r.I3, base.I3, 1e-12 * base.I3_scale);
  EXPECT_NEAR(r.I4, base.I4, 1e-12 * base.I4_scale);
  EXPECT_NEAR(r.L, base.L, 1e-12 * base.L_scale);

  const LsiState moved(translate(s.phi, 3.3), translate(s.psi, 3.3), translate(s.w, 3.3));
  const auto m = invariants(moved, prof.params);
  EXPECT_NEAR(m.I1, base.I1, 1e-12 * base.I1);
  EXPECT_NEAR(m.L, base.L, 1e-12 * base.L_scale);
}

TEST(Drift, RelativeToScaleFloor) {
  EXPECT_NEAR(relative_drift(1.1, 1.0, 0.5), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(relative_drift(1e-3, 0.0, 2.0), 5e-4);
  InvariantRecord ref;
  ref.I1 = 2.0;
  ref.I4_scale = 10.0;
  InvariantRecord now = ref;
  now.I1 = 2.002;
  now.I4 = 0.01;
  InvariantDrifts d;
  d.absorb(now, ref);
  EXPECT_NEAR(d.I1, 1e-3, 1e-15);
  EXPECT_NEAR(d.I4, 1e-3, 1e-15);
}

TEST(JFunctional, CanonicalValue) {
  const auto prof = canonical_profile();
  EXPECT_NEAR(j_functional(prof.r1, prof.r2), 2.0 * std::pow(3.0, 0.125), 1e-12);
  EXPECT_THROW(j_functional(RealField(canon()), RealField(canon())), std::invalid_argument);
}

TEST(JFunctional, HomogeneousOfDegreeOne) {
  const auto prof = canonical_profile();
  const double j = j_functional(prof.r1, prof.r2);
  for (double a : {0.3, 1.7, 4.0}) EXPECT_NEAR(j_functional(prof.r1 * a, prof.r2 * a), a * j, 1e-12 * a);
}

TEST(JFunctional, InvariantUnderMassPreservingDilation) {
  const auto prof = fine_profile();
  const double j = j_functional(prof.r1, prof.r2);
  for (double q : {0.6, 2.0}) {
    const auto [u, v] = scale_profile(prof.r1, prof.r2, q);
    EXPECT_NEAR(j_functional(u, v), j, 1e-11) << q;
  }
}

TEST(JFunctional, VanishingTangentGradient) {
  EXPECT_LT(j_tangent_gradient(canonical_profile(), 20, 99), 1e-8);
}

TEST(JFunctional, NoLowerValueAtFixedMass) {
  const auto prof = canonical_profile();
  const auto& g = prof.grid();
  const double j0 = j_functional(prof.r1, prof.r2);
  const double mass = norm2_sq(prof.r1) + norm2_sq(prof.r2);
  Rng rng(31);
  std::uniform_real_distribution<double> size(0.02, 0.32);
  for (int trial = 0; trial < 30; ++trial) {
    const double eps = size(rng);
    auto u = prof.r1 + random_bumps(g, rng) * eps;
    auto v = prof.r2 + random_bumps(g, rng) * eps;
    const double s = std::sqrt(mass / (norm2_sq(u) + norm2_sq(v)));
    u *= s;
    v *= s;
    EXPECT_GE(j_functional(u, v), j0 * (1.0 - 1e-12)) << trial;
  }
}

TEST(Pohozaev, BothResidualsVanishAtGroundState) {
  const auto prof = canonical_profile();
  const auto t = pohozaev_terms(prof);
  EXPECT_NEAR(t.kinetic, 4.0, 1e-12);
  EXPECT_NEAR(t.mass, 4.0, 1e-12);
  EXPECT_NEAR(t.quartic, 4.0, 1e-12);
  const auto [a, b] = pohozaev_residuals(prof);
  EXPECT_LT(std::abs(a), 1e-12);
  EXPECT_LT(std::abs(b), 1e-12);
}

TEST(Pohozaev, AmplitudeScalingBreaksSecondIdentity) {
  // A and B are both quadratic in the amplitude, C is quartic.
  const auto prof = scaled_amplitude(canonical_profile(), 1.05);
  const auto [a, b] = pohozaev_residuals(prof);
  EXPECT_LT(std::abs(a), 1e-11);
  EXPECT_NEAR(b, 4.0 * (1.05 * 1.05 - std::pow(1.05, 4)), 1e-11);
  EXPECT_GT(std::abs(b), 1e-2);
}

TEST(ProfileEnergy, VanishesAtGroundStateAndMatchesI4) {
  const auto prof = canonical_profile();
  EXPECT_NEAR(profile_energy(prof), 0.0, 1e-12);
  Rng rng(6);
  for (int i = 0; i < 3; ++i) {
    const auto u = prof.r1 + random_bumps(prof.grid(), rng) * 0.2;
    const auto v = prof.r2 + random_bumps(prof.grid(), rng) * 0.2;
    const auto pf = profile_from_fields(prof.params, u, v);
    const auto inv = invariants(solitary_state(pf, 0.0), prof.params);
    EXPECT_NEAR(profile_energy(pf), inv.I4, 1e-11 * inv.I4_scale);
  }
}

TEST(ProfileEnergy, DilationChainIsQuadraticWithMinimumAtTwo) {
  // q^2 G + (c^2/4) M - gamma q Q with G = 4/3, M = 4, Q = 16/3.
  const auto prof = fine_profile();
  for (double q : {0.6, 0.8, 1.0, 1.25, 2.0, 3.0}) {
    const auto [u, v] = scale_profile(prof.r1, prof.r2, q);
    const double expected = 4.0 / 3.0 * q * q + 4.0 - 16.0 / 3.0 * q;
    EXPECT_NEAR(profile_energy(u, v, prof.params), expected, 1e-11) << q;
  }
  const auto [u2, v2] = scale_profile(prof.r1, prof.r2, 2.0);
  const double e2 = profile_energy(u2, v2, prof.params);
  for (double q : {1.8, 2.2}) {
    const auto [u, v] = scale_profile(prof.r1, prof.r2, q);
    EXPECT_GT(profile_energy(u, v, prof.params), e2);
  }
}

TEST(ProfileEnergy, SlavedLyapunovChainMinimizedAtGroundState) {
  // Omega M + q^2 G - gamma q Q / 2.
  const auto prof = fine_profile();
  double best_q = 0.0;
  double best = 1e300;
  for (double q : {0.6, 0.8, 0.9, 1.0, 1.1, 1.25, 1.5}) {
    const auto [u, v] = scale_profile(prof.r1, prof.r2, q);
    const double l = lyapunov(solitary_state(profile_from_fields(prof.params, u, v), 0.0), prof.params);
    EXPECT_NEAR(l, 4.0 + 4.0 / 3.0 * q * q - 8.0 / 3.0 * q, 1e-11) << q;
    if (l < best) {
      best = l;
      best_q = q;
    }
  }
  EXPECT_EQ(best_q, 1.0);
}

TEST(ScaleProfile, PreservesMassAndIdentity) {
  const auto prof = fine_profile();
  const auto [u1, v1] = scale_profile(prof.r1, prof.r2, 1.0);
  EXPECT_EQ(sup_norm(u1 - prof.r1), 0.0);
  for (double q : {0.6, 2.0, 3.0}) {
    const auto [u, v] = scale_profile(prof.r1, prof.r2, q);
    EXPECT_NEAR(norm2_sq(u), 2.0, 1e-12);
    EXPECT_NEAR(norm2_sq(v), 2.0, 1e-12);
    const auto& g = u.grid();
    for (std::size_t j = 0; j < g.n(); j += 37) EXPECT_NEAR(u[j], std::sqrt(q) * sech(q * g.x(j)), 1e-12);
  }
}

TEST(ScaleProfile, RejectsUnresolvedResults) {
  const auto prof = canonical_profile();
  EXPECT_THROW(scale_profile(prof.r1, prof.r2, 0.1), ResolutionError);
  EXPECT_THROW(scale_profile(prof.r1, prof.r2, 20.0), ResolutionError);
  EXPECT_THROW(scale_profile(prof.r1, prof.r2, 0.0), std::invalid_argument);
}

TEST(ProfileFromFields, SlavesLongWaveAndRecoversAngle) {
  const auto prof = canonical_profile();
  const auto pf = profile_from_fields(prof.params, prof.r1, prof.r2);
  EXPECT_NEAR(pf.theta, kDefaultTheta, 1e-14);
  EXPECT_LT(sup_norm(pf.w - prof.w), 1e-15);
}
