#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "lsi/dynamics.hpp"
#include "lsi/functionals.hpp"
#include "lsi/orbital_metric.hpp"
#include "lsi/random_fields.hpp"

using namespace lsi;

namespace {

PeriodicGrid canon() { return PeriodicGrid(1024, 80.0, 0.0); }

// beta = 0 decouples the system; built directly since make_params rejects it.
PhysParams decoupled() { return PhysParams{0.0, 2.0, 2.0, 1.0, 0.0}; }

SolitonProfile canonical_profile() { return ground_state_profile(canonical_params(), kDefaultTheta, canon()); }

}  // namespace

TEST(Rhs, ZeroStateIsFixed) {
  const auto d = rhs(LsiState::zero(canon()), canonical_params());
  EXPECT_EQ(sup_norm(d.dphi), 0.0);
  EXPECT_EQ(sup_norm(d.dpsi), 0.0);
  EXPECT_EQ(sup_norm(d.dw), 0.0);
}

TEST(Rhs, FreeSchrodingerEigenmode) {
  const auto g = canon();
  const double k = 2.0 * std::numbers::pi * 5.0 / g.length();
  const auto phi = ComplexField::from_function(g, [&](double x) { return std::polar(1.0, k * x); });
  const LsiState s(phi, ComplexField(g), RealField(g));
  const auto d = rhs(s, canonical_params());
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_LT(std::abs(d.dphi[j] - cplx(0.0, -k * k) * phi[j]), 1e-12);
}

TEST(Rhs, MatchesCentralDifferenceOfExactSolution) {
  const auto prof = canonical_profile();
  const auto d = rhs(solitary_state(prof, 0.0), prof.params);
  std::vector<double> errs;
  for (double eps : {2e-3, 1e-3}) {
    const auto fwd = solitary_state(prof, eps);
    const auto bwd = solitary_state(prof, -eps);
    const double e = std::max({sup_norm((fwd.phi - bwd.phi) * cplx(0.5 / eps, 0.0) - d.dphi),
                               sup_norm((fwd.psi - bwd.psi) * cplx(0.5 / eps, 0.0) - d.dpsi),
                               sup_norm((fwd.w - bwd.w) * (0.5 / eps) - d.dw)});
    errs.push_back(e);
  }
  EXPECT_LT(errs[1], 1e-5);
  EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.2);
}

TEST(Step, ZeroStateStaysZero) {
  const auto s = step_ifrk4(LsiState::zero(canon()), canonical_params(), 1e-3);
  EXPECT_EQ(sup_norm(s.phi), 0.0);
  EXPECT_EQ(sup_norm(s.w), 0.0);
  EXPECT_DOUBLE_EQ(s.t, 1e-3);
}

TEST(Step, DecoupledGaussianPropagatesExactly) {
  const auto g = canon();
  const auto phi0 = ComplexField::from_function(g, [](double x) { return std::exp(-x * x); });
  const LsiState s(phi0, phi0, RealField(g));
  const double dt = 1e-2;
  const auto s1 = step_ifrk4(s, decoupled(), dt);
  const auto exact = apply_multiplier(phi0, [&](std::size_t j) {
    const double k = g.wavenumber(j);
    return std::polar(1.0, -k * k * dt);
  });
  EXPECT_LT(sup_norm(s1.phi - exact), 1e-14);
  EXPECT_LT(sup_norm(s1.psi - exact), 1e-14);
}

TEST(Evolve, SingleModeLinearEvolution) {
  const auto g = canon();
  const double k = 2.0 * std::numbers::pi * 3.0 / g.length();
  const auto phi0 = ComplexField::from_function(g, [&](double x) { return std::polar(1.0, k * x); });
  const LsiState s(phi0, ComplexField(g), RealField(g));
  const auto res = evolve(s, decoupled(), EvolveConfig{1e-3, 1.0, 100, true}, [](const LsiState&) { return 0; });
  const auto exact = ComplexField::from_function(g, [&](double x) { return std::polar(1.0, k * x - k * k); });
  EXPECT_LT(sup_norm(res.final_state.phi - exact), 1e-10);
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_NEAR(std::abs(res.final_state.phi[j]), 1.0, 1e-12);
}

TEST(Evolve, ZeroDurationReturnsInitialState) {
  const auto prof = canonical_profile();
  const auto s = solitary_state(prof, 0.0);
  const auto res = evolve(s, prof.params, EvolveConfig{1e-3, 0.0, 10, true}, [](const LsiState& st) { return st.t; });
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].t, 0.0);
  EXPECT_EQ(sup_norm(res.final_state.phi - s.phi), 0.0);
}

TEST(Evolve, LastStepLandsOnEndTime) {
  const auto prof = canonical_profile();
  const auto res = evolve(solitary_state(prof, 0.0), prof.params, EvolveConfig{1e-3, 0.0105, 4, true},
                          [](const LsiState& st) { return st.t; });
  // start, steps 4 and 8, final step 11
  ASSERT_EQ(res.records.size(), 4u);
  EXPECT_NEAR(res.records[1].t, 0.004, 1e-15);
  EXPECT_NEAR(res.records[2].t, 0.008, 1e-15);
  EXPECT_EQ(res.records.back().t, 0.0105);
  EXPECT_EQ(res.final_state.t, 0.0105);
}

TEST(Evolve, ConfigValidation) {
  EXPECT_THROW((EvolveConfig{0.0, 1.0, 1, true}.validate()), std::invalid_argument);
  EXPECT_THROW((EvolveConfig{1e-3, -1.0, 1, true}.validate()), std::invalid_argument);
  EXPECT_THROW((EvolveConfig{1e-3, 1.0, 0, true}.validate()), std::invalid_argument);
}

TEST(Evolve, SolitonModulusAfterTenUnits) {
  const auto prof = canonical_profile();
  const auto& g = prof.grid();
  const auto res = evolve(solitary_state(prof, 0.0), prof.params, EvolveConfig{1e-3, 10.0, 1000, true},
                          [](const LsiState&) { return 0; });
  double err = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double xi = g.wrap(g.x(j) - 20.0);
    err = std::max(err, std::abs(std::abs(res.final_state.phi[j]) - 1.0 / std::cosh(xi)));
  }
  EXPECT_LT(err, 1e-7);
}

TEST(Evolve, MeanOfLongWaveIsConserved) {
  const auto g = canon();
  Rng rng(17);
  const auto prof = canonical_profile();
  auto s = solitary_state(prof, 0.0);
  s.phi += random_band_limited(g, rng, 20) * cplx(0.2, 0.0);
  s.w += random_bumps(g, rng) * 0.3;
  const double m0 = quadrature(s.w);
  const auto s1 = advance(s, prof.params, 1e-3, 500);
  EXPECT_NEAR(quadrature(s1.w), m0, 1e-12 * std::max(1.0, std::abs(m0)));
}

TEST(Evolve, TimeReversal) {
  const auto g = canon();
  Rng rng(23);
  const auto prof = canonical_profile();
  auto s = solitary_state(prof, 0.0);
  s.phi += random_band_limited(g, rng, 16) * cplx(0.05, 0.0);
  const auto fwd = advance(s, prof.params, 1e-3, 2000);
  const auto back = advance(fwd, prof.params, -1e-3, 2000);
  EXPECT_LT(sup_norm(back.phi - s.phi), 1e-7);
  EXPECT_LT(sup_norm(back.psi - s.psi), 1e-7);
  EXPECT_LT(sup_norm(back.w - s.w), 1e-7);
  EXPECT_NEAR(back.t, 0.0, 1e-12);
}

TEST(Evolve, HalvingTimeStepLeavesFunctionalsUnchanged) {
  const auto g = canon();
  Rng rng(29);
  const auto prof = canonical_profile();
  auto s = solitary_state(prof, 0.0);
  s.psi += random_band_limited(g, rng, 16) * cplx(0.01, 0.0);
  auto run = [&](double dt) {
    const auto res = evolve(s, prof.params, EvolveConfig{dt, 2.0, 100000, true}, [](const LsiState&) { return 0; });
    return std::pair{invariants(res.final_state, prof.params), orbital_distance(res.final_state, prof)};
  };
  const auto [ia, fa] = run(1e-3);
  const auto [ib, fb] = run(5e-4);
  EXPECT_LT(std::abs(ia.I1 - ib.I1), 1e-9);
  EXPECT_LT(std::abs(ia.I3 - ib.I3), 1e-9);
  EXPECT_LT(std::abs(ia.I4 - ib.I4), 1e-9);
  EXPECT_LT(std::abs(ia.L - ib.L), 1e-9);
  EXPECT_LT(std::abs(fa.rho - fb.rho), 1e-9);
}

TEST(Step, NonFiniteDataSignalsBlowUp) {
  const auto prof = canonical_profile();
  auto s = solitary_state(prof, 0.0);
  s.phi[10] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  try {
    (void)evolve(s, prof.params, EvolveConfig{1e-3, 1.0, 10, true}, [](const LsiState&) { return 0; });
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.step(), 1u);
    EXPECT_NEAR(e.time(), 1e-3, 1e-15);
  }
}
