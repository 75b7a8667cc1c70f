#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "lsi/functionals.hpp"
#include "lsi/random_fields.hpp"
#include "lsi/stability_operators.hpp"

using namespace lsi;

namespace {

PeriodicGrid canon() { return PeriodicGrid(1024, 80.0, 0.0); }

SolitonProfile canonical_profile() { return ground_state_profile(canonical_params(), kDefaultTheta, canon()); }

double sech(double x) { return 1.0 / std::cosh(x); }

// f minus its L2 projection onto span(c).
RealField remove_component(const RealField& f, const RealField& c) { return f - c * (dot(f, c) / norm2_sq(c)); }

// Dense matrix of a matrix-free operator acting on `comps` stacked components.
template <class Apply>
Eigen::MatrixXd dense(const PeriodicGrid& g, std::size_t comps, Apply&& op) {
  const auto n = static_cast<Eigen::Index>(g.n());
  const Eigen::Index dof = n * static_cast<Eigen::Index>(comps);
  Eigen::MatrixXd a(dof, dof);
  for (Eigen::Index col = 0; col < dof; ++col) {
    BlockField e(comps, RealField(g));
    e[static_cast<std::size_t>(col / n)][static_cast<std::size_t>(col % n)] = 1.0;
    const BlockField out = op(e);
    for (std::size_t c = 0; c < comps; ++c) {
      for (Eigen::Index j = 0; j < n; ++j) a(static_cast<Eigen::Index>(c) * n + j, col) = out[c][static_cast<std::size_t>(j)];
    }
  }
  return a;
}

// Smallest eigenvalue of A restricted to the Euclidean complement of the columns of C.
double restricted_min(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(a.rows() - c.cols());
  const Eigen::MatrixXd h = z.transpose() * (0.5 * (a + a.transpose())) * z;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

Eigen::VectorXd flatten(const BlockField& b) {
  const auto n = static_cast<Eigen::Index>(b[0].grid().n());
  Eigen::VectorXd v(n * static_cast<Eigen::Index>(b.size()));
  for (std::size_t c = 0; c < b.size(); ++c) {
    for (Eigen::Index j = 0; j < n; ++j) v[static_cast<Eigen::Index>(c) * n + j] = b[c][static_cast<std::size_t>(j)];
  }
  return v;
}

}  // namespace

TEST(Apply, L0AnnihilatesGroundState) {
  const auto prof = canonical_profile();
  EXPECT_LT(sup_norm(apply(OperatorKind::L0, prof, prof.r1)), 1e-10);
  EXPECT_LT(sup_norm(apply(OperatorKind::L0, prof, prof.r2)), 1e-10);
}

TEST(Apply, CouplingVanishesOnScalarBranch) {
  const auto prof = ground_state_profile(canonical_params(), 0.0, canon());
  Rng rng(2);
  EXPECT_EQ(sup_norm(apply(OperatorKind::L3, prof, random_bumps(prof.grid(), rng))), 0.0);
}

TEST(Apply, L1OnConstantIsPotential) {
  const auto prof = canonical_profile();
  const auto& g = prof.grid();
  const auto out = apply(OperatorKind::L1, prof, RealField::from_function(g, [](double) { return 1.0; }));
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_NEAR(out[j], 1.0 - 4.0 * std::pow(sech(g.x(j)), 2), 1e-13);
}

TEST(Apply, RejectsForeignGrid) {
  const auto prof = canonical_profile();
  EXPECT_THROW(apply(OperatorKind::L0, prof, RealField(PeriodicGrid(512, 80.0))), GridMismatch);
}

TEST(QuadForm, QExamples) {
  const auto prof = canonical_profile();
  EXPECT_NEAR(quad_form_q(prof, prof.r1, prof.r2), 0.0, 1e-10);
  // <L0 R1x, R1x> = <(L1 + 2 gamma R1^2) R1x, R1x>
  const auto r1x = deriv(prof.r1, 1);
  const RealField zero(prof.grid());
  const double direct = quad_form_q(prof, r1x, zero);
  const double via_l1 =
      dot(apply(OperatorKind::L1, prof, r1x), r1x) + 2.0 * prof.params.gamma * dot(multiply(multiply(prof.r1, prof.r1), r1x), r1x);
  EXPECT_NEAR(direct, via_l1, 1e-12);
  EXPECT_GT(direct, 0.0);
}

TEST(QuadForm, PExamples) {
  const auto prof = canonical_profile();
  const RealField zero(prof.grid());
  EXPECT_EQ(quad_form_p(prof, zero, zero), 0.0);
  EXPECT_NEAR(quad_form_p(prof, deriv(prof.r1, 1), deriv(prof.r2, 1)), 0.0, 1e-9);
  EXPECT_NEAR(quad_form_p(prof, prof.r1, prof.r2), -32.0 / 3.0, 1e-10);
}

TEST(QuadForm, BoundedBelowByConstrainedMinimum) {
  const auto prof = canonical_profile();
  const auto& g = prof.grid();
  const auto c1 = l0_constraints(prof, 1)[0][0];
  const auto c2 = l0_constraints(prof, 2)[0][0];
  const double mu1 = constrained_rayleigh(prof, QuadraticForm::l0, l0_constraints(prof, 1)).mu;
  const double mu2 = constrained_rayleigh(prof, QuadraticForm::l0, l0_constraints(prof, 2)).mu;
  const double mu = std::min(mu1, mu2);
  ASSERT_GT(mu, 0.0);
  Rng rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q1 = remove_component(random_bumps(g, rng), c1);
    const auto q2 = remove_component(random_bumps(g, rng), c2);
    const double nq = norm2_sq(q1) + norm2_sq(q2);
    EXPECT_GE(quad_form_q(prof, q1, q2), mu * nq * (1.0 - 1e-9)) << trial;
  }
}

TEST(KernelIdentities, CanonicalAndScalar) {
  for (double th : {kDefaultTheta, 0.0, 0.6}) {
    const auto k = kernel_identities(ground_state_profile(canonical_params(), th, canon()));
    EXPECT_LT(k[0], 1e-9) << th;
    EXPECT_LT(k[1], 1e-9) << th;
    EXPECT_LT(k[2], 1e-9) << th;
  }
}

TEST(KernelIdentities, DetectNonSolution) {
  const auto k = kernel_identities(scaled_amplitude(canonical_profile(), 1.05));
  EXPECT_GT(k[0], 1e-2);
}

TEST(Operators, Symmetric) {
  const auto prof = canonical_profile();
  Rng rng(77);
  for (auto kind : {OperatorKind::L0, OperatorKind::L1, OperatorKind::L2, OperatorKind::L3}) {
    for (int i = 0; i < 4; ++i) {
      const auto f = random_bumps(prof.grid(), rng);
      const auto h = random_bumps(prof.grid(), rng);
      const double a = dot(apply(kind, prof, f), h);
      const double b = dot(f, apply(kind, prof, h));
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST(Rayleigh, UnconstrainedL0FindsGroundStateKernel) {
  const auto prof = canonical_profile();
  const auto res = constrained_rayleigh(prof, QuadraticForm::l0, {});
  EXPECT_NEAR(res.mu, 0.0, 1e-9);
  EXPECT_GT(block_cosine(res.minimizer, BlockField{prof.r1}), 0.999);
}

TEST(Rayleigh, ConstrainedL0IsPositive) {
  const auto prof = canonical_profile();
  const auto res = constrained_rayleigh(prof, QuadraticForm::l0, l0_constraints(prof, 1));
  EXPECT_GT(res.mu, 0.0);
  EXPECT_LE(res.residual, 1e-9);
  const auto& m = res.minimizer[0];
  EXPECT_NEAR(norm2_sq(m), 1.0, 1e-12);
  EXPECT_LT(std::abs(dot(m, l0_constraints(prof, 1)[0][0])), 1e-9);
}

TEST(Rayleigh, PFormMinimumAtTranslationMode) {
  const auto prof = canonical_profile();
  const auto res = constrained_rayleigh(prof, QuadraticForm::p_block, p_constraints(prof));
  EXPECT_GE(res.mu, -1e-8);
  EXPECT_LE(res.mu, 1e-8);
  EXPECT_GT(block_cosine(res.minimizer, BlockField{deriv(prof.r1, 1), deriv(prof.r2, 1)}), 0.999);
}

TEST(Rayleigh, MatchesDenseEigensolveOnSmallGrid) {
  const auto prof = ground_state_profile(canonical_params(), 0.5, PeriodicGrid(256, 40.0));
  const auto& g = prof.grid();

  const auto a0 = dense(g, 1, [&](const BlockField& e) { return BlockField{apply(OperatorKind::L0, prof, e[0])}; });
  const auto cons0 = l0_constraints(prof, 2);
  Eigen::MatrixXd c0(static_cast<Eigen::Index>(g.n()), 1);
  c0.col(0) = flatten(cons0[0]);
  EXPECT_NEAR(constrained_rayleigh(prof, QuadraticForm::l0, cons0).mu, restricted_min(a0, c0), 1e-8);

  const LinearizedOperator l1(OperatorKind::L1, prof), l2(OperatorKind::L2, prof), l3(OperatorKind::L3, prof);
  const auto ap = dense(g, 2, [&](const BlockField& e) {
    return BlockField{apply(l1, e[0]) + apply(l3, e[1]), apply(l3, e[0]) + apply(l2, e[1])};
  });
  const auto consp = p_constraints(prof);
  Eigen::MatrixXd cp(static_cast<Eigen::Index>(2 * g.n()), 2);
  cp.col(0) = flatten(consp[0]);
  cp.col(1) = flatten(consp[1]);
  EXPECT_NEAR(constrained_rayleigh(prof, QuadraticForm::p_block, consp).mu, restricted_min(ap, cp), 1e-8);
}

TEST(Rayleigh, ConstrainedMinimumStableUnderRefinement) {
  const auto coarse = canonical_profile();
  const auto fine = ground_state_profile(canonical_params(), kDefaultTheta, PeriodicGrid(2048, 80.0));
  const double a = constrained_rayleigh(coarse, QuadraticForm::l0, l0_constraints(coarse, 1)).mu;
  const double b = constrained_rayleigh(fine, QuadraticForm::l0, l0_constraints(fine, 1)).mu;
  EXPECT_NEAR(a, b, 0.02 * b);
}

TEST(Rayleigh, RejectsDependentConstraints) {
  const auto prof = canonical_profile();
  const std::vector<BlockField> cons{BlockField{prof.r1}, BlockField{prof.r1 * 2.0}};
  EXPECT_THROW(constrained_rayleigh(prof, QuadraticForm::l0, cons), std::invalid_argument);
  EXPECT_THROW(constrained_rayleigh(prof, QuadraticForm::l0, p_constraints(prof)), std::invalid_argument);
}

TEST(Coupling, ParallelPerpendicularDecouplingOnDiagonalRay) {
  // At theta = pi/4, R1^2 R2 = (R1^2 + R2^2) R2 / 2, so <L3 alpha R1, p> vanishes
  // for p orthogonal to the L0 constraint field of the second component.
  const auto prof = canonical_profile();
  const auto c2 = l0_constraints(prof, 2)[0][0];
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = remove_component(random_bumps(prof.grid(), rng), c2);
    const double alpha = 0.7;
    EXPECT_NEAR(dot(apply(OperatorKind::L3, prof, prof.r1 * alpha), p), 0.0, 1e-10) << trial;
  }
}

TEST(Coupling, MassOrthogonalityAloneDoesNotDecouple) {
  // Orthogonality to R2 alone leaves <R1^2 R2, p> free.
  const auto prof = canonical_profile();
  const auto& g = prof.grid();
  const auto p = remove_component(RealField::from_function(g, [](double x) { return std::pow(sech(x), 3); }), prof.r2);
  EXPECT_LT(std::abs(dot(p, prof.r2)), 1e-12);
  EXPECT_GT(std::abs(dot(apply(OperatorKind::L3, prof, prof.r1), p)), 1e-2);
}
