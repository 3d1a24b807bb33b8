#include <gtest/gtest.h>

#include "gpe2d/errors.hpp"
#include "gpe2d/minimize.hpp"
#include "oracles.hpp"

using namespace gpe2d;

namespace {

double off_mode_mass(const CoefficientField& f, int a, int b) { return f.mass() - f.coeffs()(a, b) * f.coeffs()(a, b); }

}  // namespace

TEST(Minimize, ConfigValidation) {
  EXPECT_NO_THROW(SolverConfig{}.validate());
  SolverConfig c;
  c.grad_tol = 0.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = {};
  c.backtrack_factor = 1.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = {};
  c.armijo_c = 0.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = {};
  c.max_newton_iters = 0;
  EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(Minimize, ScheduleRampsRhoThenTheta) {
  SystemParams p;
  p.theta = {{{40.0, 8.0}, {8.0, 20.0}}};
  SolverConfig c;
  c.continuation_steps_rho = 4;
  c.continuation_steps_theta = 5;
  const auto s = continuation_schedule(p, c);
  ASSERT_EQ(s.size(), 4u + 5u);
  EXPECT_EQ(s.front().rho, 0.25);
  EXPECT_EQ(s.front().theta[0][0], 0.0);
  for (std::size_t k = 1; k < s.size(); ++k) {
    EXPECT_GE(s[k].rho, s[k - 1].rho);
    EXPECT_GE(s[k].theta[0][0], s[k - 1].theta[0][0]);
  }
  EXPECT_EQ(s[3].rho, 1.0);
  EXPECT_EQ(s[3].theta[0][0], 0.0);
  EXPECT_EQ(s.back(), p);
  const auto linear = continuation_schedule(SystemParams{}, c);
  EXPECT_EQ(linear.size(), 4u);
  EXPECT_EQ(linear.back(), SystemParams{});
}

TEST(Minimize, LinearLimitIsExact) {
  const auto b = make_basis({16, 1.0}, {16, 1.0});
  const auto sol = solve_ground(SystemParams{}, b, SolverConfig{});
  ASSERT_TRUE(sol.report.converged);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(sol.report.energies_per_component[i], 1.0, 1e-12);
    EXPECT_NEAR(sol.report.chemical_potentials[i], 1.0, 1e-12);
    EXPECT_LT(off_mode_mass(sol.fields[i], 0, 0), 1e-12);
    EXPECT_GT(sol.fields[i].coeffs()(0, 0), 0.0);
  }
}

TEST(Minimize, HeavierComponentWithMatchedScale) {
  // m = 2, omega = 1: ground state width matches beta^2 = m omega.
  const double beta = std::sqrt(2.0);
  const auto b = make_basis({12, beta}, {12, beta});
  SystemParams p;
  p.m = {2.0, 2.0};
  const auto sol = solve_ground(p, b, SolverConfig{});
  ASSERT_TRUE(sol.report.converged);
  EXPECT_NEAR(sol.report.energies_per_component[0], 1.0, 1e-10);
  EXPECT_NEAR(sol.report.chemical_potentials[1], 1.0, 1e-10);
}

TEST(Minimize, HeavierComponentWithMismatchedScale) {
  const auto b = make_basis({16, 1.0}, {16, 1.0});
  SystemParams p;
  p.m = {2.0, 1.0};
  p.omega[1] = {1.5, 0.5};
  const auto sol = solve_ground(p, b, SolverConfig{});
  ASSERT_TRUE(sol.report.converged);
  // Width mismatch leaves a small truncation error at L = 16.
  EXPECT_NEAR(sol.report.energies_per_component[0], 1.0, 1e-6);
  EXPECT_NEAR(sol.report.energies_per_component[1], 1.0, 1e-6);
}

TEST(Minimize, DisplacedTrapInLinearLimit) {
  const auto b = make_basis({24, 1.0}, {24, 1.0});
  SystemParams p;
  p.centers[0] = {1.0, 0.0};
  p.N = {2.0, 1.0};
  const auto sol = solve_ground(p, b, SolverConfig{});
  ASSERT_TRUE(sol.report.converged);
  EXPECT_NEAR(sol.report.energies_per_component[0], 2.0, 1e-8);
  EXPECT_NEAR(sol.report.chemical_potentials[0], 1.0, 1e-8);
}

TEST(Minimize, InteractingStateIsStationaryAndMassConserving) {
  const auto b = make_basis({16, 1.0}, {16, 1.0});
  SystemParams p;
  p.theta = {{{60.0, 20.0}, {20.0, 30.0}}};
  p.centers = {{{0.5, 0.0}, {-0.5, 0.0}}};
  const auto sol = solve_ground(p, b, SolverConfig{});
  ASSERT_TRUE(sol.report.converged);
  const DiscreteEnergy en(b, p);
  EXPECT_LE(stationarity_residual(en, sol.fields), 1e-8);
  const auto mu = en.chemical_potentials(sol.fields);
  const auto g = en.gradient(sol.fields);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(sol.fields[i].mass(), 1.0, 1e-10);
    const double r = (0.5 * g[i] - mu[i] * sol.fields[i].coeffs()).norm();
    EXPECT_LE(r, 1e-8 * std::abs(mu[i]));
  }
  // The ground state beats every random competitor on the mass sphere.
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    Fields f{oracle::random_field(b, 1.0, rng), oracle::random_field(b, 1.0, rng)};
    EXPECT_GT(en.evaluate(f).total, sol.report.energy);
  }
}

TEST(Minimize, RepulsionRaisesEnergyAndMu) {
  const auto b = make_basis({16, 1.0}, {16, 1.0});
  double last = 0.0;
  for (double th : {0.0, 10.0, 40.0}) {
    SystemParams p;
    p.theta = {{{th, 0.0}, {0.0, th}}};
    const auto sol = solve_ground(p, b, SolverConfig{});
    ASSERT_TRUE(sol.report.converged);
    EXPECT_GT(sol.report.energy, last);
    if (th > 0.0) EXPECT_GT(sol.report.chemical_potentials[0], sol.report.energies_per_component[0]);
    last = sol.report.energy;
  }
}

TEST(Minimize, NewtonStepsDecreaseMerit) {
  const auto b = make_basis({10, 1.0}, {10, 1.0});
  SystemParams p;
  p.theta = {{{20.0, 5.0}, {5.0, 10.0}}};
  const DiscreteEnergy en(b, p);
  std::mt19937_64 rng(43);
  Fields f{oracle::random_field(b, 1.0, rng), oracle::random_field(b, 1.0, rng)};
  const auto st = solve_stage(en, f, 1e-9, SolverConfig{});
  EXPECT_TRUE(st.converged);
  ASSERT_GE(st.merit_history.size(), 2u);
  for (std::size_t k = 1; k < st.merit_history.size(); ++k)
    EXPECT_LE(st.merit_history[k], st.merit_history[k - 1] + 1e-12);
  const auto lam = update_multiplier(en, f);
  const auto step = newton_step(en, f, lam, SolverConfig{});
  EXPECT_LT(step.merit_after, step.merit_before);
  EXPECT_GT(step.step_size, 0.0);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(step.fields[i].mass(), 1.0, 1e-12);
}

TEST(Minimize, IterationBudgetExhaustionIsReported) {
  const auto b = make_basis({16, 1.0}, {16, 1.0});
  SystemParams p;
  p.theta = {{{100.0, 0.0}, {0.0, 100.0}}};
  SolverConfig c;
  c.max_newton_iters = 2;
  c.continuation_steps_theta = 1;
  const auto sol = solve_ground(p, b, c);
  EXPECT_FALSE(sol.report.converged);
  EXPECT_THROW(require_converged(sol), NonConvergence);
  try {
    require_converged(sol);
  } catch (const NonConvergence& e) {
    EXPECT_GT(e.residual(), c.grad_tol);
  }
}

TEST(Minimize, SolveIsDeterministic) {
  const auto b = make_basis({12, 1.0}, {12, 1.0});
  SystemParams p;
  p.theta = {{{30.0, 10.0}, {10.0, 15.0}}};
  const auto s1 = solve_ground(p, b, SolverConfig{});
  const auto s2 = solve_ground(p, b, SolverConfig{});
  EXPECT_EQ(s1.report.energy, s2.report.energy);
  EXPECT_TRUE(s1.fields[0].coeffs() == s2.fields[0].coeffs());
  EXPECT_TRUE(s1.fields[1].coeffs() == s2.fields[1].coeffs());
}

TEST(Minimize, MirrorSymmetricTrapsGiveEqualComponents) {
  const auto b = make_basis({20, 1.0}, {12, 1.0});
  SystemParams p;
  p.theta = {{{40.0, 10.0}, {10.0, 40.0}}};
  p.centers = {{{1.5, 0.0}, {-1.5, 0.0}}};
  const auto sol = solve_ground(p, b, SolverConfig{});
  ASSERT_TRUE(sol.report.converged);
  EXPECT_NEAR(sol.report.energies_per_component[0], sol.report.energies_per_component[1], 1e-8);
}

TEST(Minimize, ExcitedStateKeepsNodeAndSitsAboveGround) {
  const auto b = make_basis({16, 1.0}, {16, 1.0});
  SystemParams p;
  p.theta = {{{20.0, 0.0}, {0.0, 5.0}}};
  const auto g = solve_ground(p, b, SolverConfig{});
  InitialGuess guess{{{{1, 0}, {0, 0}}}};
  const auto e = solve_excited(p, b, SolverConfig{}, guess, g.report.energy);
  ASSERT_TRUE(e.report.converged);
  EXPECT_FALSE(e.collapsed_to_ground);
  EXPECT_GT(e.report.energy, g.report.energy + 0.5);
  // Odd in x1: every even-l1 coefficient vanishes.
  for (int a = 0; a < 16; a += 2) EXPECT_EQ(e.fields[0].coeffs().row(a).norm(), 0.0);
  EXPECT_NEAR(e.report.energies_per_component[1], g.report.energies_per_component[1], 1e-8);
}

TEST(Minimize, ExcitedLinearModeHasOscillatorEnergy) {
  const auto b = make_basis({8, 1.0}, {8, 1.0});
  InitialGuess guess{{{{2, 1}, {0, 3}}}};
  const auto e = solve_excited(SystemParams{}, b, SolverConfig{}, guess);
  ASSERT_TRUE(e.report.converged);
  EXPECT_NEAR(e.report.energies_per_component[0], 4.0, 1e-10);
  EXPECT_NEAR(e.report.energies_per_component[1], 4.0, 1e-10);
}

TEST(Minimize, ContinuationToNewParameters) {
  const auto b = make_basis({14, 1.0}, {14, 1.0});
  SystemParams p;
  p.theta = {{{20.0, 0.0}, {0.0, 20.0}}};
  const auto start = solve_ground(p, b, SolverConfig{});
  SystemParams q = p;
  q.set_coupling(15.0);
  const auto moved = continue_solution(start, p, q, b, SolverConfig{});
  const auto fresh = solve_ground(q, b, SolverConfig{});
  ASSERT_TRUE(moved.report.converged);
  EXPECT_NEAR(moved.report.energy, fresh.report.energy, 1e-9);
  const auto path = continue_path(b, p, q, start.fields, 1e-9, SolverConfig{});
  EXPECT_TRUE(path.converged);
  EXPECT_LE(path.residual, 1e-9);
}

TEST(Minimize, FixSignMakesPeakPositive) {
  const auto b = make_basis({4, 1.0}, {4, 1.0});
  Fields f{CoefficientField::mode(b, 0, 0, 1.0), CoefficientField::mode(b, 1, 0, 1.0)};
  f[0].coeffs() *= -1.0;
  fix_sign(f);
  EXPECT_GT(f[0].coeffs()(0, 0), 0.0);
  EXPECT_GT(values_on_quartic_grid(f[0]).maxCoeff(), 0.0);
}

TEST(Minimize, InvalidInputsAreRejected) {
  const auto b = make_basis({4, 1.0}, {4, 1.0});
  SystemParams p;
  p.N[1] = 0.0;
  EXPECT_THROW(solve_ground(p, b, SolverConfig{}), InvalidParameter);
  InitialGuess guess{{{{9, 0}, {0, 0}}}};
  EXPECT_THROW(solve_excited(SystemParams{}, b, SolverConfig{}, guess), InvalidParameter);
}

TEST(Minimize, DisplacedStrongCouplingSeparatesPhases) {
  const auto b = make_basis({32, 1.0}, {32, 1.0});
  SystemParams p;
  p.theta = {{{850.0, 210.0}, {210.0, 18.0}}};
  p.centers[0] = {4.0, 0.0};
  const auto coupled = solve_ground(p, b, SolverConfig{});
  p.set_coupling(0.0);
  const auto free = solve_ground(p, b, SolverConfig{});
  ASSERT_TRUE(coupled.report.converged);
  ASSERT_TRUE(free.report.converged);
  EXPECT_LT(coupled.report.overlap_integral, 0.1 * free.report.overlap_integral);
}
