#include <waveguide/calculus.hpp>
#include <waveguide/forward.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace waveguide;

namespace {

constexpr double pi = std::numbers::pi;

PotentialSpec zero_potential(const SpaceTimeGrid& g) {
  return PotentialSpec::sample(g, [](double, double) { return 0.0; }, [](double) { return 1.0; });
}

}  // namespace

TEST(Forward, SteadyLinearProfileIsReproducedExactly) {
  // u = 1 + x2 is harmonic, constant in time and has zero x1-slope at the caps.
  WaveguideDomain d;
  const SpaceTimeGrid g = build_grid(d, 8, 8, 8);
  auto exact = [](double, double, double x2) { return 1.0 + x2; };
  const ScalarField u = solve_heat(g, zero_potential(g),
                                   BoundaryData::from_exact(g, exact, [](double, double, double) { return 0.0; }));
  EXPECT_LT((u - ScalarField::full_from(g, exact)).max_abs(), 1e-13);
}

TEST(Forward, SeparableOracleConvergesAtSecondOrder) {
  WaveguideDomain d;
  const SeparableOracle oracle{d, 0.5};
  double previous = 0.0;
  for (int n : {8, 16, 32}) {
    const SpaceTimeGrid g = build_grid(d, n, n, 4 * n);
    const double e = relative_l2_error(solve_heat(g, oracle.potential(g), oracle.data(g)), oracle.exact(g));
    if (previous > 0.0) EXPECT_GT(previous / e, 3.3);
    previous = e;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Forward, OracleClosedFormsAgree) {
  WaveguideDomain d;
  d.L = 1.5;
  d.h = 0.8;
  d.T = 2.0;
  const SeparableOracle o{d, 0.5};
  EXPECT_NEAR(o.mu(), std::pow(pi / 3.0, 2) + std::pow(pi / 0.8, 2), 1e-12);
  const double h = 1e-6;
  EXPECT_NEAR((o.q_integral(0.7 + h) - o.q_integral(0.7 - h)) / (2 * h), o.q(0.7), 1e-8);
  EXPECT_NEAR((o.value(0.3, 0.2 + h, 0.5) - o.value(0.3, 0.2 - h, 0.5)) / (2 * h), o.dx1(0.3, 0.2, 0.5), 1e-8);
  EXPECT_NEAR((o.dx1(0.3, 0.2, 0.5 + h) - o.dx1(0.3, 0.2, 0.5 - h)) / (2 * h), o.dx1dx2(0.3, 0.2, 0.5), 1e-7);
  EXPECT_NEAR(o.dx1(0.4, d.L, 0.3), 0.0, 1e-14);
}

TEST(Forward, MeasurementApproximatesOracleTrace) {
  WaveguideDomain d;
  const SeparableOracle o{d, 0.5};
  const SpaceTimeGrid g = build_grid(d, 32, 32, 64);
  const ScalarField m = measurement(solve_heat(g, o.potential(g), o.data(g)));
  double worst = 0.0, scale = 0.0;
  for (Index k = 0; k < g.levels(); ++k)
    for (Index i = 0; i < g.nodes1(); ++i) {
      const double exact = o.dx1dx2(g.t(k), g.x1(i), d.h);  // outward normal is +x2 on the top wall
      worst = std::max(worst, std::abs(m.values()(k * g.nodes1() + i) - exact));
      scale = std::max(scale, std::abs(exact));
    }
  EXPECT_LT(worst, 0.02 * scale);
}

TEST(Forward, TruncatedModeUsesDirichletCaps) {
  WaveguideDomain d;
  d.truncated = true;
  const double rate = 1.0 + pi * pi;
  auto exact = [=](double t, double x1, double x2) { return std::exp(-rate * t) * std::cos(x1) * std::sin(pi * x2); };
  auto dx1 = [=](double t, double x1, double x2) { return -std::exp(-rate * t) * std::sin(x1) * std::sin(pi * x2); };
  // fine time steps keep the spatial error dominant, at nt = 4n the two partly cancel
  double previous = 0.0;
  for (int n : {16, 32}) {
    const SpaceTimeGrid g = build_grid(d, n, n, 16 * n);
    const BoundaryData data = BoundaryData::from_exact(g, exact, dx1);
    EXPECT_EQ(data.caps, CapCondition::Dirichlet);
    const double e = relative_l2_error(solve_heat(g, zero_potential(g), data), ScalarField::full_from(g, exact));
    if (previous > 0.0) EXPECT_GT(previous / e, 3.3);
    previous = e;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Forward, BackwardEulerStartupStaysSecondOrder) {
  // two implicit Euler steps add an O(dt^2) error that is larger than the Crank-Nicolson one
  WaveguideDomain d;
  const SeparableOracle o{d, 0.5};
  double previous = 0.0, plain = 0.0;
  for (int n : {16, 32}) {
    const SpaceTimeGrid g = build_grid(d, n, n, 4 * n);
    const double e = relative_l2_error(solve_heat(g, o.potential(g), o.data(g), SolverOptions{2}), o.exact(g));
    if (previous > 0.0) EXPECT_GT(previous / e, 3.3);
    previous = e;
    plain = relative_l2_error(solve_heat(g, o.potential(g), o.data(g)), o.exact(g));
  }
  EXPECT_LT(plain, previous);
}

TEST(Forward, PositiveDataAreCompatibleAndPositive) {
  WaveguideDomain d;
  const SpaceTimeGrid g = build_grid(d, 16, 16, 32);
  const PotentialSpec pot = PotentialSpec::sample(
      g, [](double t, double x2) { return 0.5 + t * x2; }, [](double x1) { return 1.0 + 0.2 * x1 * x1; });
  for (const InitialProfile& init : {unit_initial(), cosine_initial(1.0, 0.2)}) {
    const BoundaryData data = make_positive_data(g, pot, init);
    EXPECT_LT(compatibility_residual(g, pot, data), 1e-10) << init.name;
    EXPECT_GT(solve_heat(g, pot, data).values().minCoeff(), 0.0) << init.name;
  }
}

TEST(Forward, CompatibilityResidualDetectsMismatch) {
  WaveguideDomain d;
  const SpaceTimeGrid g = build_grid(d, 16, 16, 32);
  const PotentialSpec pot = zero_potential(g);
  BoundaryData data = make_positive_data(g, pot, unit_initial());
  EXPECT_LT(compatibility_residual(g, pot, data), 1e-12);
  for (Index k = 0; k < g.levels(); ++k)
    for (Index i = 0; i < g.nodes1(); ++i) data.b_top(k, i, 0) += g.t(k);  // d_t b jumps by 1
  data.rate0_top = Eigen::ArrayXd();
  EXPECT_NEAR(compatibility_residual(g, pot, data), 1.0, 1e-6);
}

TEST(Forward, PairNeedsMatchingInitialPotential) {
  WaveguideDomain d;
  const SpaceTimeGrid g = build_grid(d, 8, 8, 16);
  const ScalarField q = ScalarField::cross_section_from(g, [](double t, double) { return t; });
  const ScalarField bad = ScalarField::cross_section_from(g, [](double t, double) { return 1.0 + t; });
  const Eigen::ArrayXd f = Eigen::ArrayXd::Ones(g.nodes1());
  EXPECT_THROW(manufacture_pair(g, q, bad, f, unit_initial()), std::invalid_argument);
  const PairSolution pair = manufacture_pair(g, q, q, f, unit_initial());
  EXPECT_LT((pair.u - pair.u_tilde).max_abs(), 1e-14);
}

TEST(Forward, RejectsInvalidPotential) {
  WaveguideDomain d;
  const SpaceTimeGrid g = build_grid(d, 8, 8, 16);
  PotentialSpec pot = zero_potential(g);
  pot.f(3) = -1.0;
  EXPECT_THROW(pot.validate(g), std::invalid_argument);
  pot.f(3) = 1.0;
  pot.q(2, 0, 2) = NAN;
  EXPECT_THROW(solve_heat(g, pot, make_positive_data(g, zero_potential(g), unit_initial())), std::invalid_argument);
}
