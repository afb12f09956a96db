#include <waveguide/calculus.hpp>
#include <waveguide/weights.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace waveguide;

namespace {

SpaceTimeGrid bounded_grid(double alpha = 0.0, Side observed = Side::Top) {
  WaveguideDomain d;
  d.alpha = alpha;
  d.observed = observed;
  return build_grid(d, 24, 16, 20);
}

SpaceTimeGrid open_grid(double R = 1.0) {
  WaveguideDomain d;
  d.L = R;
  d.truncated = true;
  return build_grid(d, 24, 16, 20);
}

WeightSystem bounded(double alpha = 0.0, Side observed = Side::Top) {
  return assemble_weight(WeightParams{}, bounded_grid(alpha, observed));
}

const BulletCheck& bullet(const AssumptionReport& r, const std::string& name) {
  for (const auto& b : r.bullets)
    if (b.name == name) return b;
  throw std::runtime_error("no bullet " + name);
}

}  // namespace

TEST(Profiles, Psi1ClosedFormForCentredAnchor) {
  WaveguideDomain d;
  const Profile p = make_psi1(d, 0.5);
  for (double x : {-1.0, -0.4, 0.0, 0.3, 1.0}) {
    EXPECT_NEAR(p.value(x), 0.5 + x * x / 2 - x * x * x * x / 4, 1e-14);
    EXPECT_NEAR(p.slope(x), x * (1 - x * x), 1e-14);
    EXPECT_NEAR(p.curvature(x), 1 - 3 * x * x, 1e-14);
  }
}

TEST(Profiles, Psi1MinimumSitsAtAnchor) {
  WaveguideDomain d;
  d.alpha = 0.3;
  const Profile p = make_psi1(d, 0.7);
  EXPECT_NEAR(p.value(0.3), 0.7, 1e-14);
  EXPECT_NEAR(p.slope(0.3), 0.0, 1e-14);
  for (double x = -1.0; x <= 1.0; x += 0.05) EXPECT_GE(p.value(x), 0.7 - 1e-14);
  const double h = 1e-5;
  EXPECT_NEAR((p.value(0.8 + h) - p.value(0.8 - h)) / (2 * h), p.slope(0.8), 1e-8);
}

TEST(Profiles, Psi2FollowsObservedSide) {
  WaveguideDomain d;
  d.h = 2.0;
  EXPECT_DOUBLE_EQ(make_psi2(d, 0.5).value(0.0), 0.5);
  EXPECT_DOUBLE_EQ(make_psi2(d, 0.5).value(2.0), 2.5);
  d.observed = Side::Bottom;
  EXPECT_DOUBLE_EQ(make_psi2(d, 0.5).value(0.0), 2.5);
  EXPECT_DOUBLE_EQ(make_psi2(d, 0.5).slope(1.0), -1.0);
}

TEST(WeightSystem, BoundedWeightMatchesFormula) {
  const WeightSystem ws = bounded();
  const SpaceTimeGrid& g = ws.grid;
  const double T = g.domain().T;
  const Index k = 7, i = 5, j = 11;
  const double t = g.t(k);
  const double psi = ws.psi1.value(g.x1(i)) * ws.psi2.value(g.x2(j));
  // alpha snaps off 0, so the largest psi1 sits at one of the caps
  const double sup = std::max(ws.psi1.value(-1.0), ws.psi1.value(1.0)) * 1.5;
  EXPECT_NEAR(ws.psi_sup, sup, 1e-14);
  EXPECT_NEAR(ws.weight(k, i, j), (std::exp(2 * sup) - std::exp(psi)) / (t * (T - t)), 1e-12);
  EXPECT_EQ(ws.g(0), 0.0);
  EXPECT_EQ(ws.g(g.levels() - 1), 0.0);
  EXPECT_EQ(ws.weight.level(0).abs().maxCoeff(), 0.0);
}

TEST(WeightSystem, DampingVanishesAtEndpoints) {
  const WeightSystem ws = bounded();
  const ScalarField d = ws.damping(2.0);
  EXPECT_EQ(d.level(0).abs().maxCoeff(), 0.0);
  EXPECT_EQ(d.level(ws.grid.levels() - 1).abs().maxCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(d(5, 3, 4), std::exp(-4.0 * ws.weight(5, 3, 4)));
  EXPECT_DOUBLE_EQ(ws.half_damping(2.0)(5, 3, 4), std::exp(-2.0 * ws.weight(5, 3, 4)));
}

TEST(WeightSystem, ClosedFormDerivativesAgreeWithStencils) {
  // stencil minus closed form must fall at second order; the open weight is steep so start at n = 48
  for (Regime regime : {Regime::Bounded, Regime::Open}) {
    double previous[3] = {0, 0, 0};
    for (int n : {48, 96}) {
      WaveguideDomain d;
      d.truncated = regime == Regime::Open;
      WeightParams p;
      p.regime = regime;
      p.lambda = 0.5;
      const WeightSystem ws = assemble_weight(p, build_grid(d, n, n, 20));
      const WeightDerivatives dw = weight_derivatives(ws);
      const Index k = 10;
      const double err[3] = {(partial(ws.weight, Axis::X1).level(k) - dw.dx1.level(k)).abs().maxCoeff(),
                             (partial(ws.weight, Axis::X2).level(k) - dw.dx2.level(k)).abs().maxCoeff(),
                             (laplacian(ws.weight).level(k) - dw.lap.level(k)).abs().maxCoeff()};
      for (int c = 0; c < 3; ++c) {
        if (previous[c] > 0.0) EXPECT_GT(previous[c] / err[c], 3.3) << to_string(regime) << " component " << c;
        previous[c] = err[c];
      }
    }
  }
}

TEST(Assumptions, DefaultBoundedWeightPassesAllBullets) {
  for (Side side : {Side::Top, Side::Bottom}) {
    const AssumptionReport r = check_assumption_bounded(bounded(0.2, side));
    EXPECT_TRUE(r.all_passed());
    EXPECT_EQ(r.bullets.size(), 5u);
    EXPECT_NEAR(r.min_psi, 0.25, 1e-12);
    EXPECT_GE(r.min_grad_psi, 0.45);
    EXPECT_LE(r.max_normal_psi_unobserved, 0.0);
  }
}

TEST(Assumptions, FlatAxialProfileFailsMonotonicity) {
  const SpaceTimeGrid g = bounded_grid();
  const WeightSystem ws = assemble_weight(WeightParams{}, g, Profile::constant(1.0), make_psi2(g.domain(), 0.5));
  const AssumptionReport r = check_assumption_bounded(ws);
  EXPECT_FALSE(r.all_passed());
  EXPECT_FALSE(bullet(r, "decreasing-left").passed);
  EXPECT_FALSE(bullet(r, "increasing-right").passed);
  EXPECT_TRUE(bullet(r, "positivity").passed);
}

TEST(Assumptions, WrongSidedPsi2FailsNormalSign) {
  const SpaceTimeGrid g = bounded_grid();
  WaveguideDomain flipped = g.domain();
  flipped.observed = Side::Bottom;
  const WeightSystem ws = assemble_weight(WeightParams{}, g, make_psi1(g.domain(), 0.5), make_psi2(flipped, 0.5));
  EXPECT_FALSE(bullet(check_assumption_bounded(ws), "normal-sign").passed);
}

TEST(Assumptions, OpenWeightOnTruncatedStrip) {
  WeightParams p;
  p.regime = Regime::Open;
  const AssumptionReport r = check_assumption_open(assemble_weight(p, open_grid(2.0)));
  EXPECT_TRUE(r.all_passed());
  EXPECT_NEAR(r.kappa, std::exp(-2.0) * 0.5, 1e-14);
  EXPECT_GE(r.min_dx1_psi, r.kappa - 1e-14);
  const BulletCheck& growth = bullet(r, "superlinear-growth");
  EXPECT_FALSE(growth.verifiable);
  EXPECT_TRUE(r.unbounded_strip_flag);
}

TEST(Assumptions, OpenRegimeNeedsTruncatedGrid) {
  WeightParams p;
  p.regime = Regime::Open;
  EXPECT_THROW(assemble_weight(p, bounded_grid()), std::invalid_argument);
  p.lambda = -1.0;
  EXPECT_THROW(assemble_weight(p, open_grid()), std::invalid_argument);
}

TEST(TransferRatio, GrowsAwayFromAMinimumOfPsi1) {
  // eta decreases where psi grows, so with psi1 minimal at alpha the ratio exceeds 1.
  const RatioScan scan = scan_transfer_ratio(bounded(), 1.0);
  EXPECT_GT(scan.max_log_r, 0.0);
}

TEST(TransferRatio, BoundedByOneWhenPsi1PeaksAtAnchor) {
  const SpaceTimeGrid g = bounded_grid();
  Profile peak{[](double x) { return 2.0 - x * x; }, [](double x) { return -2.0 * x; },
               [](double) { return -2.0; }};
  const WeightSystem ws = assemble_weight(WeightParams{}, g, peak, make_psi2(g.domain(), 0.5));
  EXPECT_LE(scan_transfer_ratio(ws, 4.0).max_log_r, 1e-12);
}
