#include <waveguide/calculus.hpp>
#include <waveguide/carleman.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace waveguide;

namespace {

SpaceTimeGrid bounded_grid(int n = 16) {
  WaveguideDomain d;
  return build_grid(d, n, n, 2 * n);
}

WeightSystem open_weight(int n, double T = 4.0, double lambda = 0.25) {
  WaveguideDomain d;
  d.T = T;
  d.truncated = true;
  WeightParams p;
  p.regime = Regime::Open;
  p.lambda = lambda;
  return assemble_weight(p, build_grid(d, n, n, 2 * n));
}

}  // namespace

TEST(Ratios, Conventions) {
  EXPECT_EQ(empirical_ratio(0.0, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(empirical_ratio(1.0, 0.0)));
  EXPECT_DOUBLE_EQ(empirical_ratio(2.0, 4.0), 0.5);
}

TEST(Ratios, LogLogSlopeOfPowerLaw) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 0.75, 0.1875, 0.046875}), -2.0, 1e-12);
  EXPECT_NEAR(loglog_slope({4, 8, 16}, {1, 8, 64}), 3.0, 1e-12);
}

TEST(Ratios, EmpiricalS0) {
  EXPECT_EQ(empirical_s0({5, 4, 3, 2}), std::optional<std::size_t>(0));
  EXPECT_EQ(empirical_s0({1, 2, 3, 2, 1}), std::optional<std::size_t>(2));
  EXPECT_EQ(empirical_s0({4, 4.3, 4.6}), std::optional<std::size_t>(0));
  EXPECT_EQ(empirical_s0({1, 2, 3}), std::nullopt);
  EXPECT_EQ(empirical_s0({1}), std::nullopt);
}

TEST(Damping, ShiftIsRecordedInLogScale) {
  const WeightSystem ws = assemble_weight(WeightParams{}, bounded_grid());
  const ShiftedDamping d = shifted_damping(ws, 3.0);
  EXPECT_NEAR(d.field.max_abs(), 1.0, 1e-15);
  // exp(log_scale) * shifted = exp(-2 s w) wherever the latter is representable
  const Index k = 8, i = 4, j = 9;
  EXPECT_NEAR(std::log(d.field(k, i, j)) + d.log_scale, -6.0 * ws.weight(k, i, j), 1e-9);
  EXPECT_EQ(d.field.level(0).abs().maxCoeff(), 0.0);
}

TEST(WeightedNorm, QuadraticInZ) {
  const SpaceTimeGrid g = bounded_grid();
  const WeightSystem ws = assemble_weight(WeightParams{}, g);
  const BumpFunction bump = sigma_vanishing_bumps(g).front();
  const I1Terms one = weighted_norm_I1(bump.z, ws, 2.0);
  const I1Terms two = weighted_norm_I1(2.0 * bump.z, ws, 2.0);
  EXPECT_GT(one.total(), 0.0);
  EXPECT_NEAR(two.total() / one.total(), 4.0, 1e-12);
  EXPECT_EQ(weighted_norm_I1(ScalarField::full(g), ws, 2.0).total(), 0.0);
}

TEST(Lemmas, BoundedSweepIsFiniteAndSUniform) {
  const SpaceTimeGrid g = bounded_grid();
  const WeightSystem ws = assemble_weight(WeightParams{}, g);
  const InequalityReport r = lemma_bounded_check(random_smooth_field(g, 3), ws, {1, 2, 4, 8, 16});
  ASSERT_EQ(r.sweep.size(), 5u);
  EXPECT_TRUE(*r.flag("finite"));
  EXPECT_TRUE(*r.flag("s_uniform"));
  EXPECT_LE(*r.metric("C_growth"), 2.0);
  EXPECT_THROW(lemma_open_check(random_smooth_field(g, 3), ws, {1, 2}), std::invalid_argument);
}

TEST(Lemmas, OpenRatioDecaysLikeInverseSquare) {
  WaveguideDomain d;
  d.truncated = true;
  d.alpha = -1.0 + 2.0 / 161;
  const SpaceTimeGrid g = build_grid(d, 160, 16, 32);
  WeightParams p;
  p.regime = Regime::Open;
  const WeightSystem ws = assemble_weight(p, g);
  const InequalityReport r = lemma_open_check(random_smooth_field(g, 1), ws, {4, 8, 16, 32, 64});
  EXPECT_GE(*r.metric("slope"), -2.5);
  EXPECT_LE(*r.metric("slope"), -1.5);
}

TEST(RandomField, SeedDeterminesField) {
  const SpaceTimeGrid g = bounded_grid(8);
  EXPECT_TRUE((random_smooth_field(g, 5).values() == random_smooth_field(g, 5).values()).all());
  EXPECT_GT((random_smooth_field(g, 5) - random_smooth_field(g, 6)).max_abs(), 1e-3);
  EXPECT_THROW(random_smooth_field(g, 5, 0), std::invalid_argument);
}

TEST(Bumps, VanishOnBoundaryAndCarryTheirOperator) {
  std::vector<double> previous;
  for (int n : {16, 32}) {
    const SpaceTimeGrid g = bounded_grid(n);
    std::vector<double> errors;
    for (const BumpFunction& b : sigma_vanishing_bumps(g)) {
      for (Segment s : {Segment::Bottom, Segment::Top, Segment::Left, Segment::Right})
        EXPECT_LT(trace_of(b.z, s).max_abs(), 1e-12) << b.name;
      errors.push_back((time_derivative(b.z) - laplacian(b.z) - b.Pz).max_abs());
      errors.push_back((partial(b.z, Axis::X1) - b.z_x1).max_abs());
      errors.push_back((partial(b.z, Axis::X2) - b.z_x2).max_abs());
    }
    for (std::size_t m = 0; m < previous.size(); ++m) EXPECT_GT(previous[m] / errors[m], 3.3) << m;
    previous = errors;
  }
}

TEST(Carleman, BoundedBumpSweep) {
  const SpaceTimeGrid g = bounded_grid(16);
  const WeightSystem ws = assemble_weight(WeightParams{}, g);
  const BumpFunction b = sigma_vanishing_bumps(g).front();
  const InequalityReport r = carleman_check_bounded(b.z, b.Pz, ws, {1, 2, 4, 8}, {1.0, 1.5});
  EXPECT_EQ(r.sweep.size(), 8u);
  EXPECT_TRUE(*r.flag("finite"));
  EXPECT_TRUE(r.metric("s0_lambda0").has_value());
  EXPECT_TRUE(r.metric("s0_lambda1").has_value());
}

TEST(Carleman, RejectsFieldsNotVanishingOnBoundary) {
  const SpaceTimeGrid g = bounded_grid(8);
  const WeightSystem ws = assemble_weight(WeightParams{}, g);
  const ScalarField one = ScalarField::full(g, 1.0);
  EXPECT_THROW(carleman_check_bounded(one, one, ws, {1, 2}), std::invalid_argument);
}

TEST(Conjugation, ZeroParameterIsExactlyTheHeatOperator) {
  const WeightSystem ws = open_weight(16);
  const BumpFunction b = compact_bump(ws.grid);
  const ConjugatedParts parts = conjugated_operator(b.z, ws, 0.0);
  EXPECT_EQ(parts.residual.max_abs(), 0.0);
  EXPECT_LT((parts.Mw - (time_derivative(b.z) - laplacian(b.z))).max_abs(), 1e-12);
}

TEST(Conjugation, ResidualMatchesProductRule) {
  double previous = 0.0;
  for (int n : {32, 64}) {
    const WeightSystem ws = open_weight(n);
    const BumpFunction b = compact_bump(ws.grid);
    const ScalarField oracle = decomposition_residual_oracle(ws, 1.0, b.z, b.z_x1, b.z_x2);
    const double err = (conjugated_operator(b.z, ws, 1.0).residual - oracle).max_abs();
    EXPECT_LT(err, 0.05 * oracle.max_abs());
    if (previous > 0.0) EXPECT_GT(previous / err, 3.0);
    previous = err;
  }
}

TEST(Conjugation, LargeParameterOverflows) {
  const WeightSystem ws = open_weight(8, 1.0, 2.0);
  const BumpFunction b = compact_bump(ws.grid);
  EXPECT_THROW(conjugated_operator(b.z, ws, 1e4), WeightOverflow);
}
