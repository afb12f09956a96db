#include <waveguide/weights.hpp>
#include <waveguide/field_io.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace waveguide {

namespace {

constexpr double kUnderflow = 1e-300;

double time_profile(double t, double T) { return 1.0 / (t * (T - t)); }

double time_profile_rate(double t, double T) {
  const double g = time_profile(t, T);
  return -(T - 2.0 * t) * g * g;
}

}  // namespace

std::string to_string(Regime regime) { return regime == Regime::Bounded ? "bounded" : "open"; }

Regime regime_from_string(const std::string& text) {
  if (text == "bounded") return Regime::Bounded;
  if (text == "open") return Regime::Open;
  throw std::invalid_argument("unknown regime '" + text + "'");
}

void WeightParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("weights: lambda must be positive");
  if (!(s > 0.0)) throw std::invalid_argument("weights: s must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("weights: delta must be positive");
  if (!(c1 > 0.0)) throw std::invalid_argument("weights: c1 must be positive");
}

Profile Profile::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

Profile make_psi2(const WaveguideDomain& domain, double delta) {
  const double h = domain.h;
  if (domain.observed == Side::Top)
    return {[delta](double x2) { return x2 + delta; }, [](double) { return 1.0; },
            [](double) { return 0.0; }};
  return {[h, delta](double x2) { return h - x2 + delta; }, [](double) { return -1.0; },
          [](double) { return 0.0; }};
}

Profile make_psi1(const WaveguideDomain& domain, double c1) {
  const double L = domain.L;
  const double a = domain.alpha;
  if (!(a > -L && a < L)) throw std::invalid_argument("make_psi1: alpha must lie in (-L, L)");
  // Antiderivative of (x - a)(L^2 - x^2).
  auto primitive = [L, a](double x) {
    const double x2 = x * x;
    return 0.5 * L * L * x2 - 0.25 * x2 * x2 - a * L * L * x + a * x2 * x / 3.0;
  };
  const double shift = c1 - primitive(a);
  return {[primitive, shift](double x) { return primitive(x) + shift; },
          [L, a](double x) { return (x - a) * (L - x) * (x + L); },
          [L, a](double x) { return L * L - 3.0 * x * x + 2.0 * a * x; }};
}

Profile make_psi1_open() {
  return {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
          [](double x) { return std::exp(x); }};
}

ScalarField WeightSystem::damping(double s) const {
  ScalarField out = ScalarField::full(grid);
  for (Index k = 1; k + 1 < grid.levels(); ++k) {
    auto dst = out.level(k);
    dst = (-2.0 * s * weight.level(k)).exp();
    dst = (dst < kUnderflow).select(0.0, dst);
  }
  return out;
}

ScalarField WeightSystem::half_damping(double s) const {
  ScalarField out = ScalarField::full(grid);
  for (Index k = 1; k + 1 < grid.levels(); ++k) {
    auto dst = out.level(k);
    dst = (-s * weight.level(k)).exp();
    dst = (dst < kUnderflow).select(0.0, dst);
  }
  return out;
}

ScalarField WeightSystem::g_field() const {
  ScalarField out = ScalarField::full(grid);
  for (Index k = 0; k < grid.levels(); ++k) out.level(k).setConstant(g(k));
  return out;
}

WeightSystem assemble_weight(const WeightParams& params, const SpaceTimeGrid& grid) {
  params.validate();
  WaveguideDomain snapped = grid.domain();
  snapped.alpha = grid.alpha();
  if (params.regime == Regime::Open)
    return assemble_weight(params, grid, make_psi1_open(), make_psi2(grid.domain(), params.delta));
  return assemble_weight(params, grid, make_psi1(snapped, params.c1),
                         make_psi2(grid.domain(), params.delta));
}

WeightSystem assemble_weight(const WeightParams& params, const SpaceTimeGrid& grid,
                             Profile psi1, Profile psi2) {
  if (!(params.lambda > 0.0) || !(params.s > 0.0))
    throw std::invalid_argument("weights: lambda and s must be positive");
  if (params.regime == Regime::Open && !grid.domain().truncated)
    throw std::invalid_argument("weights: open regime requires a truncated grid");

  WeightSystem ws;
  ws.params = params;
  ws.grid = grid;
  ws.psi1 = std::move(psi1);
  ws.psi2 = std::move(psi2);

  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  Eigen::ArrayXd p1(n1), d1(n1), c1(n1), p2(n2), d2(n2), c2(n2);
  for (Index i = 0; i < n1; ++i) {
    const double x = grid.x1(i);
    p1(i) = ws.psi1.value(x);
    d1(i) = ws.psi1.slope(x);
    c1(i) = ws.psi1.curvature(x);
  }
  for (Index j = 0; j < n2; ++j) {
    const double x = grid.x2(j);
    p2(j) = ws.psi2.value(x);
    d2(j) = ws.psi2.slope(x);
    c2(j) = ws.psi2.curvature(x);
  }

  ws.psi = ScalarField::slice(grid);
  ws.dpsi_dx1 = ScalarField::slice(grid);
  ws.dpsi_dx2 = ScalarField::slice(grid);
  ws.lap_psi = ScalarField::slice(grid);
  ws.psi.level(0) = p1.matrix() * p2.matrix().transpose();
  ws.dpsi_dx1.level(0) = d1.matrix() * p2.matrix().transpose();
  ws.dpsi_dx2.level(0) = p1.matrix() * d2.matrix().transpose();
  ws.lap_psi.level(0) = (c1.matrix() * p2.matrix().transpose()).array() +
                        (p1.matrix() * c2.matrix().transpose()).array();

  ws.psi_sup = ws.psi.max_abs();
  const double lambda = params.lambda;
  ws.spatial = ScalarField::slice(grid);
  if (params.regime == Regime::Bounded)
    ws.spatial.level(0) = std::exp(2.0 * lambda * ws.psi_sup) - (lambda * ws.psi.level(0)).exp();
  else
    ws.spatial.level(0) = (lambda * ws.psi.level(0)).exp();

  const auto grad_norm = (ws.dpsi_dx1.level(0).square() + ws.dpsi_dx2.level(0).square()).sqrt();
  ws.C0_margin = grad_norm.block(1, 1, n1 - 2, n2 - 2).minCoeff();

  const double T = grid.domain().T;
  ws.g = Eigen::ArrayXd::Zero(grid.levels());
  ws.dg_dt = Eigen::ArrayXd::Zero(grid.levels());
  ws.weight = ScalarField::full(grid);
  for (Index k = 1; k + 1 < grid.levels(); ++k) {
    ws.g(k) = time_profile(grid.t(k), T);
    ws.dg_dt(k) = time_profile_rate(grid.t(k), T);
    ws.weight.level(k) = ws.g(k) * ws.spatial.level(0);
  }
  return ws;
}

WeightDerivatives weight_derivatives(const WeightSystem& ws) {
  const SpaceTimeGrid& grid = ws.grid;
  const double lambda = ws.params.lambda;
  const double sign = ws.params.regime == Regime::Bounded ? -1.0 : 1.0;
  const auto e = (lambda * ws.psi.level(0)).exp().eval();
  const auto gx1 = (sign * lambda * e * ws.dpsi_dx1.level(0)).eval();
  const auto gx2 = (sign * lambda * e * ws.dpsi_dx2.level(0)).eval();
  const auto lap = (sign * lambda * e *
                    (ws.lap_psi.level(0) + lambda * (ws.dpsi_dx1.level(0).square() +
                                                     ws.dpsi_dx2.level(0).square())))
                       .eval();
  WeightDerivatives d{ScalarField::full(grid), ScalarField::full(grid), ScalarField::full(grid),
                      ScalarField::full(grid)};
  for (Index k = 1; k + 1 < grid.levels(); ++k) {
    d.dt.level(k) = ws.dg_dt(k) * ws.spatial.level(0);
    d.dx1.level(k) = ws.g(k) * gx1;
    d.dx2.level(k) = ws.g(k) * gx2;
    d.lap.level(k) = ws.g(k) * lap;
  }
  return d;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(bullets.begin(), bullets.end(),
                     [](const BulletCheck& b) { return !b.verifiable || b.passed; });
}

namespace {

struct Scan {
  double min_psi = std::numeric_limits<double>::infinity();
  double min_grad = std::numeric_limits<double>::infinity();
  double max_normal_unobserved = -std::numeric_limits<double>::infinity();
  double max_normal_caps = -std::numeric_limits<double>::infinity();
};

Scan common_scan(const WeightSystem& ws) {
  const SpaceTimeGrid& grid = ws.grid;
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  const auto psi = ws.psi.level(0);
  const auto dx1 = ws.dpsi_dx1.level(0);
  const auto dx2 = ws.dpsi_dx2.level(0);
  Scan s;
  s.min_psi = psi.minCoeff();
  s.min_grad = ws.C0_margin;
  // Outward normals: -e2 at x2 = 0, +e2 at x2 = h, -e1 at x1 = -L, +e1 at x1 = L.
  const bool top_observed = grid.domain().observed == Side::Top;
  for (Index i = 0; i < n1; ++i) {
    const double normal = top_observed ? -dx2(i, 0) : dx2(i, n2 - 1);
    s.max_normal_unobserved = std::max(s.max_normal_unobserved, normal);
  }
  for (Index j = 0; j < n2; ++j) {
    s.max_normal_caps = std::max(s.max_normal_caps, -dx1(0, j));
    s.max_normal_caps = std::max(s.max_normal_caps, dx1(n1 - 1, j));
  }
  return s;
}

std::string describe(const std::string& what, double value) {
  std::ostringstream os;
  os.precision(6);
  os << what << " = " << value;
  return os.str();
}

}  // namespace

AssumptionReport check_assumption_bounded(const WeightSystem& ws) {
  const SpaceTimeGrid& grid = ws.grid;
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  const Index ia = grid.alpha_index();
  const auto dx1 = ws.dpsi_dx1.level(0);
  const Scan scan = common_scan(ws);

  AssumptionReport r;
  r.regime = Regime::Bounded;
  r.min_psi = scan.min_psi;
  r.min_grad_psi = scan.min_grad;
  r.max_normal_psi_unobserved = std::max(scan.max_normal_unobserved, scan.max_normal_caps);

  r.max_dx1_psi_left = -std::numeric_limits<double>::infinity();
  for (Index i = 1; i < ia; ++i)
    for (Index j = 1; j + 1 < n2; ++j) r.max_dx1_psi_left = std::max(r.max_dx1_psi_left, dx1(i, j));
  r.min_dx1_psi_right = std::numeric_limits<double>::infinity();
  for (Index i = ia + 1; i + 1 < n1; ++i)
    for (Index j = 1; j + 1 < n2; ++j)
      r.min_dx1_psi_right = std::min(r.min_dx1_psi_right, dx1(i, j));

  r.bullets.push_back({"positivity", r.min_psi > 0.0, true, r.min_psi,
                       describe("min psi over closed domain", r.min_psi)});
  r.bullets.push_back({"gradient-floor", r.min_grad_psi > 0.0, true, r.min_grad_psi,
                       describe("min |grad psi| over interior", r.min_grad_psi)});
  r.bullets.push_back({"normal-sign", r.max_normal_psi_unobserved <= 0.0, true,
                       -r.max_normal_psi_unobserved,
                       describe("max d_nu psi off the observed wall", r.max_normal_psi_unobserved)});
  const bool left_ok = r.max_dx1_psi_left < 0.0;
  r.bullets.push_back({"decreasing-left", left_ok, true,
                       std::isfinite(r.max_dx1_psi_left) ? -r.max_dx1_psi_left : 0.0,
                       describe("max d_x1 psi on (-L, alpha)", r.max_dx1_psi_left)});
  const bool right_ok = r.min_dx1_psi_right > 0.0;
  r.bullets.push_back({"increasing-right", right_ok, true,
                       std::isfinite(r.min_dx1_psi_right) ? r.min_dx1_psi_right : 0.0,
                       describe("min d_x1 psi on (alpha, L)", r.min_dx1_psi_right)});
  return r;
}

AssumptionReport check_assumption_open(const WeightSystem& ws,
                                       const std::vector<double>& tail_radii) {
  const SpaceTimeGrid& grid = ws.grid;
  const Scan scan = common_scan(ws);
  AssumptionReport r;
  r.regime = Regime::Open;
  r.min_psi = scan.min_psi;
  r.min_grad_psi = scan.min_grad;
  r.max_normal_psi_unobserved = scan.max_normal_unobserved;
  r.min_dx1_psi = ws.dpsi_dx1.level(0).minCoeff();

  double min_psi2 = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < grid.nodes2(); ++j) min_psi2 = std::min(min_psi2, ws.psi2.value(grid.x2(j)));
  const double R = grid.domain().L;
  r.kappa = std::exp(-R) * min_psi2;

  for (double radius : tail_radii)
    r.tail_ratios.emplace_back(radius, std::abs(ws.psi1.value(-radius) * min_psi2 / radius));
  r.unbounded_strip_flag =
      r.tail_ratios.size() >= 2 && r.tail_ratios.back().second < r.tail_ratios.front().second;

  r.bullets.push_back({"positivity", r.min_psi > 0.0, true, r.min_psi,
                       describe("min psi on truncated domain", r.min_psi)});
  r.bullets.push_back({"gradient-floor", r.min_grad_psi > 0.0, true, r.min_grad_psi,
                       describe("min |grad psi| over interior", r.min_grad_psi)});
  r.bullets.push_back({"normal-sign", r.max_normal_psi_unobserved <= 0.0, true,
                       -r.max_normal_psi_unobserved,
                       describe("max d_nu psi on unobserved wall", r.max_normal_psi_unobserved)});
  r.bullets.push_back({"axial-monotone", r.min_dx1_psi > 0.0, true, r.min_dx1_psi,
                       describe("min d_x1 psi (kappa(R) bound " + format_double(r.kappa) + ")",
                                r.min_dx1_psi)});
  std::ostringstream tail;
  tail.precision(6);
  tail << "|psi/x1| at x1 = -R:";
  for (const auto& [radius, ratio] : r.tail_ratios) tail << " R=" << radius << ":" << ratio;
  if (r.unbounded_strip_flag) tail << " (decays toward 0; cannot hold on the unbounded strip)";
  r.bullets.push_back({"superlinear-growth", false, false,
                       r.tail_ratios.empty() ? 0.0 : r.tail_ratios.back().second, tail.str()});
  return r;
}

RatioScan scan_transfer_ratio(const WeightSystem& ws, double s) {
  const SpaceTimeGrid& grid = ws.grid;
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  const Index ia = grid.alpha_index();
  RatioScan out;
  out.max_log_r = -std::numeric_limits<double>::infinity();
  auto consider = [&](double log_r, Index k, Index i, Index m, Index j) {
    if (log_r > out.max_log_r) {
      out.max_log_r = log_r;
      out.worst_level = k;
      out.worst_x1 = i;
      out.worst_xi = m;
      out.worst_x2 = j;
    }
  };
  for (Index k = 1; k + 1 < grid.levels(); ++k) {
    const auto w = ws.weight.level(k);
    for (Index j = 0; j < n2; ++j) {
      // alpha <= xi <= x1: the largest w(xi) over the prefix gives the largest r.
      double best = -std::numeric_limits<double>::infinity();
      Index arg = ia;
      for (Index i = ia; i < n1; ++i) {
        if (w(i, j) > best) { best = w(i, j); arg = i; }
        consider(-2.0 * s * (w(i, j) - best), k, i, arg, j);
      }
      best = -std::numeric_limits<double>::infinity();
      arg = ia;
      for (Index i = ia; i >= 0; --i) {
        if (w(i, j) > best) { best = w(i, j); arg = i; }
        consider(-2.0 * s * (w(i, j) - best), k, i, arg, j);
      }
    }
  }
  out.max_r = std::exp(std::min(out.max_log_r, 709.0));
  return out;
}

}  // namespace waveguide
