#include <waveguide/carleman.hpp>
#include <waveguide/calculus.hpp>
#include <waveguide/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace waveguide {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kOverflowExponent = 700.0;

double interior_min_weight(const WeightSystem& ws) {
  double m = std::numeric_limits<double>::infinity();
  for (Index k = 1; k + 1 < ws.grid.levels(); ++k) m = std::min(m, ws.weight.level(k).minCoeff());
  return std::isfinite(m) ? m : 0.0;
}

// Boundary trace of a full field's shifted damping on a segment.
ScalarField damping_trace(const ShiftedDamping& d, Segment seg) { return trace_of(d.field, seg); }

double boundary_tolerance(const SpaceTimeGrid& grid) {
  const double h = std::max(grid.dx1(), grid.dx2());
  return 10.0 * h * h;
}

double max_on_boundary(const ScalarField& f) {
  double m = 0.0;
  for (Segment seg : {Segment::Bottom, Segment::Top, Segment::Left, Segment::Right})
    m = std::max(m, trace_of(f, seg).max_abs());
  return m;
}

WeightSystem with_lambda(const WeightSystem& ws, double lambda) {
  if (lambda == ws.params.lambda) return ws;
  WeightParams p = ws.params;
  p.lambda = lambda;
  return assemble_weight(p, ws.grid, ws.psi1, ws.psi2);
}

// Runs fn over every index concurrently and collects the results in order.
template <typename Fn>
auto parallel_map(std::size_t n, Fn fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<std::future<Result>> jobs;
  jobs.reserve(n);
  for (std::size_t m = 0; m < n; ++m) jobs.push_back(std::async(std::launch::async, fn, m));
  std::vector<Result> out;
  out.reserve(n);
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

ScalarField squared(const ScalarField& f) { return f * f; }

}  // namespace

double InequalityReport::rhs() const {
  double total = 0.0;
  for (const auto& [name, value] : rhs_terms) total += value;
  return total;
}

bool InequalityReport::passed() const {
  return std::all_of(flags.begin(), flags.end(), [](const auto& f) { return f.second; });
}

std::optional<double> InequalityReport::metric(const std::string& key) const {
  for (const auto& [name, value] : metrics)
    if (name == key) return value;
  return std::nullopt;
}

std::optional<bool> InequalityReport::flag(const std::string& key) const {
  for (const auto& [name, value] : flags)
    if (name == key) return value;
  return std::nullopt;
}

double empirical_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

ShiftedDamping shifted_damping(const WeightSystem& ws, double s, double exponent_factor) {
  const double w_min = interior_min_weight(ws);
  ShiftedDamping out{ScalarField::full(ws.grid), -exponent_factor * s * w_min};
  for (Index k = 1; k + 1 < ws.grid.levels(); ++k) {
    auto dst = out.field.level(k);
    dst = (-exponent_factor * s * (ws.weight.level(k) - w_min)).exp();
    dst = (dst < kUnderflow).select(0.0, dst);
  }
  return out;
}

I1Terms weighted_norm_I1(const ScalarField& z, const WeightSystem& ws, double s) {
  if (ws.params.regime != Regime::Bounded)
    throw std::invalid_argument("weighted_norm_I1 needs the bounded regime");
  if (z.kind() != FieldKind::Full || z.shape() != shape_for(ws.grid, FieldKind::Full))
    throw std::invalid_argument("weighted_norm_I1: z must be a full field on the weight grid");
  const ShiftedDamping damp = shifted_damping(ws, s);
  const ScalarField lap = laplacian(z);
  const ScalarField zt = time_derivative(z);
  const auto [z1, z2] = gradient(z);

  ScalarField f_lap = ScalarField::full(ws.grid), f_t = f_lap, f_grad = f_lap, f_zero = f_lap;
  for (Index k = 1; k + 1 < ws.grid.levels(); ++k) {
    const double sg = s * ws.g(k);
    const auto d = damp.field.level(k);
    f_lap.level(k) = d * lap.level(k).square() / sg;
    f_t.level(k) = d * zt.level(k).square() / sg;
    f_grad.level(k) = d * sg * (z1.level(k).square() + z2.level(k).square());
    f_zero.level(k) = d * sg * sg * sg * z.level(k).square();
  }
  I1Terms out;
  out.laplacian = integrate(f_lap);
  out.time = integrate(f_t);
  out.gradient = integrate(f_grad);
  out.zero_order = integrate(f_zero);
  out.log_scale = damp.log_scale;
  return out;
}

std::pair<double, double> prefix_integral_pair(const ScalarField& F, const WeightSystem& ws,
                                               double s) {
  if (F.kind() != FieldKind::Full || F.shape() != shape_for(ws.grid, FieldKind::Full))
    throw std::invalid_argument("lemma check: F must be a full field on the weight grid");
  const ShiftedDamping damp = shifted_damping(ws, s);
  const ScalarField prefix = cumulative_x1(F, ws.grid.alpha_index());
  const double lhs = integrate(squared(prefix) * damp.field);
  const double rhs = integrate(squared(F) * damp.field);
  if (rhs == 0.0 && lhs > 0.0)
    throw std::logic_error("lemma check: weighted |F|^2 vanishes while the prefix side does not");
  return {lhs, rhs};
}

namespace {

InequalityReport lemma_sweep(const std::string& name, const ScalarField& F, const WeightSystem& ws,
                             const std::vector<double>& s_list) {
  if (s_list.empty()) throw std::invalid_argument(name + ": empty s sweep");
  InequalityReport r;
  r.name = name;
  r.sweep = parallel_map(s_list.size(), [&](std::size_t m) {
    const auto [lhs, rhs] = prefix_integral_pair(F, ws, s_list[m]);
    return SweepPoint{s_list[m], ws.params.lambda, lhs, rhs, empirical_ratio(lhs, rhs)};
  });
  r.lhs = r.sweep.front().lhs;
  r.rhs_terms = {{"weighted_F2", r.sweep.front().rhs}};
  r.empirical_C = r.sweep.front().empirical_C;
  r.log_scale = -2.0 * s_list.front() * interior_min_weight(ws);
  return r;
}

}  // namespace

InequalityReport lemma_bounded_check(const ScalarField& F, const WeightSystem& ws,
                                     const std::vector<double>& s_list) {
  if (ws.params.regime != Regime::Bounded)
    throw std::invalid_argument("lemma_bounded_check needs the bounded regime");
  InequalityReport r = lemma_sweep("prefix-lemma-bounded", F, ws, s_list);
  double c_max = 0.0;
  for (const auto& p : r.sweep) c_max = std::max(c_max, p.empirical_C);
  const double c_first = r.sweep.front().empirical_C;
  double log_r = -std::numeric_limits<double>::infinity();
  for (double s : s_list) log_r = std::max(log_r, scan_transfer_ratio(ws, s).max_log_r);
  r.metrics = {{"C_first", c_first},
               {"C_max", c_max},
               {"C_growth", empirical_ratio(c_max, c_first)},
               {"max_log_r", log_r},
               {"max_r", std::exp(std::min(log_r, 709.0))}};
  r.flags = {{"finite", std::isfinite(c_max)},
             {"s_uniform", c_max <= 2.0 * c_first},
             {"r_le_one", log_r <= std::log1p(1e-12)}};
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t m = 0; m < x.size() && m < y.size(); ++m)
    if (x[m] > 0.0 && y[m] > 0.0 && std::isfinite(y[m])) {
      lx.push_back(std::log(x[m]));
      ly.push_back(std::log(y[m]));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::Map<const Eigen::ArrayXd> X(lx.data(), Index(lx.size()));
  const Eigen::Map<const Eigen::ArrayXd> Y(ly.data(), Index(ly.size()));
  const double mx = X.mean(), my = Y.mean();
  return ((X - mx) * (Y - my)).sum() / (X - mx).square().sum();
}

InequalityReport lemma_open_check(const ScalarField& F, const WeightSystem& ws,
                                  const std::vector<double>& s_list) {
  if (ws.params.regime != Regime::Open)
    throw std::invalid_argument("lemma_open_check needs the open regime");
  InequalityReport r = lemma_sweep("prefix-lemma-open", F, ws, s_list);
  std::vector<double> s, C;
  for (const auto& p : r.sweep) {
    s.push_back(p.s);
    C.push_back(p.empirical_C);
  }
  const double slope = loglog_slope(s, C);
  const double first = C.front() * s.front() * s.front();
  double worst = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m) worst = std::max(worst, C[m] * s[m] * s[m]);
  const double kappa =
      std::exp(-ws.grid.domain().L) * ws.psi2.value(ws.grid.domain().observed == Side::Top ? 0.0 : ws.grid.domain().h);
  r.metrics = {{"slope", slope}, {"C_s2_first", first}, {"C_s2_max", worst}, {"kappa", kappa}};
  r.flags = {{"finite", std::isfinite(worst)},
             {"slope_in_band", slope >= -2.5 && slope <= -1.5},
             {"s2_bounded", worst <= 4.0 * first}};
  return r;
}

ConjugatedParts conjugated_operator(const ScalarField& w, const WeightSystem& ws, double s) {
  if (ws.params.regime != Regime::Open)
    throw std::invalid_argument("conjugated_operator needs the open regime");
  if (!(s >= 0.0)) throw std::invalid_argument("conjugated_operator: s must be nonnegative");
  const SpaceTimeGrid& grid = ws.grid;
  if (w.kind() != FieldKind::Full || w.shape() != shape_for(grid, FieldKind::Full))
    throw std::invalid_argument("conjugated_operator: w must be a full field on the weight grid");

  ScalarField lifted = ScalarField::full(grid);
  ScalarField down = ScalarField::full(grid);
  for (Index k = 0; k < grid.levels(); ++k)
    for (Index i = 0; i < grid.nodes1(); ++i)
      for (Index j = 0; j < grid.nodes2(); ++j) {
        const double e = s * ws.weight(k, i, j);
        if (e > kOverflowExponent && w(k, i, j) != 0.0) {
          std::ostringstream os;
          os << "conjugated_operator: s phi = " << e << " exceeds " << kOverflowExponent
             << " at node (t=" << grid.t(k) << ", x1=" << grid.x1(i) << ", x2=" << grid.x2(j)
             << ")";
          throw WeightOverflow(os.str(), k, i, j);
        }
        lifted(k, i, j) = w(k, i, j) == 0.0 ? 0.0 : std::exp(e) * w(k, i, j);
        down(k, i, j) = std::exp(-e);
      }

  ConjugatedParts out;
  out.Mw = down * (time_derivative(lifted) - laplacian(lifted));

  const WeightDerivatives phi = weight_derivatives(ws);
  const ScalarField wt = time_derivative(w);
  const ScalarField lap = laplacian(w);
  const auto [w1, w2] = gradient(w);
  const ScalarField grad_sq = phi.dx1 * phi.dx1 + phi.dx2 * phi.dx2;
  const ScalarField grad_dot = phi.dx1 * w1 + phi.dx2 * w2;

  out.M1 = (-lap - (s * s) * (grad_sq * w)) - s * (phi.dt * w);
  out.M2 = (wt + (2.0 * s) * grad_dot) + s * (phi.lap * w);
  out.Mw_expanded = wt + s * (phi.dt * w) - lap - (2.0 * s) * grad_dot - s * (phi.lap * w) -
                    (s * s) * (grad_sq * w);
  out.residual = out.Mw - (out.M1 + out.M2);
  return out;
}

ScalarField decomposition_residual_oracle(const WeightSystem& ws, double s, const ScalarField& w,
                                          const ScalarField& w_x1, const ScalarField& w_x2) {
  const WeightDerivatives phi = weight_derivatives(ws);
  return (2.0 * s) * (phi.dt * w - 2.0 * (phi.dx1 * w_x1 + phi.dx2 * w_x2) - phi.lap * w);
}

std::optional<std::size_t> empirical_s0(const std::vector<double>& C) {
  if (C.size() < 2) return std::nullopt;
  for (std::size_t m = 0; m + 1 < C.size(); ++m) {
    bool ok = true;
    for (std::size_t n = m; n + 1 < C.size(); ++n)
      if (!(std::isfinite(C[n + 1]) && C[n + 1] <= 1.1 * C[n])) {
        ok = false;
        break;
      }
    if (ok) return m;
  }
  return std::nullopt;
}

namespace {

struct Evaluated {
  double lhs = 0.0;
  std::vector<std::pair<std::string, double>> lhs_terms;
  std::vector<std::pair<std::string, double>> rhs_terms;
  double log_scale = 0.0;
};

Evaluated evaluate_bounded(const ScalarField& z, const ScalarField& Pz, const WeightSystem& ws,
                           double s) {
  const I1Terms I1 = weighted_norm_I1(z, ws, s);
  const ShiftedDamping damp = shifted_damping(ws, s);
  const Segment obs = ws.grid.observed_segment();
  ScalarField boundary = squared(normal_derivative(z, obs)) * damping_trace(damp, obs);
  for (Index k = 0; k < ws.grid.levels(); ++k) boundary.level(k) *= s * ws.g(k);
  Evaluated e;
  e.lhs = I1.total();
  e.lhs_terms = {{"laplacian", I1.laplacian},
                 {"time", I1.time},
                 {"gradient", I1.gradient},
                 {"zero_order", I1.zero_order}};
  e.rhs_terms = {{"weighted_Pz2", integrate(squared(Pz) * damp.field)},
                 {"observed_boundary", integrate(boundary)}};
  e.log_scale = damp.log_scale;
  return e;
}

Evaluated evaluate_open(const ScalarField& u, const ScalarField& Hu, const WeightSystem& ws,
                        double s) {
  const SpaceTimeGrid& grid = ws.grid;
  const double lambda = ws.params.lambda;
  const ShiftedDamping damp = shifted_damping(ws, s);
  const ShiftedDamping half = shifted_damping(ws, s, 1.0);
  const auto [u1, u2] = gradient(u);
  const ScalarField& phi = ws.weight;

  const double zero_order = s * s * s * std::pow(lambda, 4) * integrate(damp.field * phi * phi * phi * squared(u));
  const double gradient_term = s * lambda * integrate(damp.field * phi * (squared(u1) + squared(u2)));

  // M1, M2 applied to exp(-s phi) u; the shift matches the one in `damp`.
  const ScalarField wtilde = half.field * u;
  const WeightDerivatives d = weight_derivatives(ws);
  const auto [w1, w2] = gradient(wtilde);
  const ScalarField M1 = (-laplacian(wtilde) - (s * s) * ((d.dx1 * d.dx1 + d.dx2 * d.dx2) * wtilde)) -
                         s * (d.dt * wtilde);
  const ScalarField M2 =
      (time_derivative(wtilde) + (2.0 * s) * (d.dx1 * w1 + d.dx2 * w2)) + s * (d.lap * wtilde);

  const Segment obs = grid.observed_segment();
  const double sign = obs == Segment::Top ? 1.0 : -1.0;
  ScalarField dnu_psi = ScalarField::trace(grid, obs);
  const Index jb = obs == Segment::Top ? grid.nodes2() - 1 : 0;
  for (Index k = 0; k < grid.levels(); ++k)
    for (Index i = 0; i < grid.nodes1(); ++i) {
      const double v = sign * ws.dpsi_dx2(0, i, jb);
      if (!(v > 0.0))
        throw std::logic_error("carleman_check_open: d_nu psi is not positive on the observed wall");
      dnu_psi(k, i, 0) = v;
    }
  const ScalarField boundary = damping_trace(damp, obs) * trace_of(phi, obs) *
                               squared(normal_derivative(u, obs)) * dnu_psi;

  Evaluated e;
  e.lhs_terms = {{"zero_order", zero_order},
                 {"gradient", gradient_term},
                 {"M1_norm2", integrate(squared(M1))},
                 {"M2_norm2", integrate(squared(M2))}};
  for (const auto& [name, v] : e.lhs_terms) e.lhs += v;
  e.rhs_terms = {{"observed_boundary", s * lambda * integrate(boundary)},
                 {"weighted_Hu2", integrate(squared(Hu) * damp.field)}};
  e.log_scale = damp.log_scale;
  return e;
}

template <typename Eval>
InequalityReport carleman_sweep(const std::string& name, const ScalarField& u,
                                const ScalarField& Pu, const WeightSystem& ws,
                                const std::vector<double>& s_list,
                                const std::vector<double>& lambda_list, Eval eval) {
  if (s_list.empty()) throw std::invalid_argument(name + ": empty s sweep");
  if (!u.compatible(Pu) || u.shape() != shape_for(ws.grid, FieldKind::Full))
    throw std::invalid_argument(name + ": fields must be full fields on the weight grid");
  const double edge = max_on_boundary(u);
  if (edge > boundary_tolerance(ws.grid)) {
    std::ostringstream os;
    os << name << ": test function does not vanish on the boundary (max " << edge << ")";
    throw std::invalid_argument(os.str());
  }
  const std::vector<double> lambdas =
      lambda_list.empty() ? std::vector<double>{ws.params.lambda} : lambda_list;
  std::vector<WeightSystem> systems;
  for (double lambda : lambdas) systems.push_back(with_lambda(ws, lambda));

  const std::size_t ns = s_list.size();
  const auto results = parallel_map(ns * lambdas.size(), [&](std::size_t m) {
    return eval(u, Pu, systems[m / ns], s_list[m % ns]);
  });

  InequalityReport r;
  r.name = name;
  const Evaluated& first = results.front();
  r.lhs = first.lhs;
  r.lhs_terms = first.lhs_terms;
  r.rhs_terms = first.rhs_terms;
  r.log_scale = first.log_scale;
  bool finite = true, bounded = true;
  for (std::size_t m = 0; m < results.size(); ++m) {
    double rhs = 0.0;
    for (const auto& [n, v] : results[m].rhs_terms) rhs += v;
    const double C = empirical_ratio(results[m].lhs, rhs);
    r.sweep.push_back({s_list[m % ns], lambdas[m / ns], results[m].lhs, rhs, C});
    finite = finite && std::isfinite(C);
  }
  r.empirical_C = r.sweep.front().empirical_C;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    std::vector<double> C;
    for (std::size_t m = 0; m < ns; ++m) C.push_back(r.sweep[l * ns + m].empirical_C);
    const auto s0 = empirical_s0(C);
    const std::string suffix = lambdas.size() > 1 ? "_lambda" + std::to_string(l) : "";
    r.metrics.emplace_back("s0" + suffix, s0 ? s_list[*s0] : std::numeric_limits<double>::quiet_NaN());
    bounded = bounded && s0.has_value();
  }
  r.metrics.emplace_back("boundary_max", edge);
  r.flags = {{"finite", finite}, {"bounded_beyond_s0", bounded}};
  return r;
}

}  // namespace

InequalityReport carleman_check_bounded(const ScalarField& z, const ScalarField& Pz,
                                        const WeightSystem& ws, const std::vector<double>& s_list,
                                        const std::vector<double>& lambda_list) {
  if (ws.params.regime != Regime::Bounded)
    throw std::invalid_argument("carleman_check_bounded needs the bounded regime");
  return carleman_sweep("carleman-bounded", z, Pz, ws, s_list, lambda_list, evaluate_bounded);
}

InequalityReport carleman_check_open(const ScalarField& u, const ScalarField& Hu,
                                     const WeightSystem& ws, const std::vector<double>& s_list,
                                     const std::vector<double>& lambda_list) {
  if (ws.params.regime != Regime::Open)
    throw std::invalid_argument("carleman_check_open needs the open regime");
  return carleman_sweep("carleman-open", u, Hu, ws, s_list, lambda_list, evaluate_open);
}

namespace {

struct Factor {
  std::function<double(double)> f, d1, d2;
};

BumpFunction separable_bump(const SpaceTimeGrid& grid, const std::string& name, const Factor& tau,
                            const Factor& X, const Factor& Y) {
  BumpFunction b{name, ScalarField::full(grid), ScalarField::full(grid), ScalarField::full(grid),
                 ScalarField::full(grid)};
  for (Index k = 0; k < grid.levels(); ++k) {
    const double t = grid.t(k);
    const double a = tau.f(t), at = tau.d1(t);
    for (Index i = 0; i < grid.nodes1(); ++i) {
      const double x = grid.x1(i);
      const double p = X.f(x), p1 = X.d1(x), p2 = X.d2(x);
      for (Index j = 0; j < grid.nodes2(); ++j) {
        const double y = grid.x2(j);
        const double q = Y.f(y), q2 = Y.d2(y);
        b.z(k, i, j) = a * p * q;
        b.Pz(k, i, j) = at * p * q - a * (p2 * q + p * q2);
        b.z_x1(k, i, j) = a * p1 * q;
        b.z_x2(k, i, j) = a * p * Y.d1(y);
      }
    }
  }
  return b;
}

Factor sine_mode(double h, int m) {
  const double c = m * std::numbers::pi / h;
  return {[c](double y) { return std::sin(c * y); }, [c](double y) { return c * std::cos(c * y); },
          [c](double y) { return -c * c * std::sin(c * y); }};
}

}  // namespace

std::vector<BumpFunction> sigma_vanishing_bumps(const SpaceTimeGrid& grid) {
  const double T = grid.domain().T, L = grid.domain().L, h = grid.domain().h;
  const double L2 = L * L;
  const Factor tau{[T](double t) { return t * t * (T - t) * (T - t); },
                   [T](double t) { return 2.0 * t * (T - t) * (T - 2.0 * t); },
                   [T](double t) { return 2.0 * (T * T - 6.0 * T * t + 6.0 * t * t); }};
  const Factor even{[L2](double x) { return (L2 - x * x) * (L2 - x * x); },
                    [L2](double x) { return -4.0 * x * (L2 - x * x); },
                    [L2](double x) { return 12.0 * x * x - 4.0 * L2; }};
  const Factor odd{[L2](double x) { return x * (L2 - x * x) * (L2 - x * x); },
                   [L2](double x) { return (L2 - x * x) * (L2 - 5.0 * x * x); },
                   [L2](double x) { return 20.0 * x * x * x - 12.0 * L2 * x; }};
  return {separable_bump(grid, "even-mode1", tau, even, sine_mode(h, 1)),
          separable_bump(grid, "odd-mode1", tau, odd, sine_mode(h, 1)),
          separable_bump(grid, "even-mode2", tau, even, sine_mode(h, 2))};
}

BumpFunction compact_bump(const SpaceTimeGrid& grid) {
  const double T = grid.domain().T, L = grid.domain().L, h = grid.domain().h;
  const double a = 0.25 * T, b = 0.75 * T;
  const double scale = std::pow(2.0 / (b - a), 8);
  // ((t - a)(b - t))^4 on [a, b], normalised to 1 at the centre.
  const Factor tau{[=](double t) {
                     if (t <= a || t >= b) return 0.0;
                     return scale * std::pow((t - a) * (b - t), 4);
                   },
                   [=](double t) {
                     if (t <= a || t >= b) return 0.0;
                     const double p = (t - a) * (b - t);
                     return scale * 4.0 * p * p * p * (a + b - 2.0 * t);
                   },
                   [=](double t) {
                     if (t <= a || t >= b) return 0.0;
                     const double p = (t - a) * (b - t), dp = a + b - 2.0 * t;
                     return scale * (12.0 * p * p * dp * dp - 8.0 * p * p * p);
                   }};
  const double c = std::numbers::pi / (2.0 * L);
  const Factor X{[=](double x) { return std::sin(c * (x + L)); },
                 [=](double x) { return c * std::cos(c * (x + L)); },
                 [=](double x) { return -c * c * std::sin(c * (x + L)); }};
  return separable_bump(grid, "compact", tau, X, sine_mode(h, 1));
}

ScalarField random_smooth_field(const SpaceTimeGrid& grid, std::uint64_t seed, int modes) {
  if (modes < 1) throw std::invalid_argument("random_smooth_field: modes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double T = grid.domain().T, L = grid.domain().L, h = grid.domain().h;
  const double pi = std::numbers::pi;
  ScalarField F = ScalarField::full(grid);
  for (int a = 0; a < modes; ++a)
    for (int b = 0; b < modes; ++b)
      for (int c = 0; c < modes; ++c) {
        const double amp = coef(rng) / ((1.0 + a + b + c) * (1.0 + a + b + c));
        for (Index k = 0; k < grid.levels(); ++k) {
          const double ft = std::cos(a * pi * grid.t(k) / T);
          for (Index i = 0; i < grid.nodes1(); ++i) {
            const double f1 = std::cos(b * pi * (grid.x1(i) + L) / (2.0 * L));
            for (Index j = 0; j < grid.nodes2(); ++j)
              F(k, i, j) += amp * ft * f1 * std::cos(c * pi * grid.x2(j) / h);
          }
        }
      }
  return F;
}

}  // namespace waveguide
