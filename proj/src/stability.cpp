#include <waveguide/stability.hpp>
#include <waveguide/calculus.hpp>
#include <waveguide/carleman.hpp>
#include <waveguide/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace waveguide {

double mixed_sobolev_norm(const ScalarField& trace) {
  if (trace.kind() != FieldKind::CrossSection)
    throw std::invalid_argument("mixed_sobolev_norm needs a cross-section trace");
  auto h2 = [](const ScalarField& g) {
    return g * g + partial(g, Axis::X2) * partial(g, Axis::X2) +
           partial2(g, Axis::X2) * partial2(g, Axis::X2);
  };
  return integrate(h2(trace) + h2(time_derivative(trace)));
}

StabilityReport assemble_stability(const ScalarField& u, const ScalarField& u_tilde,
                                   const ScalarField& q, const ScalarField& q_tilde,
                                   double epsilon) {
  const SpaceTimeGrid& grid = u.grid();
  const double T = grid.domain().T;
  if (!(epsilon > 0.0 && epsilon < 0.5 * T))
    throw std::invalid_argument("assemble_stability: epsilon must lie in (0, T/2)");
  if (!u.compatible(u_tilde) || u.kind() != FieldKind::Full)
    throw std::invalid_argument("assemble_stability: u and u~ must be full fields on one grid");
  if (!q.compatible(q_tilde) || q.kind() != FieldKind::CrossSection)
    throw std::invalid_argument("assemble_stability: q and q~ must be cross-section traces");

  StabilityReport r;
  r.epsilon = epsilon;
  r.open = grid.domain().truncated;

  const ScalarField dq = q - q_tilde;
  const auto [lo, hi] = level_window(grid, epsilon, T - epsilon);
  r.lhs = integrate_levels(dq * dq, lo, hi);

  const ScalarField dm = measurement(u_tilde) - measurement(u);
  const ScalarField dm2 = dm * dm;
  r.rhs_boundary = integrate(dm2);
  r.rhs_trace = mixed_sobolev_norm(column_of(u_tilde - u, grid.alpha_index()));
  r.empirical_C_eps = empirical_ratio(r.lhs, r.rhs_boundary + r.rhs_trace);
  r.r_bound = std::sqrt(std::max(integrate(q * q), integrate(q_tilde * q_tilde)));

  if (r.open) {
    ScalarField tail = dm2;
    const double R = grid.domain().L;
    for (Index k = 0; k < grid.levels(); ++k)
      for (Index i = 0; i < grid.nodes1(); ++i)
        if (std::abs(grid.x1(i)) <= 0.9 * R) tail(k, i, 0) = 0.0;
    r.truncation_budget = empirical_ratio(integrate(tail), r.rhs_boundary);
  }
  return r;
}

PerturbationSweep perturbation_sweep(const StabilityScenario& sc, const std::vector<double>& thetas,
                                     const std::vector<double>& epsilons) {
  if (thetas.empty() || epsilons.empty())
    throw std::invalid_argument("perturbation_sweep: empty theta or epsilon list");
  for (double th : thetas)
    if (!(th > 0.0)) throw std::invalid_argument("perturbation_sweep: theta must be positive");
  for (double e : epsilons)
    if (!(e > 0.0 && e < 0.5 * sc.grid.domain().T))
      throw std::invalid_argument("perturbation_sweep: epsilon must lie in (0, T/2)");

  std::vector<std::future<std::vector<StabilityReport>>> jobs;
  for (double th : thetas)
    jobs.push_back(std::async(std::launch::async, [&sc, &epsilons, th] {
      const ScalarField q_tilde = sc.q + th * sc.dq;
      const PairSolution pair = manufacture_pair(sc.grid, sc.q, q_tilde, sc.f, sc.initial);
      std::vector<StabilityReport> out;
      for (double e : epsilons) {
        StabilityReport r = assemble_stability(pair.u, pair.u_tilde, sc.q, q_tilde, e);
        r.theta = th;
        out.push_back(r);
      }
      return out;
    }));

  PerturbationSweep sw;
  sw.thetas = thetas;
  sw.epsilons = epsilons;
  for (auto& job : jobs)
    for (auto& r : job.get()) sw.reports.push_back(r);

  for (const auto& r : sw.reports)
    sw.all_finite = sw.all_finite && std::isfinite(r.empirical_C_eps) && std::isfinite(r.lhs) &&
                    std::isfinite(r.rhs_boundary) && std::isfinite(r.rhs_trace);

  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    std::vector<double> lhs;
    double c_lo = std::numeric_limits<double>::infinity(), c_hi = 0.0;
    for (std::size_t t = 0; t < thetas.size(); ++t) {
      lhs.push_back(sw.at(t, e).lhs);
      c_lo = std::min(c_lo, sw.at(t, e).empirical_C_eps);
      c_hi = std::max(c_hi, sw.at(t, e).empirical_C_eps);
    }
    sw.lhs_order.push_back(loglog_slope(thetas, lhs));
    sw.C_spread.push_back(empirical_ratio(c_hi, c_lo));
  }
  for (std::size_t t = 0; t < thetas.size(); ++t)
    for (std::size_t a = 0; a < epsilons.size(); ++a)
      for (std::size_t b = 0; b < epsilons.size(); ++b)
        if (epsilons[a] < epsilons[b] && sw.at(t, a).lhs < sw.at(t, b).lhs)
          sw.window_monotone = false;
  return sw;
}

}  // namespace waveguide
