#pragma once

#include <waveguide/forward.hpp>

#include <vector>

namespace waveguide {

/// Integral over (0,T) of ||g||_H2 + ||d_t g||_H2 (squared norms), where
/// ||h||_H2^2 = ||h||^2 + ||d_x2 h||^2 + ||d_x2^2 h||^2 over the cross-section.
double mixed_sobolev_norm(const ScalarField& trace);

struct StabilityReport {
  double theta = 0.0;
  double epsilon = 0.0;
  double lhs = 0.0;           ///< ||q - q~||^2 over the levels in [eps, T - eps]
  double rhs_boundary = 0.0;  ///< ||d_nu d_x1 (u~ - u)||^2 over (0,T) x observed wall
  double rhs_trace = 0.0;     ///< mixed Sobolev norm of (u~ - u) on the alpha column
  double empirical_C_eps = 0.0;
  double r_bound = 0.0;       ///< max of the L2((0,T) x D) norms of q and q~
  bool open = false;
  /// Open mode: share of rhs_boundary coming from |x1| > 0.9 R, the part of the wall
  /// nearest the truncation.
  double truncation_budget = 0.0;
};

/// u solves with q, u_tilde with q_tilde; same grid and data.
StabilityReport assemble_stability(const ScalarField& u, const ScalarField& u_tilde,
                                   const ScalarField& q, const ScalarField& q_tilde, double epsilon);

struct StabilityScenario {
  SpaceTimeGrid grid;
  ScalarField q;
  ScalarField dq;
  Eigen::ArrayXd f;
  InitialProfile initial;
};

struct PerturbationSweep {
  std::vector<StabilityReport> reports;  ///< theta-major, epsilon-minor
  std::vector<double> thetas;
  std::vector<double> epsilons;
  /// Per epsilon: fitted order of lhs in theta, and max/min of empirical C over theta.
  std::vector<double> lhs_order;
  std::vector<double> C_spread;
  bool all_finite = true;
  /// lhs non-increasing in epsilon at every theta.
  bool window_monotone = true;

  const StabilityReport& at(std::size_t theta_index, std::size_t eps_index) const {
    return reports[theta_index * epsilons.size() + eps_index];
  }
};

/// One pair solve per theta (q~ = q + theta dq), concurrently; one report per (theta, eps).
PerturbationSweep perturbation_sweep(const StabilityScenario& scenario,
                                     const std::vector<double>& thetas,
                                     const std::vector<double>& epsilons);

}  // namespace waveguide
