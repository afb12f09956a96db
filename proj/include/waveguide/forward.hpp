#pragma once

#include <waveguide/field.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace waveguide {

/// V(t, x) = q(t, x2) f(x1) with f > 0.
struct PotentialSpec {
  ScalarField q;     ///< cross-section trace
  Eigen::ArrayXd f;  ///< axial profile at the x1 nodes

  double c_min() const { return f.minCoeff(); }
  ScalarField V() const;
  void validate(const SpaceTimeGrid& grid) const;

  template <typename Q, typename F>
  static PotentialSpec sample(const SpaceTimeGrid& grid, Q&& q, F&& f) {
    PotentialSpec p{ScalarField::cross_section_from(grid, q), Eigen::ArrayXd(grid.nodes1())};
    for (Index i = 0; i < grid.nodes1(); ++i) p.f(i) = f(grid.x1(i));
    return p;
  }
};

enum class CapCondition { Neumann, Dirichlet };

/// Boundary and initial data.
///
/// Lateral walls always carry Dirichlet values b. The caps x1 = -L, L carry the
/// outward Neumann data k-, k+ (bounded mode) or Dirichlet values (truncated mode).
struct BoundaryData {
  ScalarField b_bottom;   ///< trace on x2 = 0
  ScalarField b_top;      ///< trace on x2 = h
  ScalarField cap_minus;  ///< trace on x1 = -L
  ScalarField cap_plus;   ///< trace on x1 = L
  ScalarField u0;         ///< spatial slice
  CapCondition caps = CapCondition::Neumann;

  /// Optional closed-form extras used by the compatibility check: d_t b at t = 0 on the
  /// lateral walls (indexed by x1 node) and the Laplacian of u0.
  Eigen::ArrayXd rate0_bottom;
  Eigen::ArrayXd rate0_top;
  std::optional<ScalarField> u0_laplacian;

  /// Reads every datum from an exact solution u(t,x1,x2) with x1-derivative du_dx1.
  static BoundaryData from_exact(const SpaceTimeGrid& grid,
                                 const std::function<double(double, double, double)>& u,
                                 const std::function<double(double, double, double)>& du_dx1);

  BoundaryData operator+(const BoundaryData& other) const;
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

struct SolverOptions {
  /// Leading backward-Euler steps before Crank-Nicolson takes over.
  int startup_steps = 0;
};

/// Crank-Nicolson solve of u_t - Lap u + V u = 0 with the boundary data above.
/// Neumann caps use second-order ghost values; each step is a sparse direct LU solve.
ScalarField solve_heat(const SpaceTimeGrid& grid, const PotentialSpec& pot,
                       const BoundaryData& data, const SolverOptions& options = {});

/// Largest |d_t b(0,x) - Lap u0(x) + q(0,x2) f(x1) u0(x)| over the Dirichlet boundary nodes.
double compatibility_residual(const SpaceTimeGrid& grid, const PotentialSpec& pot,
                              const BoundaryData& data);

/// Smooth positive initial state with closed-form Laplacian and x1-derivative.
struct InitialProfile {
  std::string name;
  std::function<double(double, double)> value;
  std::function<double(double, double)> laplacian;
  std::function<double(double, double)> dx1;
};

InitialProfile unit_initial();
/// 1 + a cos(pi (x1 + L) / L); zero x1-slope at both caps.
InitialProfile cosine_initial(double L, double amplitude);
/// 1 + a exp(-x1^2), for truncated open-waveguide runs.
InitialProfile gaussian_initial(double amplitude);

struct PairSolution {
  ScalarField u;
  ScalarField u_tilde;
  BoundaryData data;
};

/// Shared positive data for the two systems (q, f) and (q~, f), built so that both
/// compatibility conditions hold: b = u0 exp(t c / u0), c = Lap u0 - q(0,x2) f u0,
/// zero Neumann data on the caps (bounded) or b on the caps (truncated).
BoundaryData make_positive_data(const SpaceTimeGrid& grid, const PotentialSpec& pot,
                                const InitialProfile& initial);

PairSolution manufacture_pair(const SpaceTimeGrid& grid, const ScalarField& q,
                              const ScalarField& q_tilde, const Eigen::ArrayXd& f,
                              const InitialProfile& initial);

/// d_nu (d_x1 u) on the observed lateral wall.
ScalarField measurement(const ScalarField& u);

/// u*(t,x) = exp(-int_0^t q) exp(-mu t) cos(pi (x1 + L) / (2L)) sin(pi x2 / h) with f = 1,
/// q(t) = q0 (1 + sin(2 pi t / T)) and mu = (pi / 2L)^2 + (pi / h)^2. Zero Neumann data on
/// the caps, zero Dirichlet data on the lateral walls.
struct SeparableOracle {
  WaveguideDomain domain;
  double q0 = 0.5;

  double mu() const;
  double q(double t) const;
  double q_integral(double t) const;
  double value(double t, double x1, double x2) const;
  double dx1(double t, double x1, double x2) const;
  double dx1dx2(double t, double x1, double x2) const;

  PotentialSpec potential(const SpaceTimeGrid& grid) const;
  BoundaryData data(const SpaceTimeGrid& grid) const;
  ScalarField exact(const SpaceTimeGrid& grid) const;
};

/// ||u - exact||_L2(Q) / ||exact||_L2(Q).
double relative_l2_error(const ScalarField& u, const ScalarField& exact);

}  // namespace waveguide
