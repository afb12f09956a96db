#pragma once

#include <waveguide/field.hpp>

#include <functional>
#include <string>
#include <vector>

namespace waveguide {

/// Bounded waveguide (weight eta) or open waveguide (weight phi).
enum class Regime { Bounded, Open };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& text);

struct WeightParams {
  double lambda = 1.0;
  double s = 1.0;
  Regime regime = Regime::Bounded;
  /// Offset of the cross-section profile, psi2 = distance-to-unobserved-side + delta.
  double delta = 0.5;
  /// Minimum of the axial profile psi1.
  double c1 = 0.5;

  void validate() const;
};

/// Closed-form one-dimensional profile with its first two derivatives.
struct Profile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> curvature;

  static Profile constant(double c);
};

/// psi2(x2) = x2 + delta when the top side is observed, h - x2 + delta otherwise.
Profile make_psi2(const WaveguideDomain& domain, double delta);

/// psi1 with psi1' = (x1 - alpha)(L - x1)(x1 + L), shifted so that min psi1 = c1 (at alpha).
Profile make_psi1(const WaveguideDomain& domain, double c1);

/// psi1(x1) = exp(x1), the axial factor of the open-waveguide weight.
Profile make_psi1_open();

/// Carleman weight system on a grid.
///
/// The weight is g(t) * S(x) with g = 1 / (t (T - t)) and
///   S = exp(2 lambda |psi|_inf) - exp(lambda psi)   (bounded, eta)
///   S = exp(lambda psi)                             (open, phi).
/// g is singular at t = 0 and t = T; those two levels are stored as 0 in `g`
/// and `weight`, and every factor exp(-2 s weight) is defined as 0 there.
struct WeightSystem {
  WeightParams params;
  SpaceTimeGrid grid;
  Profile psi1;
  Profile psi2;
  ScalarField psi;        ///< spatial slice
  ScalarField dpsi_dx1;   ///< spatial slice, closed form
  ScalarField dpsi_dx2;   ///< spatial slice, closed form
  ScalarField lap_psi;    ///< spatial slice, closed form
  ScalarField spatial;    ///< S(x), spatial slice
  Eigen::ArrayXd g;       ///< g(t_k), 0 at the endpoints
  Eigen::ArrayXd dg_dt;   ///< g'(t_k), 0 at the endpoints
  ScalarField weight;     ///< eta or phi, full field, 0 at the endpoints
  double psi_sup = 0.0;
  double C0_margin = 0.0;  ///< min |grad psi| over interior nodes

  bool interior_level(Index k) const { return k > 0 && k < grid.levels() - 1; }

  /// exp(-2 s weight), 0 at the endpoint levels; values below 1e-300 are clamped to 0.
  ScalarField damping(double s) const;
  ScalarField damping() const { return damping(params.s); }

  /// exp(-s weight) with the same conventions.
  ScalarField half_damping(double s) const;

  /// g broadcast to a full field (0 at the endpoints).
  ScalarField g_field() const;
};

/// Space and time derivatives of the weight, from the closed-form profiles.
struct WeightDerivatives {
  ScalarField dt;
  ScalarField dx1;
  ScalarField dx2;
  ScalarField lap;
};

WeightDerivatives weight_derivatives(const WeightSystem& ws);

WeightSystem assemble_weight(const WeightParams& params, const SpaceTimeGrid& grid);

/// Builds the system from explicit profiles; used to probe degenerate or invalid choices.
WeightSystem assemble_weight(const WeightParams& params, const SpaceTimeGrid& grid,
                             Profile psi1, Profile psi2);

struct BulletCheck {
  std::string name;
  bool passed = false;
  /// False when the bullet cannot be decided on a finite grid (open-strip asymptotics).
  bool verifiable = true;
  double margin = 0.0;
  std::string detail;
};

struct AssumptionReport {
  Regime regime = Regime::Bounded;
  std::vector<BulletCheck> bullets;

  double min_psi = 0.0;
  double min_grad_psi = 0.0;
  double max_normal_psi_unobserved = 0.0;
  double max_dx1_psi_left = 0.0;   ///< bounded: should be < 0
  double min_dx1_psi_right = 0.0;  ///< bounded: should be > 0

  // Open regime only.
  double kappa = 0.0;  ///< e^{-R} min psi2, lower bound of d psi / d x1 on [-R, R]
  double min_dx1_psi = 0.0;
  std::vector<std::pair<double, double>> tail_ratios;  ///< (R, min_x2 |psi(-R,x2) / R|)
  bool unbounded_strip_flag = false;

  bool all_passed() const;
};

AssumptionReport check_assumption_bounded(const WeightSystem& ws);

AssumptionReport check_assumption_open(const WeightSystem& ws,
                                       const std::vector<double>& tail_radii = {1, 2, 4, 8});

/// Grid scan of r(x1, xi) = exp(-2 s [w(t,x1,x2) - w(t,xi,x2)]) over xi between alpha and x1.
struct RatioScan {
  double max_log_r = 0.0;
  double max_r = 0.0;
  Index worst_level = 0;
  Index worst_x1 = 0;
  Index worst_xi = 0;
  Index worst_x2 = 0;
};

RatioScan scan_transfer_ratio(const WeightSystem& ws, double s);

}  // namespace waveguide
