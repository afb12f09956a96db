#pragma once

#include <waveguide/weights.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace waveguide {

struct SweepPoint {
  double s = 0.0;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double empirical_C = 0.0;
};

/// Both sides of one inequality on a concrete grid, plus a parameter sweep.
///
/// Integrals carrying exp(-2 s w) are evaluated with exp(-2 s (w - w_min)), w_min being the
/// smallest weight over interior levels; `log_scale` = -2 s w_min restores absolute values.
/// Ratios are unaffected.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  std::vector<std::pair<std::string, double>> lhs_terms;
  std::vector<std::pair<std::string, double>> rhs_terms;
  double empirical_C = 0.0;
  double log_scale = 0.0;
  std::vector<SweepPoint> sweep;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, bool>> flags;

  double rhs() const;
  bool passed() const;
  std::optional<double> metric(const std::string& key) const;
  std::optional<bool> flag(const std::string& key) const;
};

/// LHS / RHS with the conventions 0/0 = 0 and x/0 = inf for x > 0.
double empirical_ratio(double lhs, double rhs);

/// exp(-2 s (w - w_min)) at interior levels, 0 at the endpoints, clamped below 1e-300.
struct ShiftedDamping {
  ScalarField field;
  double log_scale = 0.0;
};
ShiftedDamping shifted_damping(const WeightSystem& ws, double s, double exponent_factor = 2.0);

struct I1Terms {
  double laplacian = 0.0;   ///< (s g)^-1 (Lap z)^2
  double time = 0.0;        ///< (s g)^-1 (d_t z)^2
  double gradient = 0.0;    ///< s g |grad z|^2
  double zero_order = 0.0;  ///< (s g)^3 z^2
  double log_scale = 0.0;
  double total() const { return laplacian + time + gradient + zero_order; }
};

/// Weighted norm of the bounded-waveguide Carleman estimate, at parameter s.
I1Terms weighted_norm_I1(const ScalarField& z, const WeightSystem& ws, double s);
inline I1Terms weighted_norm_I1(const ScalarField& z, const WeightSystem& ws) {
  return weighted_norm_I1(z, ws, ws.params.s);
}

/// Integral over Q of |int_alpha^x1 F dxi|^2 exp(-2 s w) and of |F|^2 exp(-2 s w).
std::pair<double, double> prefix_integral_pair(const ScalarField& F, const WeightSystem& ws,
                                               double s);

/// Bounded regime. Sweeps s, records C(s) and the transfer-ratio scan max r(x1, xi).
/// Flags: s_uniform (max C <= 2 C(s_1)), r_le_one (max r <= 1 + 1e-12).
InequalityReport lemma_bounded_check(const ScalarField& F, const WeightSystem& ws,
                                     const std::vector<double>& s_list);

/// Open regime. Sweeps s and fits the log-log slope of C(s).
/// Flags: slope_in_band (slope in [-2.5, -1.5]), s2_bounded (C s^2 <= 4 C(s_1) s_1^2).
InequalityReport lemma_open_check(const ScalarField& F, const WeightSystem& ws,
                                  const std::vector<double>& s_list);

/// Least-squares slope of log y against log x over the positive entries.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConjugatedParts {
  ScalarField Mw;           ///< exp(-s phi) H(exp(s phi) w), on the grid
  ScalarField Mw_expanded;  ///< product-rule form with closed-form weight derivatives
  ScalarField M1;
  ScalarField M2;
  ScalarField residual;     ///< Mw - (M1 + M2)
};

class WeightOverflow : public std::overflow_error {
 public:
  WeightOverflow(const std::string& what, Index k, Index i, Index j)
      : std::overflow_error(what), k(k), i(i), j(j) {}
  Index k, i, j;
};

/// Open regime. Throws WeightOverflow when s phi > 700 at a node where w != 0.
ConjugatedParts conjugated_operator(const ScalarField& w, const WeightSystem& ws, double s);
inline ConjugatedParts conjugated_operator(const ScalarField& w, const WeightSystem& ws) {
  return conjugated_operator(w, ws, ws.params.s);
}

/// Closed form of Mw - M1 w - M2 w given w and its derivatives:
/// 2 s (phi_t w - 2 grad phi . grad w - Lap phi w).
ScalarField decomposition_residual_oracle(const WeightSystem& ws, double s, const ScalarField& w,
                                          const ScalarField& w_x1, const ScalarField& w_x2);

/// First sweep index after which C is non-increasing within 10% (C_{m+1} <= 1.1 C_m for
/// every later pair). Needs at least one point after s0.
std::optional<std::size_t> empirical_s0(const std::vector<double>& C);

/// Bounded regime. z must vanish on the boundary within 10 dx^2.
/// One sweep point per (lambda, s); each lambda rebuilds the weight.
InequalityReport carleman_check_bounded(const ScalarField& z, const ScalarField& Pz,
                                        const WeightSystem& ws, const std::vector<double>& s_list,
                                        const std::vector<double>& lambda_list = {});

/// Open regime, truncated domain. u must vanish on the truncated boundary within 10 dx^2.
InequalityReport carleman_check_open(const ScalarField& u, const ScalarField& Hu,
                                     const WeightSystem& ws, const std::vector<double>& s_list,
                                     const std::vector<double>& lambda_list = {});

/// Boundary-vanishing test functions tau(t) X(x1) Y(x2) with closed-form P = d_t - Lap.
struct BumpFunction {
  std::string name;
  ScalarField z;
  ScalarField Pz;
  ScalarField z_x1;
  ScalarField z_x2;
};
std::vector<BumpFunction> sigma_vanishing_bumps(const SpaceTimeGrid& grid);

/// Smooth bump supported in t in [T/4, 3T/4], vanishing on the spatial boundary.
BumpFunction compact_bump(const SpaceTimeGrid& grid);

/// Random smooth field: truncated cosine series with seeded coefficients (nonzero on the boundary).
ScalarField random_smooth_field(const SpaceTimeGrid& grid, std::uint64_t seed, int modes = 3);

}  // namespace waveguide
