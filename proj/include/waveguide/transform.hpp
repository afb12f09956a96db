#pragma once

#include <waveguide/forward.hpp>

namespace waveguide {

/// Reduction u, u~ -> v = u - u~ -> w = v / (f u~) -> z = d_x1 w with the coefficient
/// fields of the w- and z-equations. Everything is built from the discrete u~.
struct TransformBundle {
  ScalarField G;  ///< f u~
  ScalarField v;
  ScalarField w;
  ScalarField z;
  ScalarField A1;      ///< -2 d_x1 G / G
  ScalarField A2;      ///< -2 d_x2 G / G
  ScalarField a;       ///< (d_t G - Lap G) / G + q f
  ScalarField B1;      ///< -2 d_x1 (d_x1 G / G)
  ScalarField B2;      ///< +2 d_x1 (d_x2 G / G)
  ScalarField b_coef;  ///< -d_x1 a
  double c1_floor = 0.0;
};

/// pot is the potential of the u-system (q, f).
TransformBundle build_bundle(const ScalarField& u, const ScalarField& u_tilde,
                             const PotentialSpec& pot);

/// P w = d_t w - Lap w + A . grad w + a w.
ScalarField apply_P(const TransformBundle& bundle, const ScalarField& w);

/// Nodes whose nested stencils are all centred: `margin` nodes away from every face.
/// Levels and nodes outside the band are left at 0 in residual fields.
struct ResidualResult {
  ScalarField field;
  double l2 = 0.0;       ///< sqrt of the trapezoid integral of field^2 over Q
  double max_abs = 0.0;
};

/// d_t z - Lap z + A . grad z + a z + B1 z - B2 d_x2 w - b w, zero outside the interior band.
ResidualResult z_residual(const TransformBundle& bundle, Index margin = 2);

/// max |z| over the lateral walls and the caps, and over the level t = 0.
struct ZBoundary {
  double lateral = 0.0;
  double caps = 0.0;
  double initial = 0.0;
  double sigma() const { return std::max(lateral, caps); }
};
ZBoundary z_boundary(const TransformBundle& bundle);

/// Rebuilds w and d_x2 w from z by prefix trapezoid sums starting at the alpha column.
struct FtcErrors {
  double w_error = 0.0;
  double dx2w_error = 0.0;
};
FtcErrors ftc_representation_check(const TransformBundle& bundle);

/// P w must equal q~ - q, a function of (t, x2) only.
struct RhsIdentity {
  double x1_variation = 0.0;  ///< max over (t,x2) of the spread of P w along x1
  double mismatch = 0.0;      ///< max |P w - (q~ - q)| on the alpha column
};
RhsIdentity rhs_identity_check(const TransformBundle& bundle, const PotentialSpec& pot,
                               const PotentialSpec& pot_tilde, Index margin = 1);

}  // namespace waveguide
