#include <waveguide/transform.hpp>
#include <waveguide/calculus.hpp>
#include <waveguide/quadrature.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace waveguide {

namespace {

// Zeroes everything outside [margin, n - 1 - margin] on every axis.
ScalarField restrict_to_band(ScalarField f, Index margin) {
  const FieldShape& s = f.shape();
  for (Index k = 0; k < s.levels; ++k)
    for (Index i = 0; i < s.rows; ++i)
      for (Index j = 0; j < s.cols; ++j) {
        const bool inside = k >= margin && k < s.levels - margin && i >= margin &&
                            i < s.rows - margin && j >= margin && j < s.cols - margin;
        if (!inside) f(k, i, j) = 0.0;
      }
  return f;
}

}  // namespace

TransformBundle build_bundle(const ScalarField& u, const ScalarField& u_tilde,
                             const PotentialSpec& pot) {
  if (!u.compatible(u_tilde) || u.kind() != FieldKind::Full)
    throw std::invalid_argument("build_bundle: u and u~ must be full fields on one grid");
  const SpaceTimeGrid& grid = u.grid();
  pot.validate(grid);

  TransformBundle b;
  b.G = broadcast_axial<double>(grid, pot.f) * u_tilde;
  Index arg = 0;
  b.c1_floor = b.G.values().minCoeff(&arg);
  if (!(b.c1_floor > 0.0)) {
    const Index j = arg % b.G.shape().cols;
    const Index i = (arg / b.G.shape().cols) % b.G.shape().rows;
    const Index k = arg / (b.G.shape().cols * b.G.shape().rows);
    std::ostringstream os;
    os << "build_bundle: f u~ = " << b.c1_floor << " is not positive at node (t=" << grid.t(k)
       << ", x1=" << grid.x1(i) << ", x2=" << grid.x2(j) << ")";
    throw std::domain_error(os.str());
  }

  b.v = u - u_tilde;
  b.w = b.v / b.G;
  b.z = partial(b.w, Axis::X1);

  const auto [G1, G2] = gradient(b.G);
  const ScalarField r1 = G1 / b.G;
  const ScalarField r2 = G2 / b.G;
  b.A1 = -2.0 * r1;
  b.A2 = -2.0 * r2;
  b.a = (time_derivative(b.G) - laplacian(b.G)) / b.G + pot.V();
  b.B1 = -2.0 * partial(r1, Axis::X1);
  b.B2 = 2.0 * partial(r2, Axis::X1);
  b.b_coef = -partial(b.a, Axis::X1);
  return b;
}

ScalarField apply_P(const TransformBundle& bundle, const ScalarField& w) {
  const auto [w1, w2] = gradient(w);
  return time_derivative(w) - laplacian(w) + bundle.A1 * w1 + bundle.A2 * w2 + bundle.a * w;
}

ResidualResult z_residual(const TransformBundle& bundle, Index margin) {
  const ScalarField& z = bundle.z;
  const auto [z1, z2] = gradient(z);
  ScalarField r = time_derivative(z) - laplacian(z) + bundle.A1 * z1 + bundle.A2 * z2 +
                  bundle.a * z + bundle.B1 * z - bundle.B2 * partial(bundle.w, Axis::X2) -
                  bundle.b_coef * bundle.w;
  ResidualResult out{restrict_to_band(std::move(r), margin)};
  out.l2 = std::sqrt(integrate(out.field * out.field));
  out.max_abs = out.field.max_abs();
  return out;
}

ZBoundary z_boundary(const TransformBundle& bundle) {
  const ScalarField& z = bundle.z;
  ZBoundary out;
  out.lateral = std::max(trace_of(z, Segment::Bottom).max_abs(), trace_of(z, Segment::Top).max_abs());
  out.caps = std::max(trace_of(z, Segment::Left).max_abs(), trace_of(z, Segment::Right).max_abs());
  out.initial = z.level(0).abs().maxCoeff();
  return out;
}

FtcErrors ftc_representation_check(const TransformBundle& bundle) {
  const SpaceTimeGrid& grid = bundle.w.grid();
  const Index ia = grid.alpha_index();
  const ScalarField w2 = partial(bundle.w, Axis::X2);
  const ScalarField z_cum = cumulative_x1(bundle.z, ia);
  const ScalarField z2_cum = cumulative_x1(partial(bundle.z, Axis::X2), ia);
  FtcErrors out;
  for (Index k = 0; k < grid.levels(); ++k)
    for (Index i = 0; i < grid.nodes1(); ++i)
      for (Index j = 0; j < grid.nodes2(); ++j) {
        out.w_error = std::max(out.w_error,
                               std::abs(z_cum(k, i, j) + bundle.w(k, ia, j) - bundle.w(k, i, j)));
        out.dx2w_error =
            std::max(out.dx2w_error, std::abs(z2_cum(k, i, j) + w2(k, ia, j) - w2(k, i, j)));
      }
  return out;
}

RhsIdentity rhs_identity_check(const TransformBundle& bundle, const PotentialSpec& pot,
                               const PotentialSpec& pot_tilde, Index margin) {
  const ScalarField Pw = apply_P(bundle, bundle.w);
  const SpaceTimeGrid& grid = Pw.grid();
  const Index ia = grid.alpha_index();
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  RhsIdentity out;
  for (Index k = margin; k < grid.levels() - margin; ++k)
    for (Index j = margin; j < n2 - margin; ++j) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (Index i = margin; i < n1 - margin; ++i) {
        lo = std::min(lo, Pw(k, i, j));
        hi = std::max(hi, Pw(k, i, j));
      }
      out.x1_variation = std::max(out.x1_variation, hi - lo);
      const double target = pot_tilde.q(k, 0, j) - pot.q(k, 0, j);
      out.mismatch = std::max(out.mismatch, std::abs(Pw(k, ia, j) - target));
    }
  return out;
}

}  // namespace waveguide
