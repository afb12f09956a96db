#pragma once

#include <waveguide/field.hpp>

#include <stdexcept>

namespace waveguide {

/// Integration domains: Q, a boundary segment times (0,T), the cross-section times (0,T),
/// or the spatial domain at one instant.
enum class Region { SpaceTime, BoundaryTime, CrossSectionTime, Space };

/// Composite trapezoid weights for n equally spaced nodes.
inline Eigen::ArrayXd trapezoid_weights(Index n, double h) {
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(n, h);
  if (n == 1) return Eigen::ArrayXd::Ones(1);
  w(0) *= 0.5;
  w(n - 1) *= 0.5;
  return w;
}

/// Tensor trapezoid rule over every axis of extent > 1, restricted to levels [k_lo, k_hi].
template <typename Scalar>
Scalar integrate_levels(const Field<Scalar>& f, Index k_lo, Index k_hi) {
  const FieldShape& s = f.shape();
  const SpaceTimeGrid& grid = f.grid();
  if (k_lo < 0 || k_hi >= s.levels || k_lo > k_hi) return Scalar(0);
  const Eigen::ArrayXd wt =
      s.levels > 1 ? trapezoid_weights(k_hi - k_lo + 1, grid.dt()) : Eigen::ArrayXd::Ones(1);
  const Eigen::ArrayXd w1 = trapezoid_weights(s.rows, grid.dx1());
  const Eigen::ArrayXd w2 = trapezoid_weights(s.cols, grid.dx2());
  Scalar total(0);
  for (Index k = k_lo; k <= k_hi; ++k) {
    const auto slab = f.level(k);
    Scalar level_sum(0);
    for (Index i = 0; i < s.rows; ++i) level_sum += w1(i) * (slab.row(i).transpose() * w2).sum();
    total += wt(k - k_lo) * level_sum;
  }
  return total;
}

template <typename Scalar>
Scalar integrate(const Field<Scalar>& f) {
  return integrate_levels(f, Index(0), f.shape().levels - 1);
}

template <typename Scalar>
Scalar integrate(const Field<Scalar>& f, Region region) {
  const bool ok = (region == Region::SpaceTime && f.kind() == FieldKind::Full) ||
                  (region == Region::BoundaryTime && f.kind() == FieldKind::BoundaryTrace) ||
                  (region == Region::CrossSectionTime && f.kind() == FieldKind::CrossSection) ||
                  (region == Region::Space && f.kind() == FieldKind::Slice);
  if (!ok) throw std::invalid_argument("field kind does not match integration region");
  return integrate(f);
}

/// Levels whose time lies in [t_lo, t_hi] (with a relative slack of 1e-12 dt).
inline std::pair<Index, Index> level_window(const SpaceTimeGrid& grid, double t_lo, double t_hi) {
  const double slack = 1e-12 * grid.dt();
  Index lo = 0;
  while (lo < grid.levels() && grid.t(lo) < t_lo - slack) ++lo;
  Index hi = grid.levels() - 1;
  while (hi >= 0 && grid.t(hi) > t_hi + slack) --hi;
  return {lo, hi};
}

/// Signed running trapezoid integral along x1 starting from node column `anchor`:
/// out(k,i,j) = integral from x1(anchor) to x1(i) of f(k,.,j).
template <typename Scalar>
Field<Scalar> cumulative_x1(const Field<Scalar>& f, Index anchor) {
  if (f.kind() != FieldKind::Full && f.kind() != FieldKind::Slice)
    throw std::invalid_argument("cumulative_x1 needs a full field or a spatial slice");
  const FieldShape& s = f.shape();
  if (anchor < 0 || anchor >= s.rows) throw std::out_of_range("anchor column outside grid");
  const double half = 0.5 * f.grid().dx1();
  Field<Scalar> out = f.with_values(Field<Scalar>::Values::Zero(s.size()));
  for (Index k = 0; k < s.levels; ++k) {
    auto src = f.level(k);
    auto dst = out.level(k);
    for (Index i = anchor + 1; i < s.rows; ++i)
      dst.row(i) = dst.row(i - 1) + half * (src.row(i - 1) + src.row(i));
    for (Index i = anchor - 1; i >= 0; --i)
      dst.row(i) = dst.row(i + 1) - half * (src.row(i + 1) + src.row(i));
  }
  return out;
}

}  // namespace waveguide
