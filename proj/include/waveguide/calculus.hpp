#pragma once

#include <waveguide/field.hpp>

#include <stdexcept>
#include <utility>

namespace waveguide {

namespace detail {

// Centred differences inside, one-sided second-order at both ends. Needs n >= 3.
template <typename Scalar>
void first_derivative(const Scalar* in, Scalar* out, Index n, Index stride, double h) {
  const double inv = 1.0 / (2.0 * h);
  auto at = [&](Index i) { return in[i * stride]; };
  out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv;
  for (Index i = 1; i + 1 < n; ++i) out[i * stride] = (at(i + 1) - at(i - 1)) * inv;
  out[(n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv;
}

// Three-point centred stencil inside, four-point one-sided at the ends. Needs n >= 4.
template <typename Scalar>
void second_derivative(const Scalar* in, Scalar* out, Index n, Index stride, double h) {
  const double inv = 1.0 / (h * h);
  auto at = [&](Index i) { return in[i * stride]; };
  out[0] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * inv;
  for (Index i = 1; i + 1 < n; ++i)
    out[i * stride] = (at(i - 1) - 2.0 * at(i) + at(i + 1)) * inv;
  out[(n - 1) * stride] =
      (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) * inv;
}

template <typename Scalar, typename Kernel>
Field<Scalar> apply_along(const Field<Scalar>& f, Axis axis, Index min_extent, Kernel kernel) {
  const FieldShape& shape = f.shape();
  const Index n = shape.extent(axis);
  if (n < min_extent) throw std::invalid_argument("too few nodes along axis for stencil");
  Field<Scalar> out = f.with_values(f.values());
  const Index stride = shape.stride(axis);
  const double h = f.grid().spacing(axis);
  const Scalar* in = f.values().data();
  Scalar* dst = out.values().data();
  for (Index k = 0; k < shape.levels; ++k)
    for (Index i = 0; i < shape.rows; ++i)
      for (Index j = 0; j < shape.cols; ++j) {
        const bool is_start = (axis == Axis::Time && k == 0) || (axis == Axis::X1 && i == 0) ||
                              (axis == Axis::X2 && j == 0);
        if (!is_start) continue;
        const Index offset = f.index(k, i, j);
        kernel(in + offset, dst + offset, n, stride, h);
      }
  return out;
}

}  // namespace detail

/// First partial derivative along an axis, second order everywhere.
template <typename Scalar>
Field<Scalar> partial(const Field<Scalar>& f, Axis axis) {
  return detail::apply_along(f, axis, 3, detail::first_derivative<Scalar>);
}

/// Second partial derivative along an axis, second order everywhere.
template <typename Scalar>
Field<Scalar> partial2(const Field<Scalar>& f, Axis axis) {
  return detail::apply_along(f, axis, 4, detail::second_derivative<Scalar>);
}

template <typename Scalar>
std::pair<Field<Scalar>, Field<Scalar>> gradient(const Field<Scalar>& f) {
  if (f.kind() != FieldKind::Full && f.kind() != FieldKind::Slice)
    throw std::invalid_argument("gradient needs a full field or a spatial slice");
  return {partial(f, Axis::X1), partial(f, Axis::X2)};
}

/// Five-point Laplacian in the interior.
template <typename Scalar>
Field<Scalar> laplacian(const Field<Scalar>& f) {
  if (f.kind() != FieldKind::Full && f.kind() != FieldKind::Slice)
    throw std::invalid_argument("laplacian needs a full field or a spatial slice");
  return partial2(f, Axis::X1) + partial2(f, Axis::X2);
}

template <typename Scalar>
Field<Scalar> time_derivative(const Field<Scalar>& f) {
  if (f.shape().levels < 4) throw std::invalid_argument("time derivative needs nt >= 4");
  return partial(f, Axis::Time);
}

/// Outward normal derivative on a boundary segment, one-sided second order.
template <typename Scalar>
Field<Scalar> normal_derivative(const Field<Scalar>& f, Segment segment) {
  if (f.kind() != FieldKind::Full) throw std::invalid_argument("normal_derivative needs a full field");
  const SpaceTimeGrid& grid = f.grid();
  auto out = Field<Scalar>::trace(grid, segment);
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  const double inv1 = 1.0 / (2.0 * grid.dx1());
  const double inv2 = 1.0 / (2.0 * grid.dx2());
  for (Index k = 0; k < grid.levels(); ++k) {
    switch (segment) {
      case Segment::Bottom:
        for (Index i = 0; i < n1; ++i)
          out(k, i, 0) = (3.0 * f(k, i, 0) - 4.0 * f(k, i, 1) + f(k, i, 2)) * inv2;
        break;
      case Segment::Top:
        for (Index i = 0; i < n1; ++i)
          out(k, i, 0) = (3.0 * f(k, i, n2 - 1) - 4.0 * f(k, i, n2 - 2) + f(k, i, n2 - 3)) * inv2;
        break;
      case Segment::Left:
        for (Index j = 0; j < n2; ++j)
          out(k, 0, j) = (3.0 * f(k, 0, j) - 4.0 * f(k, 1, j) + f(k, 2, j)) * inv1;
        break;
      case Segment::Right:
        for (Index j = 0; j < n2; ++j)
          out(k, 0, j) = (3.0 * f(k, n1 - 1, j) - 4.0 * f(k, n1 - 2, j) + f(k, n1 - 3, j)) * inv1;
        break;
    }
  }
  return out;
}

}  // namespace waveguide
