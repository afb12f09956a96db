#pragma once

#include <waveguide/grid.hpp>

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace waveguide {

enum class FieldKind { Full, Slice, BoundaryTrace, CrossSection };

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& text);

/// Extent of a field along (time, x1, x2). Traces collapse the normal axis to 1.
struct FieldShape {
  Index levels = 0;
  Index rows = 0;
  Index cols = 0;

  Index size() const { return levels * rows * cols; }
  Index extent(Axis axis) const {
    switch (axis) {
      case Axis::Time: return levels;
      case Axis::X1: return rows;
      case Axis::X2: return cols;
    }
    return 0;
  }
  Index stride(Axis axis) const {
    switch (axis) {
      case Axis::Time: return rows * cols;
      case Axis::X1: return cols;
      case Axis::X2: return 1;
    }
    return 0;
  }
  bool operator==(const FieldShape&) const = default;
};

inline FieldShape shape_for(const SpaceTimeGrid& grid, FieldKind kind,
                            std::optional<Segment> segment = std::nullopt) {
  switch (kind) {
    case FieldKind::Full: return {grid.levels(), grid.nodes1(), grid.nodes2()};
    case FieldKind::Slice: return {1, grid.nodes1(), grid.nodes2()};
    case FieldKind::CrossSection: return {grid.levels(), 1, grid.nodes2()};
    case FieldKind::BoundaryTrace:
      if (!segment) throw std::invalid_argument("boundary trace needs a segment");
      if (*segment == Segment::Bottom || *segment == Segment::Top)
        return {grid.levels(), grid.nodes1(), 1};
      return {grid.levels(), 1, grid.nodes2()};
  }
  return {};
}

/// Sampled real function on a space-time grid, stored row-major in (time, x1, x2).
template <typename Scalar>
class Field {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using SliceMap = Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstSliceMap =
      Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  Field() = default;

  Field(SpaceTimeGrid grid, FieldKind kind, std::optional<Segment> segment = std::nullopt,
        Scalar fill = Scalar(0))
      : grid_(std::move(grid)), kind_(kind), segment_(segment) {
    if (kind_ != FieldKind::BoundaryTrace) segment_.reset();
    shape_ = shape_for(grid_, kind_, segment_);
    values_ = Values::Constant(shape_.size(), fill);
  }

  Field(SpaceTimeGrid grid, FieldKind kind, std::optional<Segment> segment, Values values)
      : Field(std::move(grid), kind, segment) {
    if (values.size() != shape_.size())
      throw std::invalid_argument("field value count does not match grid shape");
    values_ = std::move(values);
  }

  static Field full(const SpaceTimeGrid& grid, Scalar fill = Scalar(0)) {
    return Field(grid, FieldKind::Full, std::nullopt, fill);
  }
  static Field slice(const SpaceTimeGrid& grid, Scalar fill = Scalar(0)) {
    return Field(grid, FieldKind::Slice, std::nullopt, fill);
  }
  static Field cross_section(const SpaceTimeGrid& grid, Scalar fill = Scalar(0)) {
    return Field(grid, FieldKind::CrossSection, std::nullopt, fill);
  }
  static Field trace(const SpaceTimeGrid& grid, Segment segment, Scalar fill = Scalar(0)) {
    return Field(grid, FieldKind::BoundaryTrace, segment, fill);
  }

  /// Samples fn(t, x1, x2) at every node.
  template <typename Fn>
  static Field full_from(const SpaceTimeGrid& grid, Fn&& fn) {
    Field out = full(grid);
    for (Index k = 0; k < grid.levels(); ++k)
      for (Index i = 0; i < grid.nodes1(); ++i)
        for (Index j = 0; j < grid.nodes2(); ++j)
          out(k, i, j) = fn(grid.t(k), grid.x1(i), grid.x2(j));
    return out;
  }
  /// Samples fn(x1, x2).
  template <typename Fn>
  static Field slice_from(const SpaceTimeGrid& grid, Fn&& fn) {
    Field out = slice(grid);
    for (Index i = 0; i < grid.nodes1(); ++i)
      for (Index j = 0; j < grid.nodes2(); ++j) out(0, i, j) = fn(grid.x1(i), grid.x2(j));
    return out;
  }
  /// Samples fn(t, x2).
  template <typename Fn>
  static Field cross_section_from(const SpaceTimeGrid& grid, Fn&& fn) {
    Field out = cross_section(grid);
    for (Index k = 0; k < grid.levels(); ++k)
      for (Index j = 0; j < grid.nodes2(); ++j) out(k, 0, j) = fn(grid.t(k), grid.x2(j));
    return out;
  }

  const SpaceTimeGrid& grid() const { return grid_; }
  FieldKind kind() const { return kind_; }
  std::optional<Segment> segment() const { return segment_; }
  const FieldShape& shape() const { return shape_; }

  Values& values() { return values_; }
  const Values& values() const { return values_; }

  Index index(Index k, Index i, Index j) const {
    return (k * shape_.rows + i) * shape_.cols + j;
  }
  Scalar& operator()(Index k, Index i, Index j) { return values_[index(k, i, j)]; }
  Scalar operator()(Index k, Index i, Index j) const { return values_[index(k, i, j)]; }

  SliceMap level(Index k) {
    return SliceMap(values_.data() + k * shape_.rows * shape_.cols, shape_.rows, shape_.cols);
  }
  ConstSliceMap level(Index k) const {
    return ConstSliceMap(values_.data() + k * shape_.rows * shape_.cols, shape_.rows,
                         shape_.cols);
  }

  /// Same grid, kind and segment with new values (for Eigen expressions over values()).
  template <typename Derived>
  Field with_values(const Eigen::ArrayBase<Derived>& values) const {
    return Field(grid_, kind_, segment_, Values(values));
  }

  bool compatible(const Field& other) const {
    return kind_ == other.kind_ && segment_ == other.segment_ && shape_ == other.shape_;
  }

  bool all_finite() const { return values_.isFinite().all(); }

  Scalar max_abs() const { return values_.size() ? values_.abs().maxCoeff() : Scalar(0); }

  Field& operator+=(const Field& rhs) { check(rhs); values_ += rhs.values_; return *this; }
  Field& operator-=(const Field& rhs) { check(rhs); values_ -= rhs.values_; return *this; }
  Field& operator*=(const Field& rhs) { check(rhs); values_ *= rhs.values_; return *this; }
  Field& operator*=(Scalar c) { values_ *= c; return *this; }

  friend Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
  friend Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
  friend Field operator*(Field lhs, const Field& rhs) { return lhs *= rhs; }
  friend Field operator*(Scalar c, Field rhs) { return rhs *= c; }
  friend Field operator*(Field lhs, Scalar c) { return lhs *= c; }
  friend Field operator/(const Field& lhs, const Field& rhs) {
    lhs.check(rhs);
    return lhs.with_values(lhs.values_ / rhs.values_);
  }
  Field operator-() const { return with_values(-values_); }

 private:
  void check(const Field& other) const {
    if (!compatible(other)) throw std::invalid_argument("field shapes do not match");
  }

  SpaceTimeGrid grid_;
  FieldKind kind_ = FieldKind::Full;
  std::optional<Segment> segment_;
  FieldShape shape_;
  Values values_;
};

using ScalarField = Field<double>;

/// Broadcasts a spatial slice over every time level.
template <typename Scalar>
Field<Scalar> broadcast_in_time(const Field<Scalar>& slice) {
  if (slice.kind() != FieldKind::Slice) throw std::invalid_argument("expected a spatial slice");
  auto out = Field<Scalar>::full(slice.grid());
  for (Index k = 0; k < out.shape().levels; ++k) out.level(k) = slice.level(0);
  return out;
}

/// Broadcasts a cross-section trace q(t, x2) along x1.
template <typename Scalar>
Field<Scalar> broadcast_along_x1(const Field<Scalar>& trace) {
  if (trace.kind() != FieldKind::CrossSection)
    throw std::invalid_argument("expected a cross-section trace");
  auto out = Field<Scalar>::full(trace.grid());
  for (Index k = 0; k < out.shape().levels; ++k)
    for (Index i = 0; i < out.shape().rows; ++i) out.level(k).row(i) = trace.level(k).row(0);
  return out;
}

/// Broadcasts an axial profile f(x1) over time and x2.
template <typename Scalar, typename Derived>
Field<Scalar> broadcast_axial(const SpaceTimeGrid& grid, const Eigen::ArrayBase<Derived>& f) {
  if (f.size() != grid.nodes1()) throw std::invalid_argument("axial profile size mismatch");
  auto out = Field<Scalar>::full(grid);
  for (Index k = 0; k < grid.levels(); ++k)
    for (Index i = 0; i < grid.nodes1(); ++i) out.level(k).row(i).setConstant(f(i));
  return out;
}

/// Values of a full field on one boundary segment, as a boundary trace.
template <typename Scalar>
Field<Scalar> trace_of(const Field<Scalar>& f, Segment segment) {
  if (f.kind() != FieldKind::Full) throw std::invalid_argument("trace_of needs a full field");
  auto out = Field<Scalar>::trace(f.grid(), segment);
  const Index n1 = f.shape().rows, n2 = f.shape().cols;
  for (Index k = 0; k < f.shape().levels; ++k) {
    switch (segment) {
      case Segment::Bottom: out.level(k).col(0) = f.level(k).col(0); break;
      case Segment::Top: out.level(k).col(0) = f.level(k).col(n2 - 1); break;
      case Segment::Left: out.level(k).row(0) = f.level(k).row(0); break;
      case Segment::Right: out.level(k).row(0) = f.level(k).row(n1 - 1); break;
    }
  }
  return out;
}

/// Values of a full field on the node column x1 = x1(i), as a cross-section trace.
template <typename Scalar>
Field<Scalar> column_of(const Field<Scalar>& f, Index i) {
  if (f.kind() != FieldKind::Full) throw std::invalid_argument("column_of needs a full field");
  auto out = Field<Scalar>::cross_section(f.grid());
  for (Index k = 0; k < f.shape().levels; ++k) out.level(k).row(0) = f.level(k).row(i);
  return out;
}

/// Time level k of a full field as a spatial slice.
template <typename Scalar>
Field<Scalar> slice_of(const Field<Scalar>& f, Index k) {
  auto out = Field<Scalar>::slice(f.grid());
  out.level(0) = f.level(k);
  return out;
}

}  // namespace waveguide
