#include <waveguide/grid.hpp>
#include <waveguide/field.hpp>

#include <cmath>

namespace waveguide {

std::string to_string(Side side) { return side == Side::Top ? "top" : "bottom"; }

std::string to_string(Segment segment) {
  switch (segment) {
    case Segment::Bottom: return "bottom";
    case Segment::Top: return "top";
    case Segment::Left: return "left";
    case Segment::Right: return "right";
  }
  return "unknown";
}

Side side_from_string(const std::string& text) {
  if (text == "top") return Side::Top;
  if (text == "bottom") return Side::Bottom;
  throw std::invalid_argument("unknown side '" + text + "'");
}

Segment segment_from_string(const std::string& text) {
  if (text == "bottom") return Segment::Bottom;
  if (text == "top") return Segment::Top;
  if (text == "left") return Segment::Left;
  if (text == "right") return Segment::Right;
  throw std::invalid_argument("unknown boundary segment '" + text + "'");
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Full: return "full";
    case FieldKind::Slice: return "slice";
    case FieldKind::BoundaryTrace: return "boundary-trace";
    case FieldKind::CrossSection: return "cross-section";
  }
  return "unknown";
}

FieldKind field_kind_from_string(const std::string& text) {
  if (text == "full") return FieldKind::Full;
  if (text == "slice") return FieldKind::Slice;
  if (text == "boundary-trace") return FieldKind::BoundaryTrace;
  if (text == "cross-section") return FieldKind::CrossSection;
  throw std::invalid_argument("unknown field kind '" + text + "'");
}

void WaveguideDomain::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("domain: L must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("domain: h must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("domain: T must be positive");
  if (!(alpha > -L && alpha < L)) throw std::invalid_argument("domain: alpha must lie in (-L, L)");
}

SpaceTimeGrid::SpaceTimeGrid(const WaveguideDomain& domain, int n1, int n2, int nt)
    : domain_(domain), n1_(n1), n2_(n2), nt_(nt) {
  domain_.validate();
  if (n1 < 4 || n2 < 4 || nt < 4) throw std::invalid_argument("grid: counts must be >= 4");
  dx1_ = 2.0 * domain_.L / (n1_ + 1);
  dx2_ = domain_.h / (n2_ + 1);
  dt_ = domain_.T / nt_;
  const double position = (domain_.alpha + domain_.L) / dx1_;
  alpha_index_ = static_cast<Index>(std::llround(position));
  if (alpha_index_ > nodes1() - 1) alpha_index_ = nodes1() - 1;
  alpha_snap_ = std::abs(x1(alpha_index_) - domain_.alpha);
}

double SpaceTimeGrid::spacing(Axis axis) const {
  switch (axis) {
    case Axis::Time: return dt_;
    case Axis::X1: return dx1_;
    case Axis::X2: return dx2_;
  }
  return 0.0;
}

// End nodes are pinned to the exact boundary coordinates.
double SpaceTimeGrid::x1(Index i) const {
  if (i == nodes1() - 1) return domain_.L;
  return -domain_.L + static_cast<double>(i) * dx1_;
}

double SpaceTimeGrid::x2(Index j) const {
  if (j == nodes2() - 1) return domain_.h;
  return static_cast<double>(j) * dx2_;
}

double SpaceTimeGrid::t(Index k) const {
  if (k == levels() - 1) return domain_.T;
  return static_cast<double>(k) * dt_;
}

Eigen::ArrayXd SpaceTimeGrid::x1_nodes() const {
  Eigen::ArrayXd x(nodes1());
  for (Index i = 0; i < x.size(); ++i) x(i) = x1(i);
  return x;
}

Eigen::ArrayXd SpaceTimeGrid::x2_nodes() const {
  Eigen::ArrayXd x(nodes2());
  for (Index j = 0; j < x.size(); ++j) x(j) = x2(j);
  return x;
}

Eigen::ArrayXd SpaceTimeGrid::t_levels() const {
  Eigen::ArrayXd x(levels());
  for (Index k = 0; k < x.size(); ++k) x(k) = t(k);
  return x;
}

bool SpaceTimeGrid::is_dirichlet(Segment segment) const {
  if (segment == Segment::Bottom || segment == Segment::Top) return true;
  return domain_.truncated;
}

bool SpaceTimeGrid::same_shape(const SpaceTimeGrid& other) const {
  return n1_ == other.n1_ && n2_ == other.n2_ && nt_ == other.nt_ &&
         domain_.L == other.domain_.L && domain_.h == other.domain_.h &&
         domain_.T == other.domain_.T;
}

SpaceTimeGrid build_grid(const WaveguideDomain& domain, int n1, int n2, int nt) {
  return SpaceTimeGrid(domain, n1, n2, nt);
}

}  // namespace waveguide
