#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace waveguide {

using Index = Eigen::Index;

/// Lateral side of the cross-section (0,h) carrying the observation.
enum class Side { Bottom, Top };

/// Boundary segments of the rectangle [-L,L] x [0,h].
/// Bottom/Top are the lateral walls x2 = 0 / x2 = h, Left/Right the end caps x1 = -L / x1 = L.
enum class Segment { Bottom, Top, Left, Right };

enum class Axis { Time = 0, X1 = 1, X2 = 2 };

std::string to_string(Side side);
std::string to_string(Segment segment);
Side side_from_string(const std::string& text);
Segment segment_from_string(const std::string& text);

struct WaveguideDomain {
  double L = 1.0;
  double h = 1.0;
  double T = 1.0;
  double alpha = 0.0;
  Side observed = Side::Top;
  /// Open-waveguide mode: L acts as truncation radius and every boundary is Dirichlet.
  bool truncated = false;

  void validate() const;
};

/// Uniform vertex-centred tensor grid on [0,T] x [-L,L] x [0,h].
///
/// n1 and n2 count interior nodes, so there are n1 + 2 nodes in x1 with
/// dx1 = 2L / (n1 + 1); likewise for x2. nt counts time steps, giving nt + 1
/// levels with dt = T / nt. The anchor alpha is snapped to the nearest x1 node.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid() = default;
  SpaceTimeGrid(const WaveguideDomain& domain, int n1, int n2, int nt);

  const WaveguideDomain& domain() const { return domain_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int nt() const { return nt_; }

  Index levels() const { return nt_ + 1; }
  Index nodes1() const { return n1_ + 2; }
  Index nodes2() const { return n2_ + 2; }

  double dx1() const { return dx1_; }
  double dx2() const { return dx2_; }
  double dt() const { return dt_; }
  double spacing(Axis axis) const;

  double x1(Index i) const;
  double x2(Index j) const;
  double t(Index k) const;

  Eigen::ArrayXd x1_nodes() const;
  Eigen::ArrayXd x2_nodes() const;
  Eigen::ArrayXd t_levels() const;

  Index alpha_index() const { return alpha_index_; }
  double alpha() const { return x1(alpha_index_); }
  double alpha_snap_distance() const { return alpha_snap_; }

  Segment observed_segment() const {
    return domain_.observed == Side::Top ? Segment::Top : Segment::Bottom;
  }
  Segment unobserved_segment() const {
    return domain_.observed == Side::Top ? Segment::Bottom : Segment::Top;
  }
  /// Lateral walls are always Dirichlet; caps are Neumann unless truncated.
  bool is_dirichlet(Segment segment) const;

  bool same_shape(const SpaceTimeGrid& other) const;

 private:
  WaveguideDomain domain_;
  int n1_ = 0;
  int n2_ = 0;
  int nt_ = 0;
  double dx1_ = 0.0;
  double dx2_ = 0.0;
  double dt_ = 0.0;
  Index alpha_index_ = 0;
  double alpha_snap_ = 0.0;
};

SpaceTimeGrid build_grid(const WaveguideDomain& domain, int n1, int n2, int nt);

}  // namespace waveguide
