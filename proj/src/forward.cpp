#include <waveguide/forward.hpp>
#include <waveguide/calculus.hpp>
#include <waveguide/quadrature.hpp>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>
#include <vector>

namespace waveguide {

ScalarField PotentialSpec::V() const {
  return broadcast_along_x1(q) * broadcast_axial<double>(q.grid(), f);
}

void PotentialSpec::validate(const SpaceTimeGrid& grid) const {
  if (q.kind() != FieldKind::CrossSection || q.shape() != shape_for(grid, FieldKind::CrossSection))
    throw std::invalid_argument("potential: q must be a cross-section trace on the grid");
  if (f.size() != grid.nodes1()) throw std::invalid_argument("potential: f has wrong length");
  for (Index i = 0; i < f.size(); ++i)
    if (!(f(i) > 0.0))
      throw std::invalid_argument("potential: f must be positive (fails at x1 = " +
                                  std::to_string(grid.x1(i)) + ")");
  if (!q.all_finite()) throw std::invalid_argument("potential: q has non-finite entries");
}

BoundaryData BoundaryData::from_exact(const SpaceTimeGrid& grid,
                                      const std::function<double(double, double, double)>& u,
                                      const std::function<double(double, double, double)>& du_dx1) {
  BoundaryData d;
  d.caps = grid.domain().truncated ? CapCondition::Dirichlet : CapCondition::Neumann;
  d.b_bottom = ScalarField::trace(grid, Segment::Bottom);
  d.b_top = ScalarField::trace(grid, Segment::Top);
  d.cap_minus = ScalarField::trace(grid, Segment::Left);
  d.cap_plus = ScalarField::trace(grid, Segment::Right);
  const double L = grid.domain().L, h = grid.domain().h;
  for (Index k = 0; k < grid.levels(); ++k) {
    const double t = grid.t(k);
    for (Index i = 0; i < grid.nodes1(); ++i) {
      d.b_bottom(k, i, 0) = u(t, grid.x1(i), 0.0);
      d.b_top(k, i, 0) = u(t, grid.x1(i), h);
    }
    for (Index j = 0; j < grid.nodes2(); ++j) {
      const double x2 = grid.x2(j);
      if (d.caps == CapCondition::Neumann) {
        d.cap_minus(k, 0, j) = -du_dx1(t, -L, x2);
        d.cap_plus(k, 0, j) = du_dx1(t, L, x2);
      } else {
        d.cap_minus(k, 0, j) = u(t, -L, x2);
        d.cap_plus(k, 0, j) = u(t, L, x2);
      }
    }
  }
  d.u0 = ScalarField::slice_from(grid, [&](double x1, double x2) { return u(0.0, x1, x2); });
  return d;
}

BoundaryData BoundaryData::operator+(const BoundaryData& o) const {
  if (caps != o.caps) throw std::invalid_argument("boundary data: cap conditions differ");
  BoundaryData d;
  d.caps = caps;
  d.b_bottom = b_bottom + o.b_bottom;
  d.b_top = b_top + o.b_top;
  d.cap_minus = cap_minus + o.cap_minus;
  d.cap_plus = cap_plus + o.cap_plus;
  d.u0 = u0 + o.u0;
  return d;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

class UnknownMap {
 public:
  explicit UnknownMap(const SpaceTimeGrid& grid)
      : i0_(grid.domain().truncated ? 1 : 0),
        i1_(grid.domain().truncated ? grid.nodes1() - 2 : grid.nodes1() - 1),
        m2_(grid.nodes2() - 2) {}

  Index size() const { return (i1_ - i0_ + 1) * m2_; }
  bool contains(Index i, Index j) const { return i >= i0_ && i <= i1_ && j >= 1 && j <= m2_; }
  Index operator()(Index i, Index j) const { return (i - i0_) * m2_ + (j - 1); }
  Index i_begin() const { return i0_; }
  Index i_end() const { return i1_; }

 private:
  Index i0_, i1_, m2_;
};

struct Discretization {
  SparseMatrix laplacian;
  UnknownMap map;
};

Discretization assemble_laplacian(const SpaceTimeGrid& grid) {
  UnknownMap map(grid);
  const bool neumann = !grid.domain().truncated;
  const Index n1 = grid.nodes1();
  const double c1 = 1.0 / (grid.dx1() * grid.dx1());
  const double c2 = 1.0 / (grid.dx2() * grid.dx2());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(map.size()) * 5);
  for (Index i = map.i_begin(); i <= map.i_end(); ++i)
    for (Index j = 1; j + 1 < grid.nodes2(); ++j) {
      const Index p = map(i, j);
      entries.emplace_back(p, p, -2.0 * c1 - 2.0 * c2);
      if (map.contains(i, j - 1)) entries.emplace_back(p, map(i, j - 1), c2);
      if (map.contains(i, j + 1)) entries.emplace_back(p, map(i, j + 1), c2);
      if (neumann && i == 0) {
        entries.emplace_back(p, map(1, j), 2.0 * c1);
      } else if (neumann && i == n1 - 1) {
        entries.emplace_back(p, map(n1 - 2, j), 2.0 * c1);
      } else {
        if (map.contains(i - 1, j)) entries.emplace_back(p, map(i - 1, j), c1);
        if (map.contains(i + 1, j)) entries.emplace_back(p, map(i + 1, j), c1);
      }
    }
  SparseMatrix L(map.size(), map.size());
  L.setFromTriplets(entries.begin(), entries.end());
  L.makeCompressed();
  return {std::move(L), map};
}

// Boundary contribution l(t_k) so that the discrete Laplacian is L x + l.
Eigen::VectorXd boundary_load(const SpaceTimeGrid& grid, const UnknownMap& map,
                              const BoundaryData& data, Index k) {
  const bool neumann = data.caps == CapCondition::Neumann;
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  const double c1 = 1.0 / (grid.dx1() * grid.dx1());
  const double c2 = 1.0 / (grid.dx2() * grid.dx2());
  Eigen::VectorXd l = Eigen::VectorXd::Zero(map.size());
  for (Index i = map.i_begin(); i <= map.i_end(); ++i) {
    l(map(i, 1)) += c2 * data.b_bottom(k, i, 0);
    l(map(i, n2 - 2)) += c2 * data.b_top(k, i, 0);
  }
  for (Index j = 1; j + 1 < n2; ++j) {
    if (neumann) {
      l(map(0, j)) += 2.0 * data.cap_minus(k, 0, j) / grid.dx1();
      l(map(n1 - 1, j)) += 2.0 * data.cap_plus(k, 0, j) / grid.dx1();
    } else {
      l(map(1, j)) += c1 * data.cap_minus(k, 0, j);
      l(map(n1 - 2, j)) += c1 * data.cap_plus(k, 0, j);
    }
  }
  return l;
}

Eigen::VectorXd potential_at(const SpaceTimeGrid& grid, const UnknownMap& map,
                             const PotentialSpec& pot, Index k) {
  Eigen::VectorXd v(map.size());
  for (Index i = map.i_begin(); i <= map.i_end(); ++i)
    for (Index j = 1; j + 1 < grid.nodes2(); ++j) v(map(i, j)) = pot.q(k, 0, j) * pot.f(i);
  return v;
}

void write_level(const SpaceTimeGrid& grid, const UnknownMap& map, const BoundaryData& data,
                 const Eigen::VectorXd& x, Index k, ScalarField& u) {
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  for (Index i = map.i_begin(); i <= map.i_end(); ++i)
    for (Index j = 1; j + 1 < n2; ++j) u(k, i, j) = x(map(i, j));
  if (data.caps == CapCondition::Dirichlet)
    for (Index j = 1; j + 1 < n2; ++j) {
      u(k, 0, j) = data.cap_minus(k, 0, j);
      u(k, n1 - 1, j) = data.cap_plus(k, 0, j);
    }
  for (Index i = 0; i < n1; ++i) {
    u(k, i, 0) = data.b_bottom(k, i, 0);
    u(k, i, n2 - 1) = data.b_top(k, i, 0);
  }
}

void check_data(const SpaceTimeGrid& grid, const BoundaryData& data) {
  const CapCondition expected =
      grid.domain().truncated ? CapCondition::Dirichlet : CapCondition::Neumann;
  if (data.caps != expected)
    throw std::invalid_argument("boundary data cap condition does not match grid mode");
  auto check = [&](const ScalarField& f, FieldKind kind, std::optional<Segment> seg,
                   const char* name) {
    if (f.kind() != kind || f.shape() != shape_for(grid, kind, seg))
      throw std::invalid_argument(std::string("boundary data: ") + name + " has wrong shape");
  };
  check(data.b_bottom, FieldKind::BoundaryTrace, Segment::Bottom, "b_bottom");
  check(data.b_top, FieldKind::BoundaryTrace, Segment::Top, "b_top");
  check(data.cap_minus, FieldKind::BoundaryTrace, Segment::Left, "cap_minus");
  check(data.cap_plus, FieldKind::BoundaryTrace, Segment::Right, "cap_plus");
  check(data.u0, FieldKind::Slice, std::nullopt, "u0");
}

}  // namespace

ScalarField solve_heat(const SpaceTimeGrid& grid, const PotentialSpec& pot,
                       const BoundaryData& data, const SolverOptions& options) {
  pot.validate(grid);
  check_data(grid, data);
  if (grid.dt() > grid.domain().T / 4.0) throw std::invalid_argument("solve_heat: dt > T/4");

  auto [laplacian, map] = assemble_laplacian(grid);
  const double inv_dt = 1.0 / grid.dt();
  SparseMatrix identity(map.size(), map.size());
  identity.setIdentity();
  const SparseMatrix implicit_base = inv_dt * identity - 0.5 * laplacian;
  const SparseMatrix explicit_base = inv_dt * identity + 0.5 * laplacian;

  // Positions of the diagonal entries inside the compressed implicit matrix.
  std::vector<Index> diagonal(static_cast<std::size_t>(map.size()));
  for (Index col = 0; col < implicit_base.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(implicit_base, col); it; ++it)
      if (it.row() == col) diagonal[static_cast<std::size_t>(col)] = &it.valueRef() - implicit_base.valuePtr();

  ScalarField u = ScalarField::full(grid);
  Eigen::VectorXd x(map.size());
  for (Index i = map.i_begin(); i <= map.i_end(); ++i)
    for (Index j = 1; j + 1 < grid.nodes2(); ++j) x(map(i, j)) = data.u0(0, i, j);
  write_level(grid, map, data, x, 0, u);

  // Backward-Euler start-up (same sparsity as the CN matrix): damps the stiff modes that
  // CN would carry along undamped from a start that is only first-order compatible.
  const SparseMatrix euler_base = inv_dt * identity - laplacian;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(implicit_base);
  SparseMatrix system = implicit_base;
  Eigen::VectorXd v_now = potential_at(grid, map, pot, 0);
  Eigen::VectorXd l_now = boundary_load(grid, map, data, 0);
  Eigen::VectorXd v_factored;
  bool factored_euler = false;

  for (Index k = 0; k < grid.nt(); ++k) {
    const bool euler = k < options.startup_steps;
    const Eigen::VectorXd v_next = potential_at(grid, map, pot, k + 1);
    const Eigen::VectorXd l_next = boundary_load(grid, map, data, k + 1);
    if (v_factored.size() == 0 || v_next != v_factored || euler != factored_euler) {
      const SparseMatrix& base = euler ? euler_base : implicit_base;
      const double share = euler ? 1.0 : 0.5;
      system = base;
      for (Index p = 0; p < map.size(); ++p)
        system.valuePtr()[diagonal[static_cast<std::size_t>(p)]] += share * v_next(p);
      lu.factorize(system);
      if (lu.info() != Eigen::Success)
        throw SolveError("solve_heat: LU factorization failed at step " + std::to_string(k + 1),
                         static_cast<int>(k + 1));
      v_factored = v_next;
      factored_euler = euler;
    }
    const Eigen::VectorXd rhs =
        euler ? Eigen::VectorXd(inv_dt * x + l_next)
              : Eigen::VectorXd(explicit_base * x - 0.5 * v_now.cwiseProduct(x) +
                                0.5 * (l_now + l_next));
    x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite())
      throw SolveError("solve_heat: linear solve failed at step " + std::to_string(k + 1),
                       static_cast<int>(k + 1));
    write_level(grid, map, data, x, k + 1, u);
    v_now = v_next;
    l_now = l_next;
  }
  return u;
}

double compatibility_residual(const SpaceTimeGrid& grid, const PotentialSpec& pot,
                              const BoundaryData& data) {
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  const ScalarField lap = data.u0_laplacian ? *data.u0_laplacian : laplacian(data.u0);
  auto rate = [&](const ScalarField& trace, const Eigen::ArrayXd& closed, Index i) {
    if (closed.size() == n1) return closed(i);
    const double dt = grid.dt();
    return (-3.0 * trace(0, i, 0) + 4.0 * trace(1, i, 0) - trace(2, i, 0)) / (2.0 * dt);
  };
  double worst = 0.0;
  for (Index i = 0; i < n1; ++i) {
    const double r_bottom = rate(data.b_bottom, data.rate0_bottom, i) - lap(0, i, 0) +
                            pot.q(0, 0, 0) * pot.f(i) * data.u0(0, i, 0);
    const double r_top = rate(data.b_top, data.rate0_top, i) - lap(0, i, n2 - 1) +
                         pot.q(0, 0, n2 - 1) * pot.f(i) * data.u0(0, i, n2 - 1);
    worst = std::max({worst, std::abs(r_bottom), std::abs(r_top)});
  }
  return worst;
}

InitialProfile unit_initial() {
  return {"unit", [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
          [](double, double) { return 0.0; }};
}

InitialProfile cosine_initial(double L, double amplitude) {
  const double k = std::numbers::pi / L;
  return {"cosine",
          [=](double x1, double) { return 1.0 + amplitude * std::cos(k * (x1 + L)); },
          [=](double x1, double) { return -amplitude * k * k * std::cos(k * (x1 + L)); },
          [=](double x1, double) { return -amplitude * k * std::sin(k * (x1 + L)); }};
}

InitialProfile gaussian_initial(double amplitude) {
  return {"gaussian", [=](double x1, double) { return 1.0 + amplitude * std::exp(-x1 * x1); },
          [=](double x1, double) {
            return amplitude * std::exp(-x1 * x1) * (4.0 * x1 * x1 - 2.0);
          },
          [=](double x1, double) { return -2.0 * amplitude * x1 * std::exp(-x1 * x1); }};
}

BoundaryData make_positive_data(const SpaceTimeGrid& grid, const PotentialSpec& pot,
                                const InitialProfile& initial) {
  pot.validate(grid);
  const Index n1 = grid.nodes1(), n2 = grid.nodes2();
  const double L = grid.domain().L, h = grid.domain().h;

  // c(x) = Lap u0 - q(0,x2) f(x1) u0 makes d_t b(0,x) satisfy the compatibility equation.
  auto f_at = [&](Index i) { return pot.f(i); };
  auto boundary_value = [&](double t, double x1, double x2, double q0, double f) {
    const double u0 = initial.value(x1, x2);
    const double c = initial.laplacian(x1, x2) - q0 * f * u0;
    return u0 * std::exp(t * c / u0);
  };

  BoundaryData d;
  d.caps = grid.domain().truncated ? CapCondition::Dirichlet : CapCondition::Neumann;
  d.b_bottom = ScalarField::trace(grid, Segment::Bottom);
  d.b_top = ScalarField::trace(grid, Segment::Top);
  d.cap_minus = ScalarField::trace(grid, Segment::Left);
  d.cap_plus = ScalarField::trace(grid, Segment::Right);
  d.rate0_bottom.resize(n1);
  d.rate0_top.resize(n1);
  const double q_bottom = pot.q(0, 0, 0), q_top = pot.q(0, 0, n2 - 1);
  for (Index i = 0; i < n1; ++i) {
    const double x1 = grid.x1(i);
    d.rate0_bottom(i) = initial.laplacian(x1, 0.0) - q_bottom * f_at(i) * initial.value(x1, 0.0);
    d.rate0_top(i) = initial.laplacian(x1, h) - q_top * f_at(i) * initial.value(x1, h);
  }
  for (Index k = 0; k < grid.levels(); ++k) {
    const double t = grid.t(k);
    for (Index i = 0; i < n1; ++i) {
      d.b_bottom(k, i, 0) = boundary_value(t, grid.x1(i), 0.0, q_bottom, f_at(i));
      d.b_top(k, i, 0) = boundary_value(t, grid.x1(i), h, q_top, f_at(i));
    }
    for (Index j = 0; j < n2; ++j) {
      const double x2 = grid.x2(j);
      if (d.caps == CapCondition::Neumann) {
        d.cap_minus(k, 0, j) = -initial.dx1(-L, x2);
        d.cap_plus(k, 0, j) = initial.dx1(L, x2);
      } else {
        const double q0 = pot.q(0, 0, j);
        d.cap_minus(k, 0, j) = boundary_value(t, -L, x2, q0, f_at(0));
        d.cap_plus(k, 0, j) = boundary_value(t, L, x2, q0, f_at(n1 - 1));
      }
    }
  }
  d.u0 = ScalarField::slice_from(grid, initial.value);
  d.u0_laplacian = ScalarField::slice_from(grid, initial.laplacian);
  return d;
}

PairSolution manufacture_pair(const SpaceTimeGrid& grid, const ScalarField& q,
                              const ScalarField& q_tilde, const Eigen::ArrayXd& f,
                              const InitialProfile& initial) {
  const PotentialSpec pot{q, f};
  const PotentialSpec pot_tilde{q_tilde, f};
  pot.validate(grid);
  pot_tilde.validate(grid);
  const Index n2 = grid.nodes2();
  const double scale = std::max(1.0, q.max_abs());
  for (Index j : {Index(0), n2 - 1})
    if (std::abs(q(0, 0, j) - q_tilde(0, 0, j)) > 1e-14 * scale)
      throw std::invalid_argument(
          "manufacture_pair: q and q~ differ at t = 0 on the lateral walls, so no shared "
          "boundary datum satisfies both compatibility conditions");
  if (grid.domain().truncated && (q.level(0) - q_tilde.level(0)).abs().maxCoeff() > 1e-14 * scale)
    throw std::invalid_argument(
        "manufacture_pair: truncated mode needs q(0,.) = q~(0,.) on the whole cross-section");

  PairSolution out;
  out.data = make_positive_data(grid, pot, initial);
  out.u = solve_heat(grid, pot, out.data);
  out.u_tilde = solve_heat(grid, pot_tilde, out.data);
  return out;
}

ScalarField measurement(const ScalarField& u) {
  return normal_derivative(partial(u, Axis::X1), u.grid().observed_segment());
}

double SeparableOracle::mu() const {
  const double a = std::numbers::pi / (2.0 * domain.L), b = std::numbers::pi / domain.h;
  return a * a + b * b;
}

double SeparableOracle::q(double t) const {
  return q0 * (1.0 + std::sin(2.0 * std::numbers::pi * t / domain.T));
}

double SeparableOracle::q_integral(double t) const {
  const double w = 2.0 * std::numbers::pi / domain.T;
  return q0 * (t + (1.0 - std::cos(w * t)) / w);
}

double SeparableOracle::value(double t, double x1, double x2) const {
  const double c = std::numbers::pi / (2.0 * domain.L);
  return std::exp(-q_integral(t) - mu() * t) * std::cos(c * (x1 + domain.L)) *
         std::sin(std::numbers::pi * x2 / domain.h);
}

double SeparableOracle::dx1(double t, double x1, double x2) const {
  const double c = std::numbers::pi / (2.0 * domain.L);
  return -c * std::exp(-q_integral(t) - mu() * t) * std::sin(c * (x1 + domain.L)) *
         std::sin(std::numbers::pi * x2 / domain.h);
}

double SeparableOracle::dx1dx2(double t, double x1, double x2) const {
  const double c = std::numbers::pi / (2.0 * domain.L), k = std::numbers::pi / domain.h;
  return -c * k * std::exp(-q_integral(t) - mu() * t) * std::sin(c * (x1 + domain.L)) *
         std::cos(k * x2);
}

PotentialSpec SeparableOracle::potential(const SpaceTimeGrid& grid) const {
  return PotentialSpec::sample(grid, [this](double t, double) { return q(t); },
                               [](double) { return 1.0; });
}

BoundaryData SeparableOracle::data(const SpaceTimeGrid& grid) const {
  return BoundaryData::from_exact(
      grid, [this](double t, double x1, double x2) { return value(t, x1, x2); },
      [this](double t, double x1, double x2) { return dx1(t, x1, x2); });
}

ScalarField SeparableOracle::exact(const SpaceTimeGrid& grid) const {
  return ScalarField::full_from(grid,
                                [this](double t, double x1, double x2) { return value(t, x1, x2); });
}

double relative_l2_error(const ScalarField& u, const ScalarField& exact) {
  const ScalarField e = u - exact;
  const double ref = integrate(exact * exact);
  return ref > 0.0 ? std::sqrt(integrate(e * e) / ref) : std::sqrt(integrate(e * e));
}

}  // namespace waveguide
