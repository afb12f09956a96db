// One line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include <waveguide/calculus.hpp>
#include <waveguide/carleman.hpp>
#include <waveguide/cli.hpp>
#include <waveguide/scenario.hpp>
#include <waveguide/stability.hpp>
#include <waveguide/transform.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>

using namespace waveguide;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ScenarioConfig preset_config(int n, int nt) {
  std::ostringstream text;
  text << "[domain]\nL: 1\nh: 1\nT: 1\n[grid]\nn1: " << n << "\nn2: " << n << "\nnt: " << nt << "\n";
  return load_config(ConfigDocument::parse(text.str()));
}

Outcome forward_oracle() {
  WaveguideDomain d;
  const SeparableOracle oracle{d, 0.5};
  std::vector<double> dx, err;
  for (int n : {16, 32, 64}) {
    const SpaceTimeGrid g = build_grid(d, n, n, 4 * n);
    dx.push_back(g.dx1());
    err.push_back(relative_l2_error(solve_heat(g, oracle.potential(g), oracle.data(g)), oracle.exact(g)));
  }
  const double order = loglog_slope(dx, err);
  return {err.back() <= 1e-3 && order >= 1.8,
          "error at 64x64x256 " + fmt(err.back()) + " (<= 1e-3), order " + fmt(order) + " (>= 1.8)"};
}

Outcome weight_assumptions() {
  WaveguideDomain d;
  const SpaceTimeGrid g = build_grid(d, 32, 32, 64);
  WeightParams p;
  const AssumptionReport r = check_assumption_bounded(assemble_weight(p, g));
  const double psi_floor = 0.9 * p.c1 * p.delta, grad_floor = 0.9 * p.c1;
  const bool pass = r.all_passed() && r.bullets.size() == 5 && r.min_psi >= psi_floor &&
                    r.min_grad_psi >= grad_floor && r.max_normal_psi_unobserved <= 0.0;
  return {pass, "bullets " + std::string(r.all_passed() ? "all pass" : "FAIL") + ", min psi " +
                    fmt(r.min_psi) + " (>= " + fmt(psi_floor) + "), min |grad psi| " +
                    fmt(r.min_grad_psi) + " (>= " + fmt(grad_floor) + "), max d_nu psi " +
                    fmt(r.max_normal_psi_unobserved) + " (<= 0)"};
}

Outcome bounded_lemma() {
  WaveguideDomain d;
  const SpaceTimeGrid g = build_grid(d, 32, 32, 64);
  const WeightSystem ws = assemble_weight(WeightParams{}, g);
  double worst_growth = 0.0, worst_log_r = -INFINITY;
  bool uniform = true, r_ok = true;
  for (int seed = 1; seed <= 10; ++seed) {
    const InequalityReport r = lemma_bounded_check(random_smooth_field(g, seed), ws, {1, 2, 4, 8, 16});
    worst_growth = std::max(worst_growth, *r.metric("C_growth"));
    worst_log_r = std::max(worst_log_r, *r.metric("max_log_r"));
    uniform = uniform && *r.flag("s_uniform");
    r_ok = r_ok && *r.flag("r_le_one");
  }
  return {uniform && r_ok, "max C/C(1) " + fmt(worst_growth) + " (<= 2) " + (uniform ? "ok" : "FAIL") +
                               "; max log r " + fmt(worst_log_r) + " (<= 1e-12) " + (r_ok ? "ok" : "FAIL")};
}

Outcome open_lemma() {
  ScenarioConfig cfg = preset_config(16, 16);
  const SpaceTimeGrid g = open_grid(cfg);
  WeightParams p;
  p.regime = Regime::Open;
  p.lambda = cfg.open.lambda;
  p.delta = cfg.open.delta;
  const WeightSystem ws = assemble_weight(p, g);
  double lo = INFINITY, hi = -INFINITY;
  for (int seed = 1; seed <= 10; ++seed) {
    const double slope = *lemma_open_check(random_smooth_field(g, seed), ws, cfg.open.s_sweep).metric("slope");
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  return {lo >= -2.5 && hi <= -1.5, "slopes over 10 draws in [" + fmt(lo) + ", " + fmt(hi) + "] (band [-2.5, -1.5])"};
}

Outcome transform_pipeline() {
  std::vector<double> dx, zres, ftc, var, mis;
  double worst_sigma_ratio = 0.0, worst_initial = 0.0;
  for (int n : {16, 32, 64}) {
    const ScenarioConfig cfg = preset_config(n, 2 * n);
    const SpaceTimeGrid g = main_grid(cfg);
    const PotentialSpec pot = make_potential(cfg, g);
    const PotentialSpec pot_tilde{pot.q + cfg.thetas.front() * make_perturbation(cfg, g), pot.f};
    const PairSolution pair = manufacture_pair(g, pot.q, pot_tilde.q, pot.f, make_initial(cfg, 1.0));
    const TransformBundle b = build_bundle(pair.u, pair.u_tilde, pot);
    const FtcErrors f = ftc_representation_check(b);
    const RhsIdentity id = rhs_identity_check(b, pot, pot_tilde);
    const ZBoundary zb = z_boundary(b);
    dx.push_back(g.dx1());
    zres.push_back(z_residual(b).l2);
    ftc.push_back(std::max(f.w_error, f.dx2w_error));
    var.push_back(id.x1_variation);
    mis.push_back(id.mismatch);
    worst_sigma_ratio = std::max(worst_sigma_ratio, zb.sigma() / (10.0 * g.dx1() * g.dx1()));
    worst_initial = std::max(worst_initial, zb.initial);
  }
  const double o_z = loglog_slope(dx, zres), o_f = loglog_slope(dx, ftc);
  const double o_id = std::min(loglog_slope(dx, var), loglog_slope(dx, mis));
  const bool pass = o_z >= 1.8 && o_f >= 1.8 && o_id >= 1.8 && worst_sigma_ratio <= 1.0 && worst_initial == 0.0;
  return {pass, "orders z-residual " + fmt(o_z) + ", FTC " + fmt(o_f) + ", Pw identity " + fmt(o_id) +
                    " (>= 1.8); max|z| on Sigma / 10dx^2 " + fmt(worst_sigma_ratio) + "; max|z(0)| " +
                    fmt(worst_initial)};
}

Outcome bounded_carleman() {
  const ScenarioConfig cfg = preset_config(32, 64);
  const SpaceTimeGrid g = main_grid(cfg);
  const WeightSystem ws = assemble_weight(WeightParams{}, g);
  const std::vector<double> s_list{1, 2, 4, 8, 16, 32};
  std::vector<std::pair<std::string, InequalityReport>> reports;
  for (const auto& bump : sigma_vanishing_bumps(g))
    reports.emplace_back(bump.name, carleman_check_bounded(bump.z, bump.Pz, ws, s_list));

  const PotentialSpec pot = make_potential(cfg, g);
  const ScalarField q_tilde = pot.q + cfg.thetas.front() * make_perturbation(cfg, g);
  const PairSolution pair = manufacture_pair(g, pot.q, q_tilde, pot.f, make_initial(cfg, 1.0));
  const TransformBundle b = build_bundle(pair.u, pair.u_tilde, pot);
  const ScalarField Pz = b.B2 * partial(b.w, Axis::X2) + b.b_coef * b.w;
  reports.emplace_back("pipeline", carleman_check_bounded(b.z, Pz, ws, s_list));

  bool pass = true;
  std::string detail;
  for (const auto& [name, r] : reports) {
    const bool ok = *r.flag("finite") && *r.flag("bounded_beyond_s0");
    pass = pass && ok;
    detail += name + " s0=" + fmt(r.metric("s0").value_or(NAN)) + (ok ? " ok; " : " FAIL; ");
  }
  return {pass, detail};
}

Outcome conjugation() {
  WaveguideDomain d;
  d.T = 4.0;
  d.truncated = true;
  double zero_residual = 0.0;
  std::string detail;
  bool pass = true;
  for (int n : {32, 64}) {
    const SpaceTimeGrid g = build_grid(d, n, n, 2 * n);
    WeightParams p;
    p.regime = Regime::Open;
    p.lambda = 0.25;
    const WeightSystem ws = assemble_weight(p, g);
    const BumpFunction bump = compact_bump(g);
    zero_residual = std::max(zero_residual, conjugated_operator(bump.z, ws, 0.0).residual.max_abs());
    const ScalarField oracle = decomposition_residual_oracle(ws, 1.0, bump.z, bump.z_x1, bump.z_x2);
    const double err = (conjugated_operator(bump.z, ws, 1.0).residual - oracle).max_abs();
    const double tol = 10.0 * (g.dx1() * g.dx1() + g.dt() * g.dt());
    pass = pass && err <= tol;
    detail += "n=" + std::to_string(n) + " error " + fmt(err) + " (<= " + fmt(tol) + "); ";
  }
  pass = pass && zero_residual == 0.0;
  return {pass, "s=0 residual " + fmt(zero_residual) + "; s=1 " + detail};
}

Outcome stability() {
  const ScenarioConfig cfg = preset_config(32, 64);
  const PerturbationSweep sw = perturbation_sweep(make_stability_scenario(cfg), cfg.thetas, cfg.epsilons);
  double worst_order = 0.0, worst_spread = 1.0;
  for (std::size_t e = 0; e < sw.epsilons.size(); ++e) {
    worst_order = std::max(worst_order, std::abs(sw.lhs_order[e] - 2.0));
    worst_spread = std::max(worst_spread, sw.C_spread[e]);
  }
  const bool pass = worst_order <= 0.3 && worst_spread <= 4.0 && sw.window_monotone && sw.all_finite;
  return {pass, "max |order - 2| " + fmt(worst_order) + " (<= 0.3), max C spread " + fmt(worst_spread) +
                    " (<= 4), monotone " + (sw.window_monotone ? "yes" : "NO")};
}

Outcome positivity() {
  const ScenarioConfig cfg = preset_config(32, 64);
  const SpaceTimeGrid g = main_grid(cfg);
  const PotentialSpec pot = make_potential(cfg, g);
  const ScalarField q_tilde = pot.q + cfg.thetas.front() * make_perturbation(cfg, g);
  const PairSolution pair = manufacture_pair(g, pot.q, q_tilde, pot.f, make_initial(cfg, 1.0));
  const double min_u = pair.u_tilde.values().minCoeff();
  const double min_fu = (broadcast_axial<double>(g, pot.f) * pair.u_tilde).values().minCoeff();
  return {min_u > 0.0 && min_fu > 0.0, "min u~ " + fmt(min_u) + ", min f u~ " + fmt(min_fu)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "waveguide_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "scenario.cfg") << "[domain]\nL: 1\nh: 1\nT: 1\n[grid]\nn1: 16\nn2: 16\nnt: 32\n"
                                       << "[open]\nn1: 80\nn2: 16\nnt: 32\n[lemmas]\ndraws: 3\n"
                                       << "[conjugation]\nn: 16\n";
  const std::vector<std::string> commands{"forward", "check-weights", "verify-lemmas", "verify-carleman", "stability"};
  for (const char* run : {"a", "b"})
    for (const auto& c : commands) {
      std::ostringstream out, err;
      run_cli({c, "--config", (root / "scenario.cfg").string(), "--out", (root / run).string(), "--seed", "7"}, out, err);
    }
  int files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    const fs::path twin = root / "b" / entry.path().filename();
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) ++differing;
  }
  fs::remove_all(root);
  return {files > 0 && differing == 0,
          std::to_string(files) + " output files, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"forward solver oracle", forward_oracle},
      {"weight assumptions", weight_assumptions},
      {"bounded prefix lemma", bounded_lemma},
      {"open prefix lemma", open_lemma},
      {"transform pipeline", transform_pipeline},
      {"bounded Carleman", bounded_carleman},
      {"conjugated operators", conjugation},
      {"stability end-to-end", stability},
      {"positivity", positivity},
      {"determinism", determinism},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", index - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
