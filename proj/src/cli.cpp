#include <waveguide/cli.hpp>
#include <waveguide/calculus.hpp>
#include <waveguide/carleman.hpp>
#include <waveguide/field_io.hpp>
#include <waveguide/report.hpp>
#include <waveguide/scenario.hpp>
#include <waveguide/stability.hpp>
#include <waveguide/transform.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>

namespace waveguide {

namespace {

namespace fs = std::filesystem;

void describe_grid(KeyValueReport& rep, const SpaceTimeGrid& g, const std::string& prefix) {
  rep.add(prefix + "L", g.domain().L);
  rep.add(prefix + "h", g.domain().h);
  rep.add(prefix + "T", g.domain().T);
  rep.add(prefix + "alpha", g.alpha());
  rep.add(prefix + "observed", to_string(g.domain().observed));
  rep.add(prefix + "truncated", g.domain().truncated);
  rep.add(prefix + "n1", g.n1());
  rep.add(prefix + "n2", g.n2());
  rep.add(prefix + "nt", g.nt());
}

WeightSystem open_weight(const ScenarioConfig& cfg, const SpaceTimeGrid& grid, double lambda) {
  WeightParams p;
  p.regime = Regime::Open;
  p.lambda = lambda;
  p.delta = cfg.open.delta;
  p.s = cfg.weights.s;
  return assemble_weight(p, grid);
}

WeightSystem bounded_weight(const ScenarioConfig& cfg, const SpaceTimeGrid& grid) {
  WeightParams p = cfg.weights;
  p.regime = Regime::Bounded;
  return assemble_weight(p, grid);
}

int cmd_forward(const ScenarioConfig& cfg, std::ostream& out) {
  const SpaceTimeGrid grid = main_grid(cfg);
  KeyValueReport rep;
  rep.add("command", "forward");
  describe_grid(rep, grid, "grid.");
  rep.add("preset", cfg.preset);

  ScalarField u;
  if (cfg.preset == "separable") {
    const SeparableOracle oracle{cfg.domain, cfg.q0};
    u = solve_heat(grid, oracle.potential(grid), oracle.data(grid));
    const double error = relative_l2_error(u, oracle.exact(grid));
    rep.add("oracle.relative_l2_error", error);

    // Refinement triple: the configured grid and two coarsenings by 2.
    std::vector<double> dx{grid.dx1()}, errors{error};
    for (int level = 1; level <= 2; ++level) {
      const int f = 1 << level;
      if (cfg.n1 / f < 4 || cfg.n2 / f < 4 || cfg.nt / f < 4) break;
      const SpaceTimeGrid coarse = build_grid(cfg.domain, cfg.n1 / f, cfg.n2 / f, cfg.nt / f);
      const ScalarField uc = solve_heat(coarse, oracle.potential(coarse), oracle.data(coarse));
      dx.push_back(coarse.dx1());
      errors.push_back(relative_l2_error(uc, oracle.exact(coarse)));
    }
    for (std::size_t m = 0; m < dx.size(); ++m)
      rep.add("oracle.refinement." + std::to_string(m) + ".dx1_error",
              format_double(dx[m]) + "," + format_double(errors[m]));
    if (dx.size() >= 2) {
      const double order = loglog_slope(dx, errors);
      rep.add("oracle.fitted_order", order);
      out << "fitted order " << format_double(order) << '\n';
    }
    out << "relative L2 error " << format_double(error) << '\n';
  } else {
    const PotentialSpec pot = make_potential(cfg, grid);
    const BoundaryData data = make_positive_data(grid, pot, make_initial(cfg, grid.domain().L));
    rep.add("initial", cfg.initial);
    rep.add("compatibility_residual", compatibility_residual(grid, pot, data));
    u = solve_heat(grid, pot, data);
  }
  rep.add("min_u", u.values().minCoeff());
  rep.add("max_u", u.values().maxCoeff());

  write_field(cfg.out_dir / "u", u, "forward solve, preset " + cfg.preset);
  write_field(cfg.out_dir / "measurement", measurement(u), "normal derivative of d_x1 u on the observed wall");
  rep.write(cfg.out_dir / "forward_report.txt");
  out << "min u " << format_double(u.values().minCoeff()) << '\n';
  return kOk;
}

int cmd_check_weights(const ScenarioConfig& cfg, std::ostream& out) {
  KeyValueReport rep;
  rep.add("command", "check-weights");
  bool ok = true;
  auto record = [&](const AssumptionReport& r, const std::string& prefix) {
    append_assumption(rep, r, prefix);
    for (const auto& b : r.bullets) {
      out << prefix << b.name << ": " << (b.passed ? "pass" : "fail")
          << (b.verifiable ? "" : " (not verifiable)") << " margin " << format_double(b.margin + 0.0) << '\n';
      if (b.verifiable && !b.passed) ok = false;
    }
  };
  if (!cfg.domain.truncated) {
    const SpaceTimeGrid grid = main_grid(cfg);
    describe_grid(rep, grid, "bounded.grid.");
    record(check_assumption_bounded(bounded_weight(cfg, grid)), "bounded.");
  }
  const SpaceTimeGrid og = cfg.domain.truncated ? main_grid(cfg) : open_grid(cfg);
  describe_grid(rep, og, "open.grid.");
  record(check_assumption_open(open_weight(cfg, og, cfg.open.lambda)), "open.");
  rep.add("passed", ok);
  rep.write(cfg.out_dir / "weights_report.txt");
  return ok ? kOk : kCheckFailed;
}

int cmd_verify_lemmas(const ScenarioConfig& cfg, std::ostream& out) {
  bool ok = true;
  if (!cfg.domain.truncated) {
    const SpaceTimeGrid grid = main_grid(cfg);
    const WeightSystem ws = bounded_weight(cfg, grid);
    KeyValueReport rep;
    CsvTable table = sweep_table();
    rep.add("command", "verify-lemmas");
    describe_grid(rep, grid, "grid.");
    rep.add("seed", static_cast<long long>(cfg.seed));
    double worst_growth = 0.0;
    for (int d = 0; d < cfg.draws; ++d) {
      const ScalarField F = random_smooth_field(grid, cfg.seed + d, cfg.modes);
      const InequalityReport r = lemma_bounded_check(F, ws, cfg.s_sweep);
      append_inequality(rep, r, "draw." + std::to_string(d) + ".");
      append_sweep_rows(table, r, "draw-" + std::to_string(d));
      worst_growth = std::max(worst_growth, r.metric("C_growth").value_or(INFINITY));
      if (!r.flag("s_uniform").value_or(false)) ok = false;
    }
    rep.add("worst_C_growth", worst_growth);
    rep.write(cfg.out_dir / "lemma_bounded_report.txt");
    table.write(cfg.out_dir / "lemma_bounded.csv");
    out << "bounded lemma: worst C growth " << format_double(worst_growth) << '\n';
  }

  const SpaceTimeGrid og = cfg.domain.truncated ? main_grid(cfg) : open_grid(cfg);
  const WeightSystem wo = open_weight(cfg, og, cfg.open.lambda);
  KeyValueReport rep;
  CsvTable table = sweep_table();
  rep.add("command", "verify-lemmas");
  describe_grid(rep, og, "grid.");
  rep.add("seed", static_cast<long long>(cfg.seed));
  double lo = INFINITY, hi = -INFINITY;
  for (int d = 0; d < cfg.draws; ++d) {
    const ScalarField F = random_smooth_field(og, cfg.seed + d, cfg.modes);
    const InequalityReport r = lemma_open_check(F, wo, cfg.open.s_sweep);
    append_inequality(rep, r, "draw." + std::to_string(d) + ".");
    append_sweep_rows(table, r, "draw-" + std::to_string(d));
    const double slope = r.metric("slope").value_or(NAN);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
    if (!r.flag("slope_in_band").value_or(false)) ok = false;
  }
  rep.add("slope_min", lo);
  rep.add("slope_max", hi);
  rep.write(cfg.out_dir / "lemma_open_report.txt");
  table.write(cfg.out_dir / "lemma_open.csv");
  out << "open lemma: slope range " << format_double(lo) << " " << format_double(hi) << '\n';
  return ok ? kOk : kCheckFailed;
}

int cmd_verify_carleman(const ScenarioConfig& cfg, std::ostream& out) {
  KeyValueReport rep;
  CsvTable table = sweep_table();
  rep.add("command", "verify-carleman");
  bool ok = true;
  auto record = [&](const InequalityReport& r, const std::string& label) {
    append_inequality(rep, r, label + ".");
    append_sweep_rows(table, r, label);
    const bool finite = r.flag("finite").value_or(false);
    if (!finite) ok = false;
    out << label << ": " << (finite ? "finite" : "NOT finite");
    for (const auto& [key, value] : r.metrics)
      if (key.rfind("s0", 0) == 0) out << ", " << key << " " << (std::isnan(value) ? std::string("none") : format_double(value));
    out << '\n';
  };

  if (!cfg.domain.truncated) {
    const SpaceTimeGrid grid = main_grid(cfg);
    const WeightSystem ws = bounded_weight(cfg, grid);
    describe_grid(rep, grid, "bounded.grid.");
    for (const auto& bump : sigma_vanishing_bumps(grid))
      record(carleman_check_bounded(bump.z, bump.Pz, ws, cfg.s_sweep, cfg.lambda_sweep),
             "bounded." + bump.name);
    if (cfg.preset != "separable") {
      const PotentialSpec pot = make_potential(cfg, grid);
      const ScalarField q_tilde = pot.q + cfg.thetas.front() * make_perturbation(cfg, grid);
      const PairSolution pair =
          manufacture_pair(grid, pot.q, q_tilde, pot.f, make_initial(cfg, grid.domain().L));
      const TransformBundle b = build_bundle(pair.u, pair.u_tilde, pot);
      const ScalarField Pz = b.B2 * partial(b.w, Axis::X2) + b.b_coef * b.w;
      record(carleman_check_bounded(b.z, Pz, ws, cfg.s_sweep, cfg.lambda_sweep), "bounded.pipeline");
    }
  }

  const SpaceTimeGrid cg = conjugation_grid(cfg);
  const WeightSystem wo = open_weight(cfg, cg, cfg.conjugation.lambda);
  describe_grid(rep, cg, "open.grid.");
  const BumpFunction bump = compact_bump(cg);
  record(carleman_check_open(bump.z, bump.Pz, wo, cfg.conjugation.carleman_s), "open.compact");

  CsvTable conj{{"s", "residual_max", "oracle_max", "error", "tolerance"}, {}};
  const double tol = 10.0 * (cg.dx1() * cg.dx1() + cg.dt() * cg.dt());
  for (double s : cfg.conjugation.s_list) {
    const ConjugatedParts parts = conjugated_operator(bump.z, wo, s);
    const ScalarField oracle = decomposition_residual_oracle(wo, s, bump.z, bump.z_x1, bump.z_x2);
    const double error = (parts.residual - oracle).max_abs();
    conj.add_row({format_double(s), format_double(parts.residual.max_abs()),
                  format_double(oracle.max_abs()), format_double(error), format_double(tol)});
    rep.add("conjugation.s=" + format_double(s) + ".error", error);
  }
  rep.add("conjugation.tolerance", tol);
  rep.add("passed", ok);
  rep.write(cfg.out_dir / "carleman_report.txt");
  table.write(cfg.out_dir / "carleman_sweep.csv");
  conj.write(cfg.out_dir / "conjugation.csv");
  return ok ? kOk : kCheckFailed;
}

int cmd_stability(const ScenarioConfig& cfg, std::ostream& out) {
  const StabilityScenario sc = make_stability_scenario(cfg);
  const PerturbationSweep sw = perturbation_sweep(sc, cfg.thetas, cfg.epsilons);
  KeyValueReport rep;
  rep.add("command", "stability");
  describe_grid(rep, sc.grid, "grid.");
  append_stability(rep, sw);
  rep.write(cfg.out_dir / "stability_report.txt");
  stability_table(sw).write(cfg.out_dir / "stability.csv");
  for (std::size_t e = 0; e < sw.epsilons.size(); ++e)
    out << "eps " << format_double(sw.epsilons[e]) << ": order " << format_double(sw.lhs_order[e])
        << ", C spread " << format_double(sw.C_spread[e]) << '\n';
  return sw.all_finite ? kOk : kCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for the inverse potential problem in a heat waveguide"};
  app.name("waveguide");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, sweep_s, eps;
  std::optional<long long> seed;
  app.add_option("--config", config_path, "scenario file (see the 'reference' command)");
  app.add_option("--out", out_dir, "output directory, overrides output.dir");
  app.add_option("--seed", seed, "seed of the random test functions, overrides lemmas.seed");
  app.add_option("--sweep-s", sweep_s, "comma-separated s list, overrides weights.s_sweep");
  app.add_option("--eps", eps, "comma-separated eps list, overrides stability.eps");

  using Command = std::function<int(const ScenarioConfig&, std::ostream&)>;
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"forward", "solve the forward problem and persist u", cmd_forward},
      {"check-weights", "check the weight assumptions", cmd_check_weights},
      {"verify-lemmas", "sweep the two weighted prefix-integral lemmas", cmd_verify_lemmas},
      {"verify-carleman", "sweep both Carleman estimates and the conjugation identity",
       cmd_verify_carleman},
      {"stability", "perturbation sweep of the stability estimate", cmd_stability},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);
  app.add_subcommand("reference", "print every configuration key with its default");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (app.got_subcommand("reference")) {
    out << config_reference();
    return kOk;
  }

  try {
    if (config_path.empty()) throw ConfigError("--config", "a scenario file is required");
    ConfigDocument doc = ConfigDocument::from_file(config_path);
    if (!out_dir.empty()) doc.values["output.dir"] = out_dir;
    if (seed) doc.values["lemmas.seed"] = std::to_string(*seed);
    if (!sweep_s.empty()) doc.values["weights.s_sweep"] = sweep_s;
    if (!eps.empty()) doc.values["stability.eps"] = eps;
    const ScenarioConfig cfg = load_config(doc);

    for (const auto& [name, help, fn] : commands)
      if (app.got_subcommand(name)) {
        fs::create_directories(cfg.out_dir);
        return fn(cfg, out);
      }
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  }
}

}  // namespace waveguide
