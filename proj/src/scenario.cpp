#include <waveguide/scenario.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace waveguide {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

struct KeySpec {
  const char* key;
  bool required;
  const char* fallback;
  const char* help;
};

// Every accepted key. The reference text is generated from this table.
const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table{
      {"domain.L", true, "", "half-length of the waveguide (> 0)"},
      {"domain.h", true, "", "cross-section height (> 0)"},
      {"domain.T", true, "", "final time (> 0)"},
      {"domain.alpha", false, "0", "anchor abscissa in (-L, L), snapped to the nearest x1 node"},
      {"domain.observed", false, "top", "observed lateral side: top (x2 = h) or bottom (x2 = 0)"},
      {"domain.truncated", false, "false", "open-waveguide mode: all-Dirichlet, L acts as R"},
      {"grid.n1", true, "", "interior nodes in x1 (>= 4)"},
      {"grid.n2", true, "", "interior nodes in x2 (>= 4)"},
      {"grid.nt", true, "", "time steps (>= 4)"},
      {"weights.lambda", false, "1", "weight sharpness"},
      {"weights.s", false, "1", "Carleman parameter for single evaluations"},
      {"weights.delta", false, "0.5", "offset of psi2"},
      {"weights.c1", false, "0.5", "minimum of psi1"},
      {"weights.s_sweep", false, "1,2,4,8,16", "s values for the bounded sweeps (--sweep-s)"},
      {"weights.lambda_sweep", false, "", "lambda values for the Carleman sweeps (empty: lambda)"},
      {"potential.preset", false, "smooth", "smooth | zero | separable (forward oracle only)"},
      {"potential.q0", false, "0.5", "amplitude of q"},
      {"potential.f_amplitude", false, "0.25", "f = 1 + a cos(pi (x1 + L) / L)"},
      {"potential.initial", false, "unit", "initial state: unit | cosine | gaussian"},
      {"potential.initial_amplitude", false, "0.2", "amplitude of the cosine or gaussian state"},
      {"perturbation.theta", false, "0.1,0.05,0.025", "theta list, q~ = q + theta dq"},
      {"perturbation.amplitude", false, "1", "dq = A sin^4(pi t / T) cos(pi x2 / h)"},
      {"stability.eps", false, "T*0.05,T*0.1,T*0.2", "time margins in (0, T/2) (--eps)"},
      {"lemmas.seed", false, "1", "seed of the random test functions (--seed)"},
      {"lemmas.draws", false, "10", "number of random test functions"},
      {"lemmas.modes", false, "3", "modes per axis in each random test function"},
      {"open.R", false, "1", "truncation radius"},
      {"open.h", false, "domain.h", "cross-section height"},
      {"open.T", false, "1", "final time"},
      {"open.alpha", false, "left", "anchor: left (first interior node) or a number"},
      {"open.n1", false, "320", "interior nodes in x1"},
      {"open.n2", false, "32", "interior nodes in x2"},
      {"open.nt", false, "64", "time steps"},
      {"open.lambda", false, "1", "weight sharpness"},
      {"open.delta", false, "0.5", "offset of psi2"},
      {"open.s_sweep", false, "4,8,16,32,64", "s values for the open prefix lemma"},
      {"conjugation.T", false, "4", "final time of the conjugation grid"},
      {"conjugation.lambda", false, "0.25", "weight sharpness"},
      {"conjugation.n", false, "32", "interior nodes per axis (2n time steps)"},
      {"conjugation.s", false, "0,0.5,1", "s values for the decomposition residual"},
      {"conjugation.carleman_s", false, "1,2,4,8,16,32", "s values for the open Carleman sweep"},
      {"output.dir", false, "out", "output directory (--out)"},
  };
  return table;
}

}  // namespace

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(parse_double(key, item));
  return out;
}

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::stringstream in(text);
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("", "line " + std::to_string(number) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ConfigError("", "line " + std::to_string(number) + ": expected 'key: value'");
    const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, colon));
    if (doc.values.count(key)) throw ConfigError(key, "duplicate key");
    doc.values[key] = trim(line.substr(colon + 1));
  }
  return doc;
}

ConfigDocument ConfigDocument::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ScenarioConfig load_config(const ConfigDocument& doc) {
  std::set<std::string> known;
  for (const auto& entry : key_table()) {
    known.insert(entry.key);
    if (entry.required && !doc.values.count(entry.key))
      throw ConfigError(entry.key, "missing required key");
  }
  for (const auto& [key, value] : doc.values)
    if (!known.count(key)) throw ConfigError(key, "unknown key");

  auto has = [&](const char* key) { return doc.values.count(key) > 0; };
  auto get = [&](const char* key) -> const std::string& { return doc.values.at(key); };
  auto num = [&](const char* key, double& dst) {
    if (has(key)) dst = parse_double(key, get(key));
  };
  auto count = [&](const char* key, int& dst) {
    if (has(key)) {
      const long long v = parse_int(key, get(key));
      if (v < 1 || v > 100000) throw ConfigError(key, "out of range");
      dst = static_cast<int>(v);
    }
  };
  auto list = [&](const char* key, std::vector<double>& dst) {
    if (has(key)) dst = parse_list(key, get(key));
  };
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0)) throw ConfigError(key, "must be positive");
  };

  ScenarioConfig c;
  num("domain.L", c.domain.L);
  num("domain.h", c.domain.h);
  num("domain.T", c.domain.T);
  num("domain.alpha", c.domain.alpha);
  positive("domain.L", c.domain.L);
  positive("domain.h", c.domain.h);
  positive("domain.T", c.domain.T);
  if (!(c.domain.alpha > -c.domain.L && c.domain.alpha < c.domain.L))
    throw ConfigError("domain.alpha", "must lie in (-L, L)");
  if (has("domain.observed")) {
    try {
      c.domain.observed = side_from_string(get("domain.observed"));
    } catch (const std::exception&) {
      throw ConfigError("domain.observed", "expected top or bottom");
    }
  }
  if (has("domain.truncated")) c.domain.truncated = parse_bool("domain.truncated", get("domain.truncated"));

  count("grid.n1", c.n1);
  count("grid.n2", c.n2);
  count("grid.nt", c.nt);
  for (const auto& [key, v] : {std::pair{"grid.n1", c.n1}, {"grid.n2", c.n2}, {"grid.nt", c.nt}})
    if (v < 4) throw ConfigError(key, "must be at least 4");

  num("weights.lambda", c.weights.lambda);
  num("weights.s", c.weights.s);
  num("weights.delta", c.weights.delta);
  num("weights.c1", c.weights.c1);
  for (const char* key : {"weights.lambda", "weights.s", "weights.delta", "weights.c1"}) {
    double v = 0.0;
    num(key, v);
    if (has(key)) positive(key, v);
  }
  list("weights.s_sweep", c.s_sweep);
  list("weights.lambda_sweep", c.lambda_sweep);
  if (c.s_sweep.empty()) throw ConfigError("weights.s_sweep", "must not be empty");
  for (double s : c.s_sweep) positive("weights.s_sweep", s);
  for (double l : c.lambda_sweep) positive("weights.lambda_sweep", l);

  if (has("potential.preset")) c.preset = get("potential.preset");
  if (c.preset != "smooth" && c.preset != "zero" && c.preset != "separable")
    throw ConfigError("potential.preset", "expected smooth, zero or separable");
  if (c.preset == "separable" && c.domain.truncated)
    throw ConfigError("potential.preset", "the separable oracle needs a bounded (non-truncated) domain");
  num("potential.q0", c.q0);
  num("potential.f_amplitude", c.f_amplitude);
  if (!(std::abs(c.f_amplitude) < 1.0))
    throw ConfigError("potential.f_amplitude", "|a| < 1 keeps f positive");
  if (has("potential.initial")) c.initial = get("potential.initial");
  if (c.initial != "unit" && c.initial != "cosine" && c.initial != "gaussian")
    throw ConfigError("potential.initial", "expected unit, cosine or gaussian");
  num("potential.initial_amplitude", c.initial_amplitude);
  if (!(std::abs(c.initial_amplitude) < 1.0))
    throw ConfigError("potential.initial_amplitude", "|a| < 1 keeps the initial state positive");

  list("perturbation.theta", c.thetas);
  if (c.thetas.empty()) throw ConfigError("perturbation.theta", "must not be empty");
  for (double th : c.thetas) positive("perturbation.theta", th);
  num("perturbation.amplitude", c.dq_amplitude);

  const double T = c.domain.T;
  c.epsilons = {0.05 * T, 0.1 * T, 0.2 * T};
  list("stability.eps", c.epsilons);
  for (double e : c.epsilons)
    if (!(e > 0.0 && e < 0.5 * T)) throw ConfigError("stability.eps", "entries must lie in (0, T/2)");
  if (c.epsilons.empty()) throw ConfigError("stability.eps", "must not be empty");

  if (has("lemmas.seed")) {
    const long long v = parse_int("lemmas.seed", get("lemmas.seed"));
    if (v < 0) throw ConfigError("lemmas.seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(v);
  }
  count("lemmas.draws", c.draws);
  count("lemmas.modes", c.modes);

  c.open.h = c.domain.h;
  num("open.R", c.open.R);
  num("open.h", c.open.h);
  num("open.T", c.open.T);
  if (has("open.alpha")) c.open.alpha = get("open.alpha");
  if (c.open.alpha != "left") {
    const double a = parse_double("open.alpha", c.open.alpha);
    if (!(a > -c.open.R && a < c.open.R)) throw ConfigError("open.alpha", "must lie in (-R, R)");
  }
  count("open.n1", c.open.n1);
  count("open.n2", c.open.n2);
  count("open.nt", c.open.nt);
  num("open.lambda", c.open.lambda);
  num("open.delta", c.open.delta);
  list("open.s_sweep", c.open.s_sweep);
  for (const char* key : {"open.R", "open.h", "open.T", "open.lambda", "open.delta"}) {
    double v = 1.0;
    num(key, v);
    positive(key, v);
  }
  for (const auto& [key, v] :
       {std::pair{"open.n1", c.open.n1}, {"open.n2", c.open.n2}, {"open.nt", c.open.nt}})
    if (v < 4) throw ConfigError(key, "must be at least 4");
  if (c.open.s_sweep.size() < 2) throw ConfigError("open.s_sweep", "needs at least two values");
  for (double s : c.open.s_sweep) positive("open.s_sweep", s);

  num("conjugation.T", c.conjugation.T);
  num("conjugation.lambda", c.conjugation.lambda);
  count("conjugation.n", c.conjugation.n);
  list("conjugation.s", c.conjugation.s_list);
  list("conjugation.carleman_s", c.conjugation.carleman_s);
  positive("conjugation.T", c.conjugation.T);
  positive("conjugation.lambda", c.conjugation.lambda);
  if (c.conjugation.n < 4) throw ConfigError("conjugation.n", "must be at least 4");
  for (double s : c.conjugation.s_list)
    if (!(s >= 0.0)) throw ConfigError("conjugation.s", "entries must be nonnegative");
  if (c.conjugation.carleman_s.empty()) throw ConfigError("conjugation.carleman_s", "must not be empty");
  for (double s : c.conjugation.carleman_s) positive("conjugation.carleman_s", s);

  if (has("output.dir")) c.out_dir = get("output.dir");
  c.weights.validate();
  return c;
}

std::string config_reference() {
  std::ostringstream os;
  os << "# waveguide scenario configuration\n"
     << "# Format: [section] headers, then 'key: value' lines; '#' starts a comment.\n"
     << "# Lists are comma-separated. Required keys have no default.\n";
  std::string section;
  for (const auto& entry : key_table()) {
    const std::string key = entry.key;
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      section = key.substr(0, dot);
      os << "\n[" << section << "]\n";
    }
    os << key.substr(dot + 1) << ": " << (entry.required ? "<required>" : entry.fallback) << "  # "
       << entry.help << '\n';
  }
  return os.str();
}

SpaceTimeGrid main_grid(const ScenarioConfig& cfg) {
  return build_grid(cfg.domain, cfg.n1, cfg.n2, cfg.nt);
}

SpaceTimeGrid open_grid(const ScenarioConfig& cfg) {
  WaveguideDomain d;
  d.L = cfg.open.R;
  d.h = cfg.open.h;
  d.T = cfg.open.T;
  d.observed = cfg.domain.observed;
  d.truncated = true;
  const double dx1 = 2.0 * d.L / (cfg.open.n1 + 1);
  d.alpha = cfg.open.alpha == "left" ? -d.L + dx1 : std::stod(cfg.open.alpha);
  return build_grid(d, cfg.open.n1, cfg.open.n2, cfg.open.nt);
}

SpaceTimeGrid conjugation_grid(const ScenarioConfig& cfg) {
  WaveguideDomain d;
  d.L = cfg.open.R;
  d.h = cfg.open.h;
  d.T = cfg.conjugation.T;
  d.observed = cfg.domain.observed;
  d.truncated = true;
  return build_grid(d, cfg.conjugation.n, cfg.conjugation.n, 2 * cfg.conjugation.n);
}

PotentialSpec make_potential(const ScenarioConfig& cfg, const SpaceTimeGrid& grid) {
  const double pi = std::numbers::pi;
  const double L = grid.domain().L, h = grid.domain().h, T = grid.domain().T;
  const double q0 = cfg.preset == "zero" ? 0.0 : cfg.q0;
  const double a = cfg.f_amplitude;
  return PotentialSpec::sample(
      grid,
      [=](double t, double x2) {
        const double st = std::sin(pi * t / T);
        return q0 * st * st * (1.0 + 0.5 * std::sin(pi * x2 / h));
      },
      [=](double x1) { return 1.0 + a * std::cos(pi * (x1 + L) / L); });
}

ScalarField make_perturbation(const ScenarioConfig& cfg, const SpaceTimeGrid& grid) {
  const double pi = std::numbers::pi;
  const double h = grid.domain().h, T = grid.domain().T, A = cfg.dq_amplitude;
  return ScalarField::cross_section_from(grid, [=](double t, double x2) {
    const double st = std::sin(pi * t / T);
    return A * st * st * st * st * std::cos(pi * x2 / h);
  });
}

InitialProfile make_initial(const ScenarioConfig& cfg, double L) {
  if (cfg.initial == "cosine") return cosine_initial(L, cfg.initial_amplitude);
  if (cfg.initial == "gaussian") return gaussian_initial(cfg.initial_amplitude);
  return unit_initial();
}

StabilityScenario make_stability_scenario(const ScenarioConfig& cfg) {
  if (cfg.preset == "separable")
    throw ConfigError("potential.preset", "the separable oracle is for the forward command only");
  const SpaceTimeGrid grid = main_grid(cfg);
  const PotentialSpec pot = make_potential(cfg, grid);
  return {grid, pot.q, make_perturbation(cfg, grid), pot.f, make_initial(cfg, grid.domain().L)};
}

}  // namespace waveguide
