#pragma once

#include <waveguide/forward.hpp>
#include <waveguide/stability.hpp>
#include <waveguide/weights.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace waveguide {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat "key: value" text with [section] headers; keys are stored as "section.key".
/// '#' starts a comment. Values may be comma-separated lists.
struct ConfigDocument {
  std::map<std::string, std::string> values;

  static ConfigDocument parse(const std::string& text);
  static ConfigDocument from_file(const std::filesystem::path& path);
};

/// Grid and weight used for the open-waveguide (truncated) experiments.
struct OpenSetup {
  double R = 1.0;
  double h = 1.0;
  double T = 1.0;
  std::string alpha = "left";  ///< "left" = first interior node, or a number
  int n1 = 320;
  int n2 = 32;
  int nt = 64;
  double lambda = 1.0;
  double delta = 0.5;
  std::vector<double> s_sweep{4, 8, 16, 32, 64};
};

/// Mildly weighted open setup where exp(s phi) is resolvable on the grid.
struct ConjugationSetup {
  double T = 4.0;
  double lambda = 0.25;
  int n = 32;
  std::vector<double> s_list{0.0, 0.5, 1.0};
  std::vector<double> carleman_s{1, 2, 4, 8, 16, 32};
};

struct ScenarioConfig {
  WaveguideDomain domain;
  int n1 = 0;
  int n2 = 0;
  int nt = 0;

  WeightParams weights;
  std::vector<double> s_sweep{1, 2, 4, 8, 16};
  std::vector<double> lambda_sweep;

  std::string preset = "smooth";  ///< smooth | zero | separable
  double q0 = 0.5;
  double f_amplitude = 0.25;
  std::string initial = "unit";  ///< unit | cosine | gaussian
  double initial_amplitude = 0.2;

  std::vector<double> thetas{0.1, 0.05, 0.025};
  double dq_amplitude = 1.0;
  std::vector<double> epsilons;  ///< default T * {0.05, 0.1, 0.2}

  std::uint64_t seed = 1;
  int draws = 10;
  int modes = 3;

  OpenSetup open;
  ConjugationSetup conjugation;

  std::filesystem::path out_dir = "out";
};

/// Validates every key; unknown or malformed keys raise ConfigError naming the key.
ScenarioConfig load_config(const ConfigDocument& doc);

/// Text listing every key, whether it is required and its default.
std::string config_reference();

SpaceTimeGrid main_grid(const ScenarioConfig& cfg);
SpaceTimeGrid open_grid(const ScenarioConfig& cfg);
SpaceTimeGrid conjugation_grid(const ScenarioConfig& cfg);

/// q = q0 sin^2(pi t / T)(1 + sin(pi x2 / h) / 2), f = 1 + a cos(pi (x1 + L) / L).
PotentialSpec make_potential(const ScenarioConfig& cfg, const SpaceTimeGrid& grid);
/// dq = A sin^4(pi t / T) cos(pi x2 / h).
ScalarField make_perturbation(const ScenarioConfig& cfg, const SpaceTimeGrid& grid);
InitialProfile make_initial(const ScenarioConfig& cfg, double L);
StabilityScenario make_stability_scenario(const ScenarioConfig& cfg);

std::vector<double> parse_list(const std::string& key, const std::string& text);

}  // namespace waveguide
