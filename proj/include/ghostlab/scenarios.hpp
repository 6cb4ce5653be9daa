#ifndef GHOSTLAB_SCENARIOS_HPP
#define GHOSTLAB_SCENARIOS_HPP

#include <string>
#include <vector>

#include "ghostlab/config.hpp"
#include "ghostlab/correlator.hpp"

namespace ghostlab {

/// One scalar result. `checked` metrics carry a tolerance and count toward
/// the scenario verdict; unchecked ones are informational.
struct Metric {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool checked = false;
  bool pass = true;
  std::string note;
};

struct NamedProfile {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct NamedMap {
  std::string name;
  IntensityGrid map;
};

struct ScenarioReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t frames = 0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<Metric> metrics;
  std::vector<NamedProfile> profiles;
  std::vector<NamedMap> maps;  // 2D runs only

  bool all_pass() const;
  /// Adds an informational metric.
  void info(const std::string& name, double value, const std::string& note = "");
  /// Adds a checked metric that passes iff |value| <= tolerance.
  void check_abs(const std::string& name, double value, double tolerance,
                 const std::string& note = "");
  /// Adds a checked metric that passes iff value is true (stored as 0/1).
  void check_bool(const std::string& name, bool value, const std::string& note = "");
};

ScenarioReport run_characterization(const ExperimentConfig& cfg);
ScenarioReport run_ghost_diffraction(const ExperimentConfig& cfg);
ScenarioReport run_ghost_image(const ExperimentConfig& cfg);
ScenarioReport run_coherence_sweep(const ExperimentConfig& cfg);
ScenarioReport run_visibility_sweep(const ExperimentConfig& cfg);

/// Dispatches on cfg.scenario.
ScenarioReport run_scenario(const ExperimentConfig& cfg);

/// Modulation depth (max-min)/(max+min) of a non-negative curve over the
/// central three fringe periods, after smoothing over one coherence length
/// and dividing out the slow envelope (boxcar over one period). Returns 0
/// when the curve's support is too narrow to span two periods, i.e. the
/// beam cannot carry fringes at all.
double fringe_contrast(const Profile& curve, double period, double smooth_len);

}  // namespace ghostlab

#endif
