#ifndef GHOSTLAB_CONFIG_HPP
#define GHOSTLAB_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ghostlab/objects.hpp"
#include "ghostlab/source.hpp"

namespace ghostlab {

inline constexpr const char* kVersion = "0.1.0";

enum class Scenario {
  characterization,
  ghost_diffraction,
  ghost_image,
  coherence_sweep,
  visibility_sweep
};

enum class ObjectKind { none, double_slit, bitmap, phase_grating };

/// How a 2D object-size sweep scales the mask: width only (height fixed)
/// or both axes together (area proportional to width squared).
enum class SweepSchedule { width_only, area };

std::string scenario_name(Scenario s);
std::string object_name(ObjectKind k);

/// Fully validated experiment description. All lengths in meters.
struct ExperimentConfig {
  Scenario scenario = Scenario::characterization;

  int dim = 1;
  int sites = 2048;
  int sites_y = 0;       // 0: same as sites (2D only)
  double pitch = 8.7e-6;
  double pitch_y = 0.0;  // 0: same as pitch

  double wavelength = 0.0;  // required
  double focal = 0.0;       // required
  double magnification = 1.2;

  double mean_intensity = 1.0;
  EnvelopeKind envelope = EnvelopeKind::gaussian;
  double envelope_std = 0.0;    // exactly one of envelope_std /
  double coherence_near = 0.0;  // coherence_near must be given
  double diaphragm = 0.0;       // exactly one of diaphragm /
  double coherence_far = 0.0;   // coherence_far must be given

  double splitter_t2 = 0.5;
  double splitter_r2 = 0.5;

  ObjectKind object = ObjectKind::none;
  double slit_width = 690e-6;
  double needle_width = 160e-6;
  double slit_height = 0.0;  // 2D double slit; 0 = full extent
  std::string bitmap_path;
  double bitmap_width = 0.0;
  double grating_period = 0.0;

  std::uint64_t frames = 0;  // required
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir;

  int fixed_pixel_x = -1;  // -1: auto (site of max mean object-arm intensity)
  int fixed_pixel_y = -1;

  std::vector<double> sweep_values;  // ratios or object widths
  SweepSchedule sweep_schedule = SweepSchedule::width_only;

  // -- derived quantities -------------------------------------------------

  int sites_y_effective() const { return dim == 2 ? (sites_y ? sites_y : sites) : 1; }
  double pitch_y_effective() const { return pitch_y > 0.0 ? pitch_y : pitch; }

  /// Envelope width, resolving a coherence_near target if that form was used.
  double envelope_std_effective() const;
  /// Diaphragm diameter, resolving a coherence_far target (D = lambda F / dx_f).
  double diaphragm_effective() const;
  /// Near-field coherence length 2*sigma implied by the envelope.
  double coherence_near_effective() const;

  SourceConfig source_config() const;
  SplitterSpec splitter() const;
  /// Object mask on the near-field lattice. Reads bitmap_path if needed.
  TransmissionMask make_object() const;

  /// Canonical key/value echo of every setting that affects the result
  /// (excludes workers and out_dir, which by contract do not).
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses the line-based `key = value` config format. `#` starts a comment,
/// blank lines are ignored, later occurrences of a key override earlier
/// ones. Length values take an optional um/mm/m suffix and are normalized
/// to meters. Unknown keys, malformed values, out-of-range values and
/// missing required keys raise std::runtime_error with the line number.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig parse_config_file(const std::string& path);

}  // namespace ghostlab

#endif
