#ifndef GHOSTLAB_SOURCE_HPP
#define GHOSTLAB_SOURCE_HPP

#include <cstdint>

#include "ghostlab/grid.hpp"

namespace ghostlab {

/// Mixes a master seed with a stream counter (frame index or stream tag).
/// splitmix64 finalizer; stable across platforms and worker counts.
std::uint64_t hash_seed(std::uint64_t master_seed, std::uint64_t counter);

enum class EnvelopeKind { gaussian, flattop };

/// Synthesis parameters for one pseudo-thermal near-field realization.
struct SourceConfig {
  int nx = 0;
  int ny = 1;  // 1 for 1D
  double pitch_x = 0.0;
  double pitch_y = 0.0;
  /// Width of the pre-transform envelope (meters). The Gaussian case is
  /// exp(-x^2 / (2 std^2)); flattop is 1 for |x| <= std, 0 outside.
  double envelope_std = 0.0;
  EnvelopeKind envelope = EnvelopeKind::gaussian;
  double mean_intensity = 1.0;

  void validate() const;
};

/// Envelope width that yields a near-field field-correlation peak
/// Gamma(dx) = exp(-dx^2/(2 sigma^2)) with coherence length 2*sigma equal
/// to the requested value (Gaussian envelope only).
double envelope_std_for_coherence_length(int n, double pitch,
                                         double coherence_length);

/// One statistically independent near-field speckle realization:
/// i.i.d. circular complex Gaussian noise times the envelope, transformed
/// by dft_centered and rescaled so the ensemble-mean intensity per site
/// equals cfg.mean_intensity. Pure function of (cfg, frame_seed).
FieldGrid draw_thermal_field(const SourceConfig& cfg, std::uint64_t frame_seed);

/// Hard-edged diaphragm: field kept for |x| <= D/2 (radial in 2D), zero
/// outside.
FieldGrid apply_diaphragm(const FieldGrid& field, double diameter);

/// Beam splitter transmission/reflection amplitudes. Classical limit: the
/// vacuum port carries no field.
struct SplitterSpec {
  Complex t{std::sqrt(0.5), 0.0};
  Complex r{0.0, std::sqrt(0.5)};

  void validate() const;
  static SplitterSpec balanced() { return SplitterSpec{}; }
  static SplitterSpec from_intensities(double t2, double r2);
};

/// Returns (t*field, r*field).
std::pair<FieldGrid, FieldGrid> beam_split(const FieldGrid& field,
                                           const SplitterSpec& bs);

}  // namespace ghostlab

#endif
