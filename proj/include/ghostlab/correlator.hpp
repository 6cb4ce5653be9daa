#ifndef GHOSTLAB_CORRELATOR_HPP
#define GHOSTLAB_CORRELATOR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ghostlab/grid.hpp"

namespace ghostlab {

enum class CorrMode {
  fixed_pixel,  // I1 reduced to one site, correlated with the full I2 map
  bucket,       // I1 reduced to its spatial integral
  full_map      // translational two-point map <I1(x) I2(x+d)> (auto/cross)
};

/// Mergeable running sums for one correlation mode. Accumulation order is
/// fixed by the caller; merge is plain field-wise addition, so any
/// sharding of frames that is merged back in frame order reproduces the
/// serial result bit for bit.
class CorrelationAccumulator {
public:
  CorrelationAccumulator() = default;

  static CorrelationAccumulator fixed_pixel(const IntensityGrid& layout2,
                                            int x1_ix, int x1_iy = 0);
  static CorrelationAccumulator bucket(const IntensityGrid& layout2);
  static CorrelationAccumulator full_map(const IntensityGrid& layout);

  CorrMode mode() const { return mode_; }
  std::uint64_t n_frames() const { return n_; }

  /// Adds one frame. For full_map mode both grids must share the layout
  /// (pass the same grid twice for an autocorrelation).
  void accumulate(const IntensityGrid& I1, const IntensityGrid& I2);

  /// Adds another accumulator of identical mode and layout.
  void merge(const CorrelationAccumulator& other);

  struct Report;
  Report finalize() const;

private:
  CorrMode mode_ = CorrMode::fixed_pixel;
  IntensityGrid layout_;  // layout of I2 (zero-valued template)
  std::uint64_t n_ = 0;
  int x1_ix_ = 0, x1_iy_ = 0;
  double sum_r1_ = 0.0, sum_r1_sq_ = 0.0;  // reduced I1
  std::vector<double> sum_I2_;
  std::vector<double> sum_P_;     // r1 * I2 per site
  std::vector<double> sum_P_sq_;  // (r1 * I2)^2 per site
  // full_map sums: circular correlation over lags plus both mean maps
  std::vector<double> sum_corr_;
  std::vector<double> sum_I1_;
};

/// Finalized correlation statistics. For fixed_pixel/bucket the grids run
/// over x2; for full_map they run over the lag d (lag 0 at the center
/// index) and mean_I1I2/G/g2 are understood as translational averages.
struct CorrelationAccumulator::Report {
  CorrMode mode;
  std::uint64_t n_frames = 0;
  int dim = 1, nx = 0, ny = 1;
  double pitch_x = 0.0, pitch_y = 1.0;
  double mean_I1 = 0.0;  // reduced-I1 mean (fixed/bucket); site mean otherwise
  std::vector<double> mean_I1_map;  // full_map only
  std::vector<double> mean_I2;
  std::vector<double> mean_I1I2;
  std::vector<double> G;     // mean_I1I2 - <I1><I2>, identically
  std::vector<double> g2;    // mean_I1I2 / (<I1><I2>)
  std::vector<double> se_G;  // per-site standard error of G
};

using CorrelationReport = CorrelationAccumulator::Report;

/// Generic sampled curve: y(x).
struct Profile {
  std::vector<double> x;
  std::vector<double> y;
};

/// Azimuthal (2D) or +/- lag (1D) average of the full-map g2 as a function
/// of separation |d|, bin width = pitch.
Profile radial_autocorrelation(const CorrelationReport& report);

struct PeakFit {
  bool has_peak = false;
  double baseline = 0.0;
  double amplitude = 0.0;  // peak height above baseline
  double sigma = 0.0;

  double coherence_length() const { return 2.0 * sigma; }
  /// Degeneracy factor baseline / amplitude; meaningful when the profile
  /// is a normalized intensity correlation with baseline near 1.
  double degeneracy() const { return baseline / amplitude; }
};

/// Least-squares fit of baseline + A*exp(-x^2/(2 sigma^2)) to a profile
/// peaked at x = 0. Baseline is seeded from the outer 25% of separations,
/// a log-domain parabola fit over the top half of the peak seeds (A,
/// sigma), then a damped Gauss-Newton refinement runs on the peak region.
/// Returns has_peak = false for a flat profile.
PeakFit fit_gaussian_peak(const Profile& profile);

/// Coherence length as the 2-sigma width of the field-correlation peak:
/// the normalized-intensity-correlation profile is converted through the
/// thermal factorization |Gamma| ~ sqrt(g2 - baseline) and the Gaussian is
/// fitted to that. For a Gaussian peak this is sqrt(2) times the g2-fit
/// sigma; for hard-aperture (sinc-like) peaks it matches lambda*z/D.
PeakFit fit_field_correlation(const Profile& g2_profile);

/// V = max(G) / max(<I1 I2>) over the map.
double visibility(const CorrelationReport& report);

struct SnrEstimate {
  double delta_g = 0.0;      // single-shot noise at the G peak
  double snr_single = 0.0;   // G / delta_g
  double snr_n = 0.0;        // sqrt(N) * snr_single
};

/// Single-shot noise at the G peak from the Gaussian-statistics estimate
/// dG = sqrt(3 <I1 I2>^2 + 8 G <I1><I2>), and the sqrt(N)-averaged SNR.
SnrEstimate snr_estimate(const CorrelationReport& report, std::uint64_t n);

}  // namespace ghostlab

#endif
