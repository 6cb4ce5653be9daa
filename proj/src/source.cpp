#include "ghostlab/source.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ghostlab {

namespace {

// Uniform double in (0, 1] from the top 53 bits; avoids the
// implementation-defined std distributions so frames are bit-reproducible
// everywhere.
double uniform53(std::mt19937_64& rng) {
  return (double(rng() >> 11) + 1.0) * 0x1p-53;
}

// Circular complex Gaussian with E|g|^2 = 1 (Box-Muller).
Complex circular_gaussian(std::mt19937_64& rng) {
  const double u1 = uniform53(rng);
  const double u2 = uniform53(rng);
  const double r = std::sqrt(-std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return Complex(r * std::cos(phi), r * std::sin(phi));
}

double envelope_value(const SourceConfig& cfg, double x, double y) {
  const double r2 = x * x + y * y;
  if (cfg.envelope == EnvelopeKind::flattop)
    return r2 <= cfg.envelope_std * cfg.envelope_std ? 1.0 : 0.0;
  return std::exp(-r2 / (2.0 * cfg.envelope_std * cfg.envelope_std));
}

}  // namespace

std::uint64_t hash_seed(std::uint64_t master_seed, std::uint64_t counter) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void SourceConfig::validate() const {
  if (!(envelope_std > 0.0))
    throw std::invalid_argument("envelope_std must be positive");
  if (!(mean_intensity > 0.0))
    throw std::invalid_argument("mean_intensity must be positive");
  if (nx < 2 || nx % 2 != 0 || (ny != 1 && (ny < 2 || ny % 2 != 0)))
    throw std::invalid_argument("source grid extents must be even and >= 2");
  if (!(pitch_x > 0.0) || (ny > 1 && !(pitch_y > 0.0)))
    throw std::invalid_argument("source grid pitch must be positive");
}

double envelope_std_for_coherence_length(int n, double pitch,
                                         double coherence_length) {
  if (!(coherence_length > 0.0))
    throw std::invalid_argument("coherence length must be positive");
  // Gamma(dx) after the centered DFT of (envelope * noise) is the
  // transform of the squared envelope; for a Gaussian envelope of std s
  // this is exp(-dx^2/(2 sigma^2)) with sigma = n*pitch^2/(sqrt(2)*pi*s).
  const double sigma = coherence_length / 2.0;
  return n * pitch * pitch / (std::sqrt(2.0) * std::numbers::pi * sigma);
}

FieldGrid draw_thermal_field(const SourceConfig& cfg,
                             std::uint64_t frame_seed) {
  cfg.validate();
  FieldGrid pre = cfg.ny == 1
                      ? FieldGrid(cfg.nx, cfg.pitch_x)
                      : FieldGrid(cfg.nx, cfg.ny, cfg.pitch_x, cfg.pitch_y);
  std::mt19937_64 rng(frame_seed);
  const int cx = pre.center_x(), cy = pre.center_y();
  double env_sq_sum = 0.0;
  for (int iy = 0; iy < pre.ny(); ++iy) {
    const double y = pre.dim() == 2 ? (iy - cy) * pre.pitch_y() : 0.0;
    for (int ix = 0; ix < pre.nx(); ++ix) {
      const double x = (ix - cx) * pre.pitch_x();
      const double env = envelope_value(cfg, x, y);
      env_sq_sum += env * env;
      pre.at(ix, iy) = env * circular_gaussian(rng);
    }
  }
  if (!(env_sq_sum > 0.0))
    throw std::invalid_argument("envelope vanishes on the whole grid");
  FieldGrid out = dft_centered(pre);
  // E|out|^2 per site is env_sq_sum / n_sites, independent of position.
  const double scale =
      std::sqrt(cfg.mean_intensity * double(out.size()) / env_sq_sum);
  for (auto& v : out.values) v *= scale;
  return out;
}

FieldGrid apply_diaphragm(const FieldGrid& field, double diameter) {
  if (!(diameter > 0.0))
    throw std::invalid_argument("diaphragm diameter must be positive");
  FieldGrid out = field;
  const double half = diameter / 2.0;
  const int cx = out.center_x(), cy = out.center_y();
  for (int iy = 0; iy < out.ny(); ++iy) {
    const double y = out.dim() == 2 ? (iy - cy) * out.pitch_y() : 0.0;
    for (int ix = 0; ix < out.nx(); ++ix) {
      const double x = (ix - cx) * out.pitch_x();
      if (x * x + y * y > half * half) out.at(ix, iy) = Complex(0.0, 0.0);
    }
  }
  return out;
}

void SplitterSpec::validate() const {
  if (std::norm(t) + std::norm(r) > 1.0 + 1e-12)
    throw std::invalid_argument("splitter |t|^2 + |r|^2 must be <= 1");
}

SplitterSpec SplitterSpec::from_intensities(double t2, double r2) {
  if (t2 < 0.0 || r2 < 0.0)
    throw std::invalid_argument("splitter intensities must be non-negative");
  SplitterSpec bs;
  bs.t = Complex(std::sqrt(t2), 0.0);
  bs.r = Complex(0.0, std::sqrt(r2));
  bs.validate();
  return bs;
}

std::pair<FieldGrid, FieldGrid> beam_split(const FieldGrid& field,
                                           const SplitterSpec& bs) {
  bs.validate();
  FieldGrid b1 = field, b2 = field;
  for (auto& v : b1.values) v *= bs.t;
  for (auto& v : b2.values) v *= bs.r;
  return {std::move(b1), std::move(b2)};
}

}  // namespace ghostlab
