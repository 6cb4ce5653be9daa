#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "ghostlab/source.hpp"

using namespace ghostlab;

namespace {

SourceConfig small_source() {
  SourceConfig cfg;
  cfg.nx = 256;
  cfg.pitch_x = 8.7e-6;
  cfg.envelope_std = envelope_std_for_coherence_length(256, 8.7e-6, 34e-6);
  return cfg;
}

}  // namespace

TEST_CASE("hash_seed is stable and collision-averse") {
  CHECK(hash_seed(1, 2) == hash_seed(1, 2));
  CHECK(hash_seed(1, 2) != hash_seed(1, 3));
  CHECK(hash_seed(1, 2) != hash_seed(2, 2));
  CHECK(hash_seed(0, 0) != 0);
}

TEST_CASE("thermal field is a pure function of (config, seed)") {
  SourceConfig cfg = small_source();
  FieldGrid a = draw_thermal_field(cfg, 42);
  FieldGrid b = draw_thermal_field(cfg, 42);
  FieldGrid c = draw_thermal_field(cfg, 43);
  CHECK(a.values == b.values);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    diff = std::max(diff, std::abs(a.values[i] - c.values[i]));
  CHECK(diff > 1e-3);
}

TEST_CASE("mean intensity per site matches the configured level") {
  SourceConfig cfg = small_source();
  cfg.mean_intensity = 2.5;
  const int frames = 3000;
  // a handful of probe sites spread over the grid
  const int probes[] = {32, 96, 128, 170, 220};
  double sums[5] = {0, 0, 0, 0, 0};
  for (int f = 0; f < frames; ++f) {
    FieldGrid e = draw_thermal_field(cfg, hash_seed(9, f));
    for (int k = 0; k < 5; ++k) sums[k] += std::norm(e.at(probes[k]));
  }
  for (int k = 0; k < 5; ++k) {
    // exponential intensity: relative se of the mean is 1/sqrt(frames)
    CHECK(sums[k] / frames == doctest::Approx(2.5).epsilon(0.08));
  }
}

TEST_CASE("field correlation width follows the requested coherence length") {
  // Gamma(dx) = exp(-dx^2/(2 sigma^2)) with 2 sigma = 34um, so at
  // dx = 34um the normalized correlation is e^-2.
  SourceConfig cfg = small_source();
  const int frames = 6000;
  const int c = 128;
  const int lag = 4;  // 34.8um at 8.7um pitch
  std::complex<double> cross{0.0, 0.0};
  double p0 = 0.0, p1 = 0.0;
  for (int f = 0; f < frames; ++f) {
    FieldGrid e = draw_thermal_field(cfg, hash_seed(11, f));
    cross += e.at(c) * std::conj(e.at(c + lag));
    p0 += std::norm(e.at(c));
    p1 += std::norm(e.at(c + lag));
  }
  double gamma = std::abs(cross) / std::sqrt(p0 * p1);
  double expected = std::exp(-2.0 * std::pow(34.8 / 34.0, 2));
  CHECK(gamma == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("intensity at one site is exponentially distributed") {
  SourceConfig cfg = small_source();
  const int n = 4000;
  std::vector<double> samples(n);
  for (int f = 0; f < n; ++f)
    samples[f] = std::norm(draw_thermal_field(cfg, hash_seed(21, f)).at(128));
  std::sort(samples.begin(), samples.end());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double cdf = 1.0 - std::exp(-samples[i] / mean);
    ks = std::max(ks, std::max(std::abs(cdf - double(i) / n),
                               std::abs(cdf - double(i + 1) / n)));
  }
  CHECK(ks < 1.628 / std::sqrt(double(n)));  // 1% KS critical value
}

TEST_CASE("diaphragm keeps |x| <= D/2 and zeroes the rest") {
  FieldGrid f(64, 1.0);
  for (auto& v : f.values) v = 1.0;
  FieldGrid g = apply_diaphragm(f, 16.0);
  CHECK(std::abs(g.at(32)) == doctest::Approx(1.0));  // center
  CHECK(std::abs(g.at(32 + 8)) == doctest::Approx(1.0));
  CHECK(std::abs(g.at(32 + 9)) == doctest::Approx(0.0));
  CHECK(std::abs(g.at(32 - 8)) == doctest::Approx(1.0));
  CHECK(std::abs(g.at(0)) == doctest::Approx(0.0));
}

TEST_CASE("balanced splitter: t = sqrt(1/2), r = i sqrt(1/2)") {
  SplitterSpec bs = SplitterSpec::balanced();
  CHECK(std::norm(bs.t) == doctest::Approx(0.5));
  CHECK(std::norm(bs.r) == doctest::Approx(0.5));
  CHECK(bs.r.real() == doctest::Approx(0.0));
  CHECK(bs.r.imag() == doctest::Approx(std::sqrt(0.5)));

  FieldGrid f(4, 1.0);
  f.at(1) = Complex(2.0, 0.0);
  auto [a, b] = beam_split(f, bs);
  CHECK(std::norm(a.at(1)) + std::norm(b.at(1)) == doctest::Approx(4.0));
}

TEST_CASE("splitter intensities must not exceed unity in total") {
  CHECK_NOTHROW(SplitterSpec::from_intensities(0.4, 0.6));
  CHECK_THROWS(SplitterSpec::from_intensities(0.5, 0.6));
  CHECK_THROWS(SplitterSpec::from_intensities(-0.1, 0.5));
}

TEST_CASE("envelope width formula for a coherence-length target") {
  // s = n p^2 / (sqrt(2) pi sigma) with sigma = L/2
  const int n = 2048;
  const double p = 8.7e-6, L = 34e-6;
  double s = envelope_std_for_coherence_length(n, p, L);
  CHECK(s == doctest::Approx(n * p * p / (std::sqrt(2.0) * M_PI * (L / 2.0)))
                 .epsilon(1e-12));
}
