#include "ghostlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ghostlab {

namespace {

// Copies a lattice function onto a pad-times-larger lattice (same pitch),
// centered, zeros outside.
FieldGrid pad_grid(const FieldGrid& f, int pad) {
  if (pad < 1) throw std::invalid_argument("pad factor must be >= 1");
  FieldGrid big = f.dim() == 1
                      ? FieldGrid(f.nx() * pad, f.pitch_x())
                      : FieldGrid(f.nx() * pad, f.ny() * pad, f.pitch_x(),
                                  f.pitch_y());
  const int ox = big.center_x() - f.center_x();
  const int oy = big.center_y() - f.center_y();
  for (int iy = 0; iy < f.ny(); ++iy)
    for (int ix = 0; ix < f.nx(); ++ix)
      big.at(ix + ox, f.dim() == 2 ? iy + oy : 0) = f.at(ix, iy);
  return big;
}

// Linear interpolation of a radial profile at radius r; zero beyond the
// last sample.
double radial_value(const Profile& radial, double r) {
  const auto& xs = radial.x;
  if (r <= xs.front()) return radial.y.front();
  if (r >= xs.back()) return r == xs.back() ? radial.y.back() : 0.0;
  const auto it = std::upper_bound(xs.begin(), xs.end(), r);
  const std::size_t hi = std::size_t(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (r - xs[lo]) / (xs[hi] - xs[lo]);
  return radial.y[lo] * (1.0 - t) + radial.y[hi] * t;
}

// Builds the radial profile as a lattice function g(|x|) on the given
// (centered) lattice.
FieldGrid radial_on_lattice(const Profile& radial, int nx, int ny,
                            double pitch_x, double pitch_y) {
  FieldGrid g = ny == 1 ? FieldGrid(nx, pitch_x)
                        : FieldGrid(nx, ny, pitch_x, pitch_y);
  for (int iy = 0; iy < g.ny(); ++iy) {
    const double y = g.dim() == 2 ? (iy - g.center_y()) * pitch_y : 0.0;
    for (int ix = 0; ix < g.nx(); ++ix) {
      const double x = (ix - g.center_x()) * pitch_x;
      g.at(ix, iy) = Complex(radial_value(radial, std::hypot(x, y)), 0.0);
    }
  }
  return g;
}

// C(u) = sum_eta g(eta) a(u + eta) on a common centered lattice, circular.
FieldGrid circular_correlation_centered(const FieldGrid& a,
                                        const FieldGrid& g) {
  if (!a.same_layout(g)) throw std::invalid_argument("lattice mismatch");
  // With the unitary centered transforms: C = sqrt(N) * idft(conj(dft(g)) *
  // dft(a)) up to a constant phase that cancels for even, real g; callers
  // normalize, so constants are dropped. Verified against direct sums.
  FieldGrid fa = dft_centered(a);
  FieldGrid fg = dft_centered(g);
  for (std::size_t i = 0; i < fa.size(); ++i)
    fa.values[i] *= std::conj(fg.values[i]);
  return idft_centered(fa);
}

// Linear / bilinear sample of |f|^2 at a physical point; zero outside.
double intensity_at(const FieldGrid& f, double x, double y) {
  const double fx = x / f.pitch_x() + f.center_x();
  const double fy = f.dim() == 2 ? y / f.pitch_y() + f.center_y() : 0.0;
  const int ix = int(std::floor(fx));
  const int iy = int(std::floor(fy));
  auto val = [&](int jx, int jy) -> double {
    if (jx < 0 || jx >= f.nx() || jy < 0 || jy >= f.ny()) return 0.0;
    return std::norm(f.at(jx, jy));
  };
  const double tx = fx - ix;
  if (f.dim() == 1) return val(ix, 0) * (1.0 - tx) + val(ix + 1, 0) * tx;
  const double ty = fy - iy;
  return (val(ix, iy) * (1.0 - tx) + val(ix + 1, iy) * tx) * (1.0 - ty) +
         (val(ix, iy + 1) * (1.0 - tx) + val(ix + 1, iy + 1) * tx) * ty;
}

double real_at(const FieldGrid& f, double x, double y) {
  const double fx = x / f.pitch_x() + f.center_x();
  const double fy = f.dim() == 2 ? y / f.pitch_y() + f.center_y() : 0.0;
  const int ix = int(std::floor(fx));
  const int iy = int(std::floor(fy));
  auto val = [&](int jx, int jy) -> double {
    if (jx < 0 || jx >= f.nx() || jy < 0 || jy >= f.ny()) return 0.0;
    return f.at(jx, jy).real();
  };
  const double tx = fx - ix;
  if (f.dim() == 1) return val(ix, 0) * (1.0 - tx) + val(ix + 1, 0) * tx;
  const double ty = fy - iy;
  return (val(ix, iy) * (1.0 - tx) + val(ix + 1, iy) * tx) * (1.0 - ty) +
         (val(ix, iy + 1) * (1.0 - tx) + val(ix + 1, iy + 1) * tx) * ty;
}

void normalize_unit_peak(std::vector<double>& v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, x);
  if (!(peak > 0.0)) throw std::runtime_error("profile is identically zero");
  for (double& x : v) x /= peak;
}

// Radial read-out of the padded centered transform of a real lattice
// function, normalized to 1 at zero separation.
Profile radial_transform_profile(const FieldGrid& f, int pad,
                                 double out_spacing) {
  FieldGrid t = dft_centered(pad_grid(f, pad));
  const int c = t.center_x();
  const int cy = t.center_y();
  const double v0 = t.at(c, cy).real();
  if (!(std::abs(v0) > 0.0)) throw std::runtime_error("empty aperture");
  Profile p;
  for (int k = 0; k + c < t.nx(); ++k) {
    p.x.push_back(k * out_spacing);
    p.y.push_back(t.at(c + k, cy).real() / v0);
  }
  return p;
}

}  // namespace

OracleProfile fraunhofer_pattern(const TransmissionMask& mask,
                                 double wavelength, double focal, int pad) {
  if (mask.values.dim() != 1)
    throw std::invalid_argument("fraunhofer_pattern expects a 1D mask");
  if (pad < 8) throw std::invalid_argument("pad factor must be >= 8");
  FieldGrid amp = dft_centered(pad_grid(mask.values, pad));
  OracleProfile out;
  out.axis = focal_plane_axis(amp.nx(), amp.pitch_x(), wavelength, focal);
  out.values.resize(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i)
    out.values[i] = std::norm(amp.values[i]);
  normalize_unit_peak(out.values);
  return out;
}

double vcz_coherence_length(double wavelength, double distance,
                            double aperture) {
  if (!(wavelength > 0.0) || !(distance > 0.0) || !(aperture > 0.0))
    throw std::invalid_argument("vcz inputs must be positive");
  return wavelength * distance / aperture;
}

namespace {

// Shared machinery for the 1D profile and the 2D map: the coherent
// diffraction amplitude on a pad-times-refined focal lattice, correlated
// with the (radial) far-field field correlation.
FieldGrid ghost_diffraction_field(const TransmissionMask& mask,
                                  const Profile& gamma_f, double wavelength,
                                  double focal, int pad) {
  if (gamma_f.x.size() != gamma_f.y.size() || gamma_f.x.size() < 2)
    throw std::invalid_argument("field-correlation profile is too short");
  FieldGrid amp = dft_centered(pad_grid(mask.values, pad));
  // relabel the fine lattice to focal-plane coordinates
  const double fx =
      wavelength * focal / (double(amp.nx()) * mask.values.pitch_x());
  FieldGrid fine =
      amp.dim() == 1
          ? FieldGrid(amp.nx(), fx)
          : FieldGrid(amp.nx(), amp.ny(), fx,
                      wavelength * focal /
                          (double(amp.ny()) * mask.values.pitch_y()));
  fine.values = std::move(amp.values);
  FieldGrid gam = radial_on_lattice(gamma_f, fine.nx(), fine.ny(),
                                    fine.pitch_x(), fine.pitch_y());
  return circular_correlation_centered(fine, gam);
}

}  // namespace

OracleProfile predicted_ghost_diffraction(const TransmissionMask& mask,
                                          const Profile& gamma_f,
                                          double wavelength, double focal,
                                          double x1, int pad) {
  if (mask.values.dim() != 1)
    throw std::invalid_argument("use the _map variant for 2D masks");
  FieldGrid corr =
      ghost_diffraction_field(mask, gamma_f, wavelength, focal, pad);
  OracleProfile out;
  out.axis = focal_plane_axis(mask.values.nx(), mask.values.pitch_x(),
                              wavelength, focal);
  out.values.resize(out.axis.positions.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = intensity_at(corr, x1 - out.axis.positions[i], 0.0);
  normalize_unit_peak(out.values);
  return out;
}

IntensityGrid predicted_ghost_diffraction_map(const TransmissionMask& mask,
                                              const Profile& gamma_f,
                                              double wavelength, double focal,
                                              double x1_x, double x1_y,
                                              int pad) {
  if (mask.values.dim() != 2)
    throw std::invalid_argument("2D mask required");
  FieldGrid corr =
      ghost_diffraction_field(mask, gamma_f, wavelength, focal, pad);
  const Axis ax = focal_plane_axis(mask.values.nx(), mask.values.pitch_x(),
                                   wavelength, focal);
  const Axis ay = focal_plane_axis(mask.values.ny(), mask.values.pitch_y(),
                                   wavelength, focal);
  IntensityGrid out(mask.values.nx(), mask.values.ny(), ax.spacing(),
                    ay.spacing());
  for (int iy = 0; iy < out.ny(); ++iy)
    for (int ix = 0; ix < out.nx(); ++ix)
      out.at(ix, iy) = intensity_at(corr, x1_x - ax.positions[ix],
                                    x1_y - ay.positions[iy]);
  normalize_unit_peak(out.values);
  return out;
}

namespace {

FieldGrid ghost_image_conv(const TransmissionMask& mask,
                           const Profile& gamma_n) {
  const FieldGrid& T = mask.values;
  FieldGrid t2 = T;
  for (auto& v : t2.values) v = Complex(std::norm(v), 0.0);
  FieldGrid g =
      radial_on_lattice(gamma_n, T.nx(), T.ny(), T.pitch_x(), T.pitch_y());
  for (auto& v : g.values) v = Complex(std::norm(v), 0.0);
  return circular_correlation_centered(t2, g);
}

}  // namespace

OracleProfile predicted_ghost_image_bucket(const TransmissionMask& mask,
                                           const Profile& gamma_n, double m) {
  if (mask.values.dim() != 1)
    throw std::invalid_argument("use the _map variant for 2D masks");
  if (!(m > 0.0)) throw std::invalid_argument("magnification must be > 0");
  FieldGrid conv = ghost_image_conv(mask, gamma_n);
  OracleProfile out;
  out.axis = mask.values.axis_x();
  out.values.resize(out.axis.positions.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] =
        std::max(0.0, real_at(conv, -m * out.axis.positions[i], 0.0));
  normalize_unit_peak(out.values);
  return out;
}

IntensityGrid predicted_ghost_image_bucket_map(const TransmissionMask& mask,
                                               const Profile& gamma_n,
                                               double m) {
  if (mask.values.dim() != 2)
    throw std::invalid_argument("2D mask required");
  if (!(m > 0.0)) throw std::invalid_argument("magnification must be > 0");
  FieldGrid conv = ghost_image_conv(mask, gamma_n);
  const FieldGrid& T = mask.values;
  IntensityGrid out(T.nx(), T.ny(), T.pitch_x(), T.pitch_y());
  const Axis ax = T.axis_x(), ay = T.axis_y();
  for (int iy = 0; iy < out.ny(); ++iy)
    for (int ix = 0; ix < out.nx(); ++ix)
      out.at(ix, iy) = std::max(
          0.0, real_at(conv, -m * ax.positions[ix], -m * ay.positions[iy]));
  normalize_unit_peak(out.values);
  return out;
}

VisibilityEstimate visibility_ratio_estimate(double coherence_area,
                                             double object_area) {
  if (!(coherence_area > 0.0) || !(object_area > 0.0))
    throw std::invalid_argument("areas must be positive");
  VisibilityEstimate e;
  e.ratio = coherence_area / object_area;
  e.outside_proportional_regime = e.ratio > 0.5;
  return e;
}

Profile aperture_far_correlation(int nx, int ny, double pitch_x,
                                 double pitch_y, double diameter,
                                 double wavelength, double focal, int pad) {
  FieldGrid P = ny == 1 ? FieldGrid(nx, pitch_x)
                        : FieldGrid(nx, ny, pitch_x, pitch_y);
  for (int iy = 0; iy < P.ny(); ++iy) {
    const double y = P.dim() == 2 ? (iy - P.center_y()) * pitch_y : 0.0;
    for (int ix = 0; ix < P.nx(); ++ix) {
      const double x = (ix - P.center_x()) * pitch_x;
      if (std::hypot(x, y) <= diameter / 2.0) P.at(ix, iy) = Complex(1.0, 0.0);
    }
  }
  const double spacing =
      wavelength * focal / (double(nx) * pad * pitch_x);
  return radial_transform_profile(P, pad, spacing);
}

Profile source_near_correlation(const SourceConfig& cfg, int pad) {
  cfg.validate();
  SourceConfig c = cfg;
  FieldGrid env2 = c.ny == 1
                       ? FieldGrid(c.nx, c.pitch_x)
                       : FieldGrid(c.nx, c.ny, c.pitch_x, c.pitch_y);
  // squared synthesis envelope on the pre-transform lattice
  for (int iy = 0; iy < env2.ny(); ++iy) {
    const double y =
        env2.dim() == 2 ? (iy - env2.center_y()) * c.pitch_y : 0.0;
    for (int ix = 0; ix < env2.nx(); ++ix) {
      const double x = (ix - env2.center_x()) * c.pitch_x;
      const double r = std::hypot(x, y);
      double e;
      if (c.envelope == EnvelopeKind::gaussian)
        e = std::exp(-r * r / (2.0 * c.envelope_std * c.envelope_std));
      else
        e = r <= c.envelope_std ? 1.0 : 0.0;
      env2.at(ix, iy) = Complex(e * e, 0.0);
    }
  }
  // the transform of the squared envelope gives the field correlation on
  // the synthesized lattice; separation spacing refines as pitch / pad
  return radial_transform_profile(env2, pad, c.pitch_x / pad);
}

double fringe_period(const Profile& profile) {
  const std::size_t n = profile.x.size();
  if (n != profile.y.size() || n < 8)
    throw std::invalid_argument("profile too short for a period estimate");
  const double dx = profile.x[1] - profile.x[0];
  // Trim to the active support so a wide empty axis cannot drown the
  // fringe structure in the statistics below.
  const double ymax = *std::max_element(profile.y.begin(), profile.y.end());
  std::size_t first = 0, last = n - 1;
  while (first < last && profile.y[first] < 0.005 * ymax) ++first;
  while (last > first && profile.y[last] < 0.005 * ymax) --last;
  if (last - first + 1 < 8)
    throw std::runtime_error("profile support too narrow");
  const std::vector<double> yy(profile.y.begin() + first,
                               profile.y.begin() + last + 1);
  const std::size_t nn = yy.size();
  // The intensity is carrier-times-envelope; the envelope shifts the
  // positions of the intensity maxima, so peak spacing is a biased period
  // measure. The carrier frequency itself is clean in the spectrum of the
  // mean-removed profile: the envelope contributes a low-frequency lobe,
  // the fringes a lobe at the carrier, and the carrier lobe is the
  // highest-frequency prominent one (a squared cosine has no harmonics).
  double mean = 0.0;
  for (double v : yy) mean += v;
  mean /= double(nn);
  const std::size_t nk = nn / 2;
  std::vector<double> mag(nk + 1, 0.0);
  for (std::size_t k = 1; k <= nk; ++k) {
    Complex s(0.0, 0.0);
    const double w = -2.0 * std::numbers::pi * double(k) / double(nn);
    const Complex rot(std::cos(w), std::sin(w));
    Complex ph(1.0, 0.0);
    for (std::size_t j = 0; j < nn; ++j) {
      s += (yy[j] - mean) * ph;
      ph *= rot;
    }
    mag[k] = std::abs(s);
  }
  // Smooth over +-2 bins so a noisy carrier lobe reads as one maximum,
  // then take the highest-frequency smoothed local maximum that is
  // comparable to the strongest lobe.
  std::vector<double> s(mag.size(), 0.0);
  for (std::size_t k = 0; k <= nk; ++k) {
    double acc = 0.0;
    int cnt = 0;
    for (int d = -2; d <= 2; ++d) {
      const long kk = long(k) + d;
      if (kk < 0 || kk > long(nk)) continue;
      acc += mag[std::size_t(kk)];
      ++cnt;
    }
    s[k] = acc / cnt;
  }
  const double top = *std::max_element(s.begin() + 1, s.end());
  if (!(top > 0.0)) throw std::runtime_error("no oscillation found");
  std::size_t kbest = 0;
  for (std::size_t k = 2; k + 2 <= nk; ++k)
    if (s[k] >= 0.35 * top && s[k] >= s[k - 1] && s[k] >= s[k + 1]) kbest = k;
  if (kbest == 0) throw std::runtime_error("fringe spacing not measurable");
  // sub-bin refinement with a parabola in log magnitude
  const double lm = std::log(s[kbest - 1]), l0 = std::log(s[kbest]),
               lp = std::log(s[kbest + 1]);
  const double den = lm - 2.0 * l0 + lp;
  const double shift = den != 0.0 ? 0.5 * (lm - lp) / den : 0.0;
  const double freq = (double(kbest) + shift) / (double(nn) * dx);
  if (!(freq > 0.0)) throw std::runtime_error("fringe spacing not measurable");
  return 1.0 / freq;
}

}  // namespace ghostlab
