#include "ghostlab/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fft_internal.hpp"

namespace ghostlab {

namespace {

IntensityGrid zero_like(const IntensityGrid& g) {
  return g.dim() == 1 ? IntensityGrid(g.nx(), g.pitch_x())
                      : IntensityGrid(g.nx(), g.ny(), g.pitch_x(), g.pitch_y());
}

// Circular cross-correlation c(d) = sum_x a(x) b(x + d), natural lag
// ordering (d = 0 at index 0, negative lags wrapped to the top).
std::vector<double> circular_correlation(const std::vector<double>& a,
                                         const std::vector<double>& b, int nx,
                                         int ny) {
  const std::size_t n = a.size();
  std::vector<Complex> fa(n), fb(n);
  for (std::size_t i = 0; i < n; ++i) {
    fa[i] = Complex(a[i], 0.0);
    fb[i] = Complex(b[i], 0.0);
  }
  detail::fft_raw(fa, nx, ny, true);
  detail::fft_raw(fb, nx, ny, true);
  for (std::size_t i = 0; i < n; ++i) fa[i] = std::conj(fa[i]) * fb[i];
  detail::fft_raw(fa, nx, ny, false);
  std::vector<double> c(n);
  const double norm = 1.0 / double(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = fa[i].real() * norm;
  return c;
}

// Natural lag ordering -> centered (lag 0 at (nx/2, ny/2)).
std::vector<double> center_lags(const std::vector<double>& v, int nx, int ny) {
  std::vector<double> out(v.size());
  const int cx = nx / 2, cy = ny / 2;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out[std::size_t((iy + cy) % ny) * nx + (ix + cx) % nx] =
          v[std::size_t(iy) * nx + ix];
  return out;
}

void add_into(std::vector<double>& acc, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
}

}  // namespace

CorrelationAccumulator CorrelationAccumulator::fixed_pixel(
    const IntensityGrid& layout2, int x1_ix, int x1_iy) {
  CorrelationAccumulator a;
  a.mode_ = CorrMode::fixed_pixel;
  a.layout_ = zero_like(layout2);
  a.x1_ix_ = x1_ix;
  a.x1_iy_ = x1_iy;
  a.sum_I2_.assign(layout2.size(), 0.0);
  a.sum_P_.assign(layout2.size(), 0.0);
  a.sum_P_sq_.assign(layout2.size(), 0.0);
  return a;
}

CorrelationAccumulator CorrelationAccumulator::bucket(
    const IntensityGrid& layout2) {
  CorrelationAccumulator a = fixed_pixel(layout2, 0, 0);
  a.mode_ = CorrMode::bucket;
  return a;
}

CorrelationAccumulator CorrelationAccumulator::full_map(
    const IntensityGrid& layout) {
  CorrelationAccumulator a;
  a.mode_ = CorrMode::full_map;
  a.layout_ = zero_like(layout);
  a.sum_I1_.assign(layout.size(), 0.0);
  a.sum_I2_.assign(layout.size(), 0.0);
  a.sum_corr_.assign(layout.size(), 0.0);
  a.sum_P_sq_.assign(layout.size(), 0.0);  // sum of c(d)^2 across frames
  return a;
}

void CorrelationAccumulator::accumulate(const IntensityGrid& I1,
                                        const IntensityGrid& I2) {
  if (!I2.same_layout(layout_))
    throw std::invalid_argument("frame does not match accumulator layout");
  if (mode_ == CorrMode::full_map) {
    if (!I1.same_layout(layout_))
      throw std::invalid_argument("frame does not match accumulator layout");
    add_into(sum_I1_, I1.values);
    add_into(sum_I2_, I2.values);
    const std::vector<double> c =
        circular_correlation(I1.values, I2.values, layout_.nx(), layout_.ny());
    for (std::size_t i = 0; i < c.size(); ++i) {
      sum_corr_[i] += c[i];
      sum_P_sq_[i] += c[i] * c[i];
    }
  } else {
    double r1;
    if (mode_ == CorrMode::fixed_pixel) {
      if (x1_ix_ < 0 || x1_ix_ >= I1.nx() || x1_iy_ < 0 || x1_iy_ >= I1.ny())
        throw std::invalid_argument("fixed pixel outside the reference grid");
      r1 = I1.at(x1_ix_, x1_iy_);
    } else {
      double s = 0.0;
      for (double v : I1.values) s += v;
      r1 = s * I1.cell();
    }
    sum_r1_ += r1;
    sum_r1_sq_ += r1 * r1;
    for (std::size_t i = 0; i < sum_I2_.size(); ++i) {
      const double p = r1 * I2.values[i];
      sum_I2_[i] += I2.values[i];
      sum_P_[i] += p;
      sum_P_sq_[i] += p * p;
    }
  }
  ++n_;
}

void CorrelationAccumulator::merge(const CorrelationAccumulator& other) {
  if (mode_ != other.mode_ || !layout_.same_layout(other.layout_) ||
      x1_ix_ != other.x1_ix_ || x1_iy_ != other.x1_iy_)
    throw std::invalid_argument("cannot merge mismatched accumulators");
  n_ += other.n_;
  sum_r1_ += other.sum_r1_;
  sum_r1_sq_ += other.sum_r1_sq_;
  auto add_vec = [](std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  add_vec(sum_I2_, other.sum_I2_);
  add_vec(sum_P_, other.sum_P_);
  add_vec(sum_P_sq_, other.sum_P_sq_);
  add_vec(sum_corr_, other.sum_corr_);
  add_vec(sum_I1_, other.sum_I1_);
}

CorrelationAccumulator::Report CorrelationAccumulator::finalize() const {
  if (n_ < 2)
    throw std::runtime_error("correlation needs at least two frames");
  Report r;
  r.mode = mode_;
  r.n_frames = n_;
  r.dim = layout_.dim();
  r.nx = layout_.nx();
  r.ny = layout_.ny();
  r.pitch_x = layout_.pitch_x();
  r.pitch_y = layout_.pitch_y();
  const double inv_n = 1.0 / double(n_);
  const std::size_t sites = layout_.size();

  if (mode_ == CorrMode::full_map) {
    r.mean_I1_map.resize(sites);
    r.mean_I2.resize(sites);
    for (std::size_t i = 0; i < sites; ++i) {
      r.mean_I1_map[i] = sum_I1_[i] * inv_n;
      r.mean_I2[i] = sum_I2_[i] * inv_n;
    }
    double s1 = 0.0;
    for (double v : r.mean_I1_map) s1 += v;
    r.mean_I1 = s1 / double(sites);
    // Background: the same translational product built from the mean maps.
    const std::vector<double> base = circular_correlation(
        r.mean_I1_map, r.mean_I2, layout_.nx(), layout_.ny());
    const std::vector<double> mean_corr = center_lags(
        [&] {
          std::vector<double> m(sites);
          for (std::size_t i = 0; i < sites; ++i) m[i] = sum_corr_[i] * inv_n;
          return m;
        }(),
        layout_.nx(), layout_.ny());
    const std::vector<double> corr_sq =
        center_lags(sum_P_sq_, layout_.nx(), layout_.ny());
    const std::vector<double> base_c =
        center_lags(base, layout_.nx(), layout_.ny());
    // mean_I1_map / mean_I2 stay in position ordering; only the lag-domain
    // quantities are recentered.
    r.mean_I1I2.resize(sites);
    r.G.resize(sites);
    r.g2.resize(sites);
    r.se_G.resize(sites);
    const double inv_sites = 1.0 / double(sites);
    for (std::size_t i = 0; i < sites; ++i) {
      r.mean_I1I2[i] = mean_corr[i] * inv_sites;
      const double var =
          std::max(0.0, corr_sq[i] * inv_n - mean_corr[i] * mean_corr[i]);
      r.se_G[i] = std::sqrt(var * inv_n) * inv_sites;
      if (base_c[i] > 0.0) {
        r.G[i] = (mean_corr[i] - base_c[i]) * inv_sites;
        r.g2[i] = mean_corr[i] / base_c[i];
      } else {
        r.G[i] = 0.0;
        r.g2[i] = 0.0;
      }
    }
    return r;
  }

  r.mean_I1 = sum_r1_ * inv_n;
  r.mean_I2.resize(sites);
  r.mean_I1I2.resize(sites);
  r.G.resize(sites);
  r.g2.resize(sites);
  r.se_G.resize(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    r.mean_I2[i] = sum_I2_[i] * inv_n;
    r.mean_I1I2[i] = sum_P_[i] * inv_n;
    const double bg = r.mean_I1 * r.mean_I2[i];
    r.G[i] = r.mean_I1I2[i] - bg;
    r.g2[i] = bg > 0.0 ? r.mean_I1I2[i] / bg : 0.0;
    const double var =
        std::max(0.0, sum_P_sq_[i] * inv_n - r.mean_I1I2[i] * r.mean_I1I2[i]);
    r.se_G[i] = std::sqrt(var * inv_n);
  }
  return r;
}

Profile radial_autocorrelation(const CorrelationReport& report) {
  if (report.mode != CorrMode::full_map)
    throw std::invalid_argument("radial average needs a full correlation map");
  const double binw = report.dim == 1
                          ? report.pitch_x
                          : std::min(report.pitch_x, report.pitch_y);
  const int cx = report.nx / 2, cy = report.ny / 2;
  std::vector<double> sums, counts;
  for (int iy = 0; iy < report.ny; ++iy) {
    const double dy = report.dim == 2 ? (iy - cy) * report.pitch_y : 0.0;
    for (int ix = 0; ix < report.nx; ++ix) {
      const double dx = (ix - cx) * report.pitch_x;
      const double rad = std::hypot(dx, dy);
      const std::size_t bin = std::size_t(std::lround(rad / binw));
      if (bin >= sums.size()) {
        sums.resize(bin + 1, 0.0);
        counts.resize(bin + 1, 0.0);
      }
      sums[bin] += report.g2[std::size_t(iy) * report.nx + ix];
      counts[bin] += 1.0;
    }
  }
  Profile p;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (counts[k] == 0.0) continue;
    p.x.push_back(double(k) * binw);
    p.y.push_back(sums[k] / counts[k]);
  }
  return p;
}

namespace {

struct GaussModel {
  double b, A, sigma;
  double eval(double x) const {
    return b + A * std::exp(-x * x / (2.0 * sigma * sigma));
  }
};

double sse(const GaussModel& m, const std::vector<double>& xs,
           const std::vector<double>& ys) {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - m.eval(xs[i]);
    s += r * r;
  }
  return s;
}

// Levenberg-damped Gauss-Newton refinement of (b, A, sigma).
GaussModel refine(GaussModel m, const std::vector<double>& xs,
                  const std::vector<double>& ys) {
  double lambda = 1e-3;
  double best = sse(m, xs, ys);
  for (int iter = 0; iter < 40; ++iter) {
    double JtJ[3][3] = {};
    double Jtr[3] = {};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      const double e = std::exp(-x * x / (2.0 * m.sigma * m.sigma));
      const double J[3] = {1.0, e,
                           m.A * e * x * x / (m.sigma * m.sigma * m.sigma)};
      const double r = ys[i] - m.eval(x);
      for (int a = 0; a < 3; ++a) {
        Jtr[a] += J[a] * r;
        for (int b = 0; b < 3; ++b) JtJ[a][b] += J[a] * J[b];
      }
    }
    for (int a = 0; a < 3; ++a) JtJ[a][a] *= 1.0 + lambda;
    // Solve the 3x3 system by Gaussian elimination with partial pivoting.
    double M[3][4];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) M[a][b] = JtJ[a][b];
      M[a][3] = Jtr[a];
    }
    bool singular = false;
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int row = col + 1; row < 3; ++row)
        if (std::abs(M[row][col]) > std::abs(M[piv][col])) piv = row;
      if (std::abs(M[piv][col]) < 1e-300) {
        singular = true;
        break;
      }
      std::swap(M[piv], M[col]);
      for (int row = 0; row < 3; ++row) {
        if (row == col) continue;
        const double f = M[row][col] / M[col][col];
        for (int b = col; b < 4; ++b) M[row][b] -= f * M[col][b];
      }
    }
    if (singular) break;
    const double db = M[0][3] / M[0][0];
    const double dA = M[1][3] / M[1][1];
    const double ds = M[2][3] / M[2][2];
    GaussModel trial{m.b + db, m.A + dA, std::abs(m.sigma + ds)};
    if (!(trial.sigma > 0.0)) trial.sigma = m.sigma;
    const double trial_sse = sse(trial, xs, ys);
    if (trial_sse < best) {
      const double improvement = best - trial_sse;
      m = trial;
      best = trial_sse;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (improvement <= 1e-24 * (best + 1e-300)) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e9) break;
    }
  }
  return m;
}

PeakFit fit_gaussian_core(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  PeakFit fit;
  const std::size_t n = xs.size();
  if (n < 6) return fit;
  double xmax = 0.0;
  for (double x : xs) xmax = std::max(xmax, std::abs(x));
  // Baseline seed: outer quarter of separations.
  double b0 = 0.0, b_var = 0.0;
  std::size_t n_out = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(xs[i]) >= 0.75 * xmax) {
      b0 += ys[i];
      ++n_out;
    }
  if (n_out == 0) return fit;
  b0 /= double(n_out);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(xs[i]) >= 0.75 * xmax) b_var += (ys[i] - b0) * (ys[i] - b0);
  const double b_std = std::sqrt(b_var / double(n_out));

  std::size_t ipk = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (ys[i] > ys[ipk]) ipk = i;
  const double A0 = ys[ipk] - b0;
  if (!(A0 > 3.0 * b_std) || !(A0 > 1e-12 * std::max(std::abs(b0), 1.0)))
    return fit;

  // Seed (A, sigma) with a parabola in log(y - b0) vs x^2 over the points
  // of the contiguous top half around the peak.
  std::vector<double> px, py;
  for (std::size_t i = ipk; i < n; ++i) {
    if (ys[i] - b0 < A0 / 2.0) break;
    px.push_back(xs[i]);
    py.push_back(ys[i]);
  }
  for (std::size_t i = ipk; i-- > 0;) {
    if (ys[i] - b0 < A0 / 2.0) break;
    px.push_back(xs[i]);
    py.push_back(ys[i]);
  }
  double sigma0;
  if (px.size() >= 3) {
    // least squares of log(y-b0) = logA - u/(2 sigma^2), u = x^2
    double su = 0, sz = 0, suu = 0, suz = 0;
    const double m = double(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
      const double u = px[i] * px[i];
      const double z = std::log(py[i] - b0);
      su += u;
      sz += z;
      suu += u * u;
      suz += u * z;
    }
    const double denom = m * suu - su * su;
    const double slope = denom != 0.0 ? (m * suz - su * sz) / denom : 0.0;
    sigma0 = slope < 0.0 ? std::sqrt(-1.0 / (2.0 * slope)) : 0.0;
  } else {
    sigma0 = 0.0;
  }
  if (!(sigma0 > 0.0)) {
    // Narrow peak: half width at half maximum of the sampled profile.
    double hwhm = xmax;
    for (std::size_t i = ipk; i < n; ++i)
      if (ys[i] - b0 < A0 / 2.0) {
        hwhm = std::abs(xs[i] - xs[ipk]);
        break;
      }
    sigma0 = std::max(hwhm / std::sqrt(2.0 * std::log(2.0)),
                      0.25 * xmax / double(n));
  }

  // Refinement region: the peak plus the outer baseline points.
  std::vector<double> rx, ry;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(xs[i]) <= 4.0 * sigma0 || std::abs(xs[i]) >= 0.75 * xmax) {
      rx.push_back(xs[i]);
      ry.push_back(ys[i]);
    }
  GaussModel m = refine(GaussModel{b0, A0, sigma0}, rx, ry);
  if (!(m.sigma > 0.0) || !(m.A > 0.0)) return fit;
  fit.has_peak = true;
  fit.baseline = m.b;
  fit.amplitude = m.A;
  fit.sigma = m.sigma;
  return fit;
}

}  // namespace

PeakFit fit_gaussian_peak(const Profile& profile) {
  if (profile.x.size() != profile.y.size())
    throw std::invalid_argument("profile arrays differ in length");
  return fit_gaussian_core(profile.x, profile.y);
}

PeakFit fit_field_correlation(const Profile& g2_profile) {
  PeakFit g = fit_gaussian_peak(g2_profile);
  if (!g.has_peak) return g;
  const std::vector<double>& x = g2_profile.x;
  const std::vector<double>& y = g2_profile.y;
  std::vector<double> yf(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    yf[i] = std::sqrt(std::max(0.0, (y[i] - g.baseline) / g.amplitude));
  // Restrict to the contiguous region around the peak where the field
  // correlation clearly dominates the (sqrt-clipped, hence biased) noise
  // floor, and fit A*exp(-x^2/2sigma^2) with no baseline term there.
  std::size_t ipk = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[ipk]) ipk = i;
  const double thresh = 0.2;
  std::size_t lo = ipk, hi = ipk;
  while (hi + 1 < yf.size() && yf[hi + 1] >= thresh) ++hi;
  while (lo > 0 && yf[lo - 1] >= thresh) --lo;
  if (hi - lo + 1 < 4) {
    g.has_peak = false;
    return g;
  }
  // log-parabola seed, then Gauss-Newton in (A, sigma)
  double su = 0, sz = 0, suu = 0, suz = 0;
  const double npts = double(hi - lo + 1);
  for (std::size_t i = lo; i <= hi; ++i) {
    const double u = x[i] * x[i], z = std::log(std::max(yf[i], 1e-12));
    su += u;
    sz += z;
    suu += u * u;
    suz += u * z;
  }
  const double denom = npts * suu - su * su;
  const double slope = denom != 0.0 ? (npts * suz - su * sz) / denom : 0.0;
  double sigma = slope < 0.0 ? std::sqrt(-0.5 / slope)
                             : std::max(std::abs(x[hi] - x[ipk]), x[1] - x[0]);
  double A = 1.0;
  for (int iter = 0; iter < 40; ++iter) {
    double h11 = 0, h12 = 0, h22 = 0, g1 = 0, g2v = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
      const double e = std::exp(-x[i] * x[i] / (2.0 * sigma * sigma));
      const double dA = e;
      const double dS = A * e * x[i] * x[i] / (sigma * sigma * sigma);
      const double resid = yf[i] - A * e;
      h11 += dA * dA;
      h12 += dA * dS;
      h22 += dS * dS;
      g1 += dA * resid;
      g2v += dS * resid;
    }
    const double det = h11 * h22 - h12 * h12;
    if (std::abs(det) < 1e-300) break;
    const double stepA = (h22 * g1 - h12 * g2v) / det;
    const double stepS = (h11 * g2v - h12 * g1) / det;
    A += stepA;
    sigma = std::abs(sigma + stepS);
    if (std::abs(stepS) < 1e-14 * sigma && std::abs(stepA) < 1e-14) break;
  }
  if (!(sigma > 0.0) || !(A > 0.0)) {
    g.has_peak = false;
    return g;
  }
  PeakFit field;
  field.has_peak = true;
  // g2-level baseline/amplitude (so the degeneracy factor stays meaningful)
  // with the field-correlation width.
  field.baseline = g.baseline;
  field.amplitude = g.amplitude;
  field.sigma = sigma;
  return field;
}

double visibility(const CorrelationReport& report) {
  if (report.G.empty()) throw std::invalid_argument("empty correlation map");
  const double gmax = *std::max_element(report.G.begin(), report.G.end());
  const double pmax =
      *std::max_element(report.mean_I1I2.begin(), report.mean_I1I2.end());
  if (!(pmax > 0.0)) throw std::runtime_error("correlation map is all zero");
  return gmax / pmax;
}

SnrEstimate snr_estimate(const CorrelationReport& report, std::uint64_t n) {
  if (report.G.empty()) throw std::invalid_argument("empty correlation map");
  std::size_t ipk = 0;
  for (std::size_t i = 1; i < report.G.size(); ++i)
    if (report.G[i] > report.G[ipk]) ipk = i;
  const double G = report.G[ipk];
  const double m12 = report.mean_I1I2[ipk];
  const double bg = m12 - G;  // <I1><I2> at the peak, any mode
  SnrEstimate s;
  s.delta_g = std::sqrt(3.0 * m12 * m12 + 8.0 * G * bg);
  s.snr_single = s.delta_g > 0.0 ? G / s.delta_g : 0.0;
  s.snr_n = std::sqrt(double(n)) * s.snr_single;
  return s;
}

}  // namespace ghostlab
