#include "ghostlab/grid.hpp"

#include <fftw3.h>

#include "fft_internal.hpp"

#include <map>
#include <mutex>

namespace ghostlab {

namespace {

void check_extent(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("grid extent must be even and >= 2");
}

void check_pitch(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("grid pitch must be positive");
}

// One cached FFTW plan per (nx, ny, sign). Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they can execute on any caller buffer;
// fftw_execute_dft on distinct arrays is thread-safe, plan creation is not.
class PlanCache {
public:
  static fftw_plan get(int nx, int ny, int sign) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mutex_);
    auto key = std::tuple<int, int, int>(nx, ny, sign);
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;
    std::vector<Complex> scratch(std::size_t(nx) * ny);
    fftw_plan p;
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    if (ny == 1)
      p = fftw_plan_dft_1d(nx, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    else
      p = fftw_plan_dft_2d(ny, nx, buf, buf, sign,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.plans_[key] = p;
    return p;
  }

private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// Swap halves along both axes (extents are even, so shift and unshift
// coincide).
void fftshift(std::vector<Complex>& v, int nx, int ny) {
  const int hx = nx / 2, hy = ny / 2;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < hx; ++ix)
      std::swap(v[std::size_t(iy) * nx + ix], v[std::size_t(iy) * nx + ix + hx]);
  for (int iy = 0; iy < hy; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      std::swap(v[std::size_t(iy) * nx + ix], v[std::size_t(iy + hy) * nx + ix]);
}

FieldGrid transform(const FieldGrid& field, int sign) {
  FieldGrid out = field;
  fftshift(out.values, out.nx(), out.ny());
  fftw_plan plan = PlanCache::get(out.nx(), out.ny(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(out.values.data());
  fftw_execute_dft(plan, buf, buf);
  fftshift(out.values, out.nx(), out.ny());
  const double norm = 1.0 / std::sqrt(double(out.size()));
  for (auto& v : out.values) v *= norm;
  return out;
}

}  // namespace

Axis make_axis(int n, double pitch) {
  Axis a;
  a.pitch = pitch;
  a.positions.resize(n);
  const int c = n / 2;
  for (int i = 0; i < n; ++i) a.positions[i] = (i - c) * pitch;
  return a;
}

FieldGrid::FieldGrid(int nx, double pitch_x)
    : dim_(1), nx_(nx), ny_(1), pitch_x_(pitch_x), pitch_y_(1.0) {
  check_extent(nx);
  check_pitch(pitch_x);
  values.assign(std::size_t(nx), Complex(0.0, 0.0));
}

FieldGrid::FieldGrid(int nx, int ny, double pitch_x, double pitch_y)
    : dim_(2), nx_(nx), ny_(ny), pitch_x_(pitch_x), pitch_y_(pitch_y) {
  check_extent(nx);
  check_extent(ny);
  check_pitch(pitch_x);
  check_pitch(pitch_y);
  values.assign(std::size_t(nx) * ny, Complex(0.0, 0.0));
}

double FieldGrid::energy() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * cell();
}

IntensityGrid::IntensityGrid(int nx, double pitch_x)
    : dim_(1), nx_(nx), ny_(1), pitch_x_(pitch_x), pitch_y_(1.0) {
  check_extent(nx);
  check_pitch(pitch_x);
  values.assign(std::size_t(nx), 0.0);
}

IntensityGrid::IntensityGrid(int nx, int ny, double pitch_x, double pitch_y)
    : dim_(2), nx_(nx), ny_(ny), pitch_x_(pitch_x), pitch_y_(pitch_y) {
  check_extent(nx);
  check_extent(ny);
  check_pitch(pitch_x);
  check_pitch(pitch_y);
  values.assign(std::size_t(nx) * ny, 0.0);
}

IntensityGrid IntensityGrid::from_field(const FieldGrid& f) {
  IntensityGrid g = f.dim() == 1
                        ? IntensityGrid(f.nx(), f.pitch_x())
                        : IntensityGrid(f.nx(), f.ny(), f.pitch_x(), f.pitch_y());
  for (std::size_t i = 0; i < f.size(); ++i) g.values[i] = std::norm(f.values[i]);
  return g;
}

double IntensityGrid::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell();
}

void detail::fft_raw(std::vector<Complex>& v, int nx, int ny, bool forward) {
  if (v.size() != std::size_t(nx) * ny)
    throw std::invalid_argument("fft_raw buffer size does not match extents");
  fftw_plan plan = PlanCache::get(nx, ny, forward ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* buf = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(plan, buf, buf);
}

FieldGrid dft_centered(const FieldGrid& field) {
  return transform(field, FFTW_FORWARD);
}

FieldGrid idft_centered(const FieldGrid& field) {
  return transform(field, FFTW_BACKWARD);
}

Axis focal_plane_axis(int n, double pitch, double wavelength, double focal) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  if (!(focal > 0.0)) throw std::invalid_argument("focal length must be > 0");
  return make_axis(n, wavelength * focal / (n * pitch));
}

}  // namespace ghostlab
