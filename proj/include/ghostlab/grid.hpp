#ifndef GHOSTLAB_GRID_HPP
#define GHOSTLAB_GRID_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ghostlab {

using Complex = std::complex<double>;

/// Physical coordinates of one grid axis. Uniformly spaced, contains 0 at
/// the center index (n/2).
struct Axis {
  std::vector<double> positions;
  double pitch = 0.0;

  double spacing() const { return pitch; }
};

Axis make_axis(int n, double pitch);

/// Sampled complex field on a uniform lattice (1D or 2D) with physical
/// pitch in meters. Extents must be even and >= 2; the site mapped to
/// x = 0 is n/2 on each axis. Values are stored row-major (y outer).
class FieldGrid {
public:
  FieldGrid() = default;
  FieldGrid(int nx, double pitch_x);                          // 1D
  FieldGrid(int nx, int ny, double pitch_x, double pitch_y);  // 2D

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return values.size(); }
  double pitch_x() const { return pitch_x_; }
  double pitch_y() const { return pitch_y_; }
  int center_x() const { return nx_ / 2; }
  int center_y() const { return ny_ / 2; }

  Complex& at(int ix, int iy = 0) { return values[std::size_t(iy) * nx_ + ix]; }
  const Complex& at(int ix, int iy = 0) const {
    return values[std::size_t(iy) * nx_ + ix];
  }

  Axis axis_x() const { return make_axis(nx_, pitch_x_); }
  Axis axis_y() const { return make_axis(ny_, pitch_y_); }

  /// Cell measure: pitch_x (1D) or pitch_x*pitch_y (2D).
  double cell() const { return dim_ == 1 ? pitch_x_ : pitch_x_ * pitch_y_; }

  /// Sum of |v|^2 over sites times the cell measure.
  double energy() const;

  bool same_layout(const FieldGrid& o) const {
    return dim_ == o.dim_ && nx_ == o.nx_ && ny_ == o.ny_ &&
           pitch_x_ == o.pitch_x_ && pitch_y_ == o.pitch_y_;
  }

  std::vector<Complex> values;

private:
  int dim_ = 1;
  int nx_ = 0, ny_ = 1;
  double pitch_x_ = 0.0, pitch_y_ = 1.0;
};

/// Real non-negative intensities on the same kind of lattice.
class IntensityGrid {
public:
  IntensityGrid() = default;
  IntensityGrid(int nx, double pitch_x);
  IntensityGrid(int nx, int ny, double pitch_x, double pitch_y);

  /// |field|^2 per site.
  static IntensityGrid from_field(const FieldGrid& f);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return values.size(); }
  double pitch_x() const { return pitch_x_; }
  double pitch_y() const { return pitch_y_; }
  int center_x() const { return nx_ / 2; }
  int center_y() const { return ny_ / 2; }
  double cell() const { return dim_ == 1 ? pitch_x_ : pitch_x_ * pitch_y_; }

  double& at(int ix, int iy = 0) { return values[std::size_t(iy) * nx_ + ix]; }
  double at(int ix, int iy = 0) const {
    return values[std::size_t(iy) * nx_ + ix];
  }

  Axis axis_x() const { return make_axis(nx_, pitch_x_); }
  Axis axis_y() const { return make_axis(ny_, pitch_y_); }

  bool same_layout(const IntensityGrid& o) const {
    return dim_ == o.dim_ && nx_ == o.nx_ && ny_ == o.ny_ &&
           pitch_x_ == o.pitch_x_ && pitch_y_ == o.pitch_y_;
  }

  /// Sum of values times the cell measure.
  double total() const;

  std::vector<double> values;

private:
  int dim_ = 1;
  int nx_ = 0, ny_ = 1;
  double pitch_x_ = 0.0, pitch_y_ = 1.0;
};

/// Unitary centered DFT: both input and output are indexed with the zero
/// site at n/2. Preserves sum |v|^2. The output carries angular-frequency
/// spacing 2*pi/(n*pitch) per axis; relabeling to a physical focal-plane
/// axis is done by focal_plane_axis / to_focal_plane.
FieldGrid dft_centered(const FieldGrid& field);

/// Inverse of dft_centered.
FieldGrid idft_centered(const FieldGrid& field);

/// Physical coordinates in the focal plane of an f-f lens system:
/// site k maps to x = lambda*F*q_k/(2*pi), spacing lambda*F/(n*pitch).
Axis focal_plane_axis(int n, double pitch, double wavelength, double focal);

}  // namespace ghostlab

#endif
