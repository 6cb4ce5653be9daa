#ifndef GHOSTLAB_OBJECTS_HPP
#define GHOSTLAB_OBJECTS_HPP

#include <functional>
#include <optional>
#include <string>

#include "ghostlab/grid.hpp"

namespace ghostlab {

/// Complex transmission function T(x) sampled on a field lattice,
/// |T| <= 1 everywhere.
struct TransmissionMask {
  FieldGrid values;  // same lattice as the field it multiplies

  /// Length (1D) or area (2D) of sites with |T| > 0.5.
  double transmissive_measure() const;
};

/// Identity mask (T = 1 everywhere).
TransmissionMask identity_mask(int nx, int ny, double pitch_x, double pitch_y);

/// Thin needle of width `needle_width` centered inside an aperture of
/// width `aperture_width`: T = 1 for needle/2 < |x| <= aperture/2 (and
/// |y| <= height/2 in 2D), 0 elsewhere. `height` <= 0 means full grid
/// extent; it is ignored in 1D.
TransmissionMask double_slit_mask(int nx, int ny, double pitch_x,
                                  double pitch_y, double aperture_width,
                                  double needle_width, double height = 0.0);

/// Parsed portable graymap (P2 or P5, maxval <= 65535).
struct Pgm {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> pixels;  // row-major, top row first
};

Pgm parse_pgm(const std::string& bytes);

/// Gray levels mapped to [0,1] amplitude transmission and nearest-neighbor
/// resampled onto the grid, centered, with square image pixels of side
/// physical_width / image_width.
TransmissionMask bitmap_mask(int nx, int ny, double pitch_x, double pitch_y,
                             const std::string& pgm_bytes,
                             double physical_width);

/// Pure phase object: T(x) = exp(i * phase(x, y)); |T| = 1 everywhere.
TransmissionMask phase_mask(int nx, int ny, double pitch_x, double pitch_y,
                            const std::function<double(double, double)>& phase);

/// Binary 0/pi phase grating of the given period along x.
TransmissionMask phase_grating_mask(int nx, int ny, double pitch_x,
                                    double pitch_y, double period);

}  // namespace ghostlab

#endif
