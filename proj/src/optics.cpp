#include "ghostlab/optics.hpp"

#include <cmath>

namespace ghostlab {

FieldGrid apply_mask(const FieldGrid& field, const TransmissionMask& mask) {
  if (!field.same_layout(mask.values))
    throw std::invalid_argument("mask and field grids do not match");
  FieldGrid out = field;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] *= mask.values.values[i];
  return out;
}

FieldGrid to_focal_plane(const FieldGrid& field, double wavelength,
                         double focal) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  if (!(focal > 0.0)) throw std::invalid_argument("focal length must be > 0");
  FieldGrid spectrum = dft_centered(field);
  const double fx = wavelength * focal / (field.nx() * field.pitch_x());
  if (field.dim() == 1) {
    FieldGrid out(field.nx(), fx);
    out.values = std::move(spectrum.values);
    return out;
  }
  const double fy = wavelength * focal / (field.ny() * field.pitch_y());
  FieldGrid out(field.nx(), field.ny(), fx, fy);
  out.values = std::move(spectrum.values);
  return out;
}

FieldGrid image_relay(const FieldGrid& field, double magnification) {
  if (!(magnification > 0.0))
    throw std::invalid_argument("magnification must be positive");
  const double m = magnification;
  const bool pure_inversion = m == 1.0;
  FieldGrid out = field;
  const int cx = field.center_x(), cy = field.center_y();
  // For m = 1 the reflection wraps the single edge site periodically so
  // that applying the relay twice is an exact identity.
  auto source_index = [pure_inversion, m](int i, int c, int n) -> long {
    long j = std::lround(-m * double(i - c)) + c;
    if (pure_inversion) j = ((j % n) + n) % n;
    return j;
  };
  for (int iy = 0; iy < out.ny(); ++iy) {
    const long jy =
        field.dim() == 2 ? source_index(iy, cy, field.ny()) : 0;
    const bool y_ok = field.dim() == 1 || (jy >= 0 && jy < field.ny());
    for (int ix = 0; ix < out.nx(); ++ix) {
      const long jx = source_index(ix, cx, field.nx());
      if (y_ok && jx >= 0 && jx < field.nx())
        out.at(ix, iy) = m * field.at(int(jx), int(jy));
      else
        out.at(ix, iy) = Complex(0.0, 0.0);
    }
  }
  return out;
}

}  // namespace ghostlab
