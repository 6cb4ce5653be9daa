#ifndef GHOSTLAB_OPTICS_HPP
#define GHOSTLAB_OPTICS_HPP

#include "ghostlab/objects.hpp"

namespace ghostlab {

/// Pointwise product of a field with a transmission mask on the same grid.
FieldGrid apply_mask(const FieldGrid& field, const TransmissionMask& mask);

/// f-f lens system: centered unitary DFT with the output axis relabeled to
/// focal-plane coordinates (spacing lambda*F/(n*pitch) per axis). Energy
/// preserving; the (i lambda F)^-1 kernel prefactor is absorbed by the
/// unitary convention.
FieldGrid to_focal_plane(const FieldGrid& field, double wavelength,
                         double focal);

/// Ideal imaging relay with magnification m and inversion:
/// out(x) = m * in(-m x), nearest-neighbor resampled for m != 1. Samples
/// that map outside the input grid are zero (the beam is expected to sit
/// well inside the lattice).
FieldGrid image_relay(const FieldGrid& field, double magnification);

}  // namespace ghostlab

#endif
