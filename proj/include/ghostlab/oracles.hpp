#ifndef GHOSTLAB_ORACLES_HPP
#define GHOSTLAB_ORACLES_HPP

#include "ghostlab/correlator.hpp"
#include "ghostlab/objects.hpp"
#include "ghostlab/source.hpp"

namespace ghostlab {

/// Deterministic reference curve, unit peak, values >= 0.
struct OracleProfile {
  Axis axis;
  std::vector<double> values;
};

/// Coherent far-field intensity |T~(2 pi x / lambda F)|^2 of a 1D mask,
/// computed on a zero-padded lattice (pad >= 8) and normalized to unit
/// peak.
OracleProfile fraunhofer_pattern(const TransmissionMask& mask,
                                 double wavelength, double focal, int pad = 8);

/// Van Cittert-Zernike coherence length lambda * z / aperture (unit
/// proportionality coefficient).
double vcz_coherence_length(double wavelength, double distance,
                            double aperture);

/// Ghost-diffraction prediction: the squared modulus of the coherent
/// diffraction amplitude convolved with the far-field field correlation,
/// evaluated at (x1 - x2) and normalized to unit peak. gamma_f is a radial
/// profile of the (possibly sign-changing) field correlation sampled from
/// zero separation outward; it is mirrored (1D) or revolved (2D).
OracleProfile predicted_ghost_diffraction(const TransmissionMask& mask,
                                          const Profile& gamma_f,
                                          double wavelength, double focal,
                                          double x1, int pad = 8);

/// 2D variant returning the full map over the far-field detector lattice.
IntensityGrid predicted_ghost_diffraction_map(const TransmissionMask& mask,
                                              const Profile& gamma_f,
                                              double wavelength, double focal,
                                              double x1_x, double x1_y,
                                              int pad = 4);

/// Bucket ghost-image prediction: |T|^2 convolved with |Gamma_n|^2,
/// sampled at -m * x2 on the image-plane lattice (same lattice as the
/// near field) and normalized to unit peak. gamma_n is a radial profile
/// of the near-field field correlation.
OracleProfile predicted_ghost_image_bucket(const TransmissionMask& mask,
                                           const Profile& gamma_n, double m);

/// 2D variant over the image-plane lattice.
IntensityGrid predicted_ghost_image_bucket_map(const TransmissionMask& mask,
                                               const Profile& gamma_n,
                                               double m);

struct VisibilityEstimate {
  double ratio = 0.0;  // coherence area / object area
  /// The ratio predicts visibility only as a proportionality, and only
  /// while it is small; set when ratio > 0.5.
  bool outside_proportional_regime = false;
};

VisibilityEstimate visibility_ratio_estimate(double coherence_area,
                                             double object_area);

/// Far-plane field correlation of a uniformly lit hard aperture of the
/// given diameter: the transform of the aperture indicator, sampled
/// radially on the (pad x finer) focal-plane axis and normalized to 1 at
/// zero separation. Sign-changing (sinc-like); exact for this source
/// model, where the pre-diaphragm mean intensity is flat.
Profile aperture_far_correlation(int nx, int ny, double pitch_x,
                                 double pitch_y, double diameter,
                                 double wavelength, double focal, int pad = 8);

/// Near-field field correlation implied by the source envelope: the
/// normalized transform of the squared envelope, sampled radially on the
/// near lattice refined pad x.
Profile source_near_correlation(const SourceConfig& cfg, int pad = 8);

/// Period of an oscillatory profile: a spectral argmax locates the
/// fundamental, then positions of the local maxima (parabolically refined)
/// are averaged for the final spacing. Throws if fewer than two fringe
/// maxima stand out.
double fringe_period(const Profile& profile);

}  // namespace ghostlab

#endif
