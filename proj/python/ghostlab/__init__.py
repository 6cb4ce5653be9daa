"""Pseudo-thermal ghost imaging/diffraction simulator."""

from ._core import (
    __version__,
    dft_centered,
    double_slit_mask,
    draw_thermal_field,
    envelope_std_for_coherence_length,
    fit_gaussian_peak,
    fraunhofer_pattern,
    fringe_period,
    hash_seed,
    idft_centered,
    run_scenario,
    validate_config,
)

__all__ = [
    "__version__",
    "dft_centered",
    "double_slit_mask",
    "draw_thermal_field",
    "envelope_std_for_coherence_length",
    "fit_gaussian_peak",
    "fraunhofer_pattern",
    "fringe_period",
    "hash_seed",
    "idft_centered",
    "run_scenario",
    "validate_config",
]
