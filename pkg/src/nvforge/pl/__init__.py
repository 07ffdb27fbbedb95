"""Photoluminescence observables: fluence trends, line shapes and fitting."""

from .intensity import (
    CAP_THICKNESS,
    AbsorptionModel,
    BroadeningModel,
    ZplIntensities,
    depth_states,
    fwhm_to_frequency,
    linewidth_at_fluence,
    predict_zpl_intensities,
    raman_line_wavelength,
    round_trip_transmission,
)
from .spectra import (
    GR1_ZPL,
    NV_MINUS_ZPL,
    NV_ZERO_ZPL,
    EmissionLine,
    FitError,
    FitResult,
    PhononSideband,
    Spectrum,
    fit_lines,
    render_line,
    subtract_raman,
    synthesize_spectrum,
    uniform_grid,
)
