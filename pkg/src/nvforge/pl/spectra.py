"""Line-shape synthesis, least-squares line fitting and Raman-line removal.

Each line is rendered as a profile normalized on the instrument grid, so
the trapezoidal integral of a rendered line equals its ``area``. Fitting
uses the same renderer, which makes synthesis and fitting exact inverses.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import least_squares

from ..constants import C_LIGHT, H_PLANCK, E_CHARGE
from .intensity import raman_line_wavelength

log = logging.getLogger(__name__)

SHAPES = ("lorentzian", "gaussian")
GRID_TOLERANCE = 1e-9  # nm
_FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

NV_MINUS_ZPL = 637.9  # nm
NV_ZERO_ZPL = 575.0
GR1_ZPL = 741.1
DIAMOND_RAMAN_SHIFT = 1332.0  # cm^-1


class FitError(RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class EmissionLine:
    center_wavelength: float  # nm
    fwhm: float  # nm
    area: float  # counts nm
    shape: str = "lorentzian"

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError("fwhm must be positive")
        if self.area < 0:
            raise ValueError("area must be non-negative")
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}")

    def to_dict(self) -> dict:
        return {"center_nm": self.center_wavelength, "fwhm_nm": self.fwhm,
                "area": self.area, "shape": self.shape}

    @classmethod
    def from_dict(cls, d: dict) -> EmissionLine:
        return cls(float(d["center_nm"]), float(d["fwhm_nm"]), float(d.get("area", 0.0)),
                   d.get("shape", "lorentzian"))


@dataclass(frozen=True, eq=False)
class Spectrum:
    wavelength_grid: np.ndarray  # nm
    counts: np.ndarray

    def __post_init__(self):
        x = np.array(self.wavelength_grid, dtype=float)
        y = np.array(self.counts, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ValueError("grid needs at least three points")
        if y.shape != x.shape:
            raise ValueError("counts and grid differ in length")
        d = np.diff(x)
        if np.any(d <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.max(np.abs(d - d.mean())) > GRID_TOLERANCE + 1e-12 * x[-1]:
            raise ValueError("grid must be uniform")
        if not np.all(np.isfinite(y)):
            raise ValueError("counts must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "wavelength_grid", x)
        object.__setattr__(self, "counts", y)

    @property
    def step(self) -> float:
        return float((self.wavelength_grid[-1] - self.wavelength_grid[0]) / (self.wavelength_grid.size - 1))

    def integral(self) -> float:
        return float(np.trapezoid(self.counts, self.wavelength_grid))

    def with_counts(self, counts) -> Spectrum:
        return Spectrum(self.wavelength_grid, counts)


@dataclass(frozen=True)
class PhononSideband:
    """Gaussian replica of each ZPL, red-shifted by one phonon energy."""

    phonon_energy_mev: float = 63.3  # 15.3 THz
    fwhm: float = 20.0  # nm
    zpl_fraction: float = 0.04

    def __post_init__(self):
        if not (self.phonon_energy_mev > 0 and self.fwhm > 0):
            raise ValueError("sideband energy and width must be positive")
        if not 0 < self.zpl_fraction <= 1:
            raise ValueError("zpl_fraction must lie in (0, 1]")

    @property
    def weight(self) -> float:
        return (1.0 - self.zpl_fraction) / self.zpl_fraction

    def center(self, zpl_nm: float) -> float:
        shift_per_m = self.phonon_energy_mev * 1e-3 * E_CHARGE / (H_PLANCK * C_LIGHT)
        return 1.0 / (1.0 / (zpl_nm * 1e-9) - shift_per_m) * 1e9


def uniform_grid(start: float, stop: float, step: float) -> np.ndarray:
    n = int(round((stop - start) / step)) + 1
    return start + step * np.arange(n)


def _unit_profile(x, center, fwhm, shape):
    if shape == "lorentzian":
        hw = 0.5 * fwhm
        return hw / np.pi / ((x - center) ** 2 + hw * hw)
    s = fwhm * _FWHM_TO_SIGMA
    return np.exp(-0.5 * ((x - center) / s) ** 2) / (s * math.sqrt(2.0 * math.pi))


def render_line(x, center, fwhm, area, shape="lorentzian"):
    """Line profile on grid ``x`` whose trapezoidal integral equals ``area``."""
    p = _unit_profile(x, center, fwhm, shape)
    norm = np.trapezoid(p, x)
    if norm < 1e-6:  # line essentially off the grid; keep the analytic scale
        norm = 1.0
    return area * p / norm


def _check_coverage(x, line: EmissionLine):
    lo = line.center_wavelength - 5.0 * line.fwhm
    hi = line.center_wavelength + 5.0 * line.fwhm
    if lo < x[0] - GRID_TOLERANCE or hi > x[-1] + GRID_TOLERANCE:
        raise ValueError(
            f"grid [{x[0]}, {x[-1]}] nm too narrow for line at {line.center_wavelength} nm "
            f"(needs +-5 FWHM)"
        )


def synthesize_spectrum(lines, grid, psb: PhononSideband | None = None) -> Spectrum:
    x = np.asarray(grid, dtype=float)
    y = np.zeros_like(x)
    for line in lines:
        _check_coverage(x, line)
        y += render_line(x, line.center_wavelength, line.fwhm, line.area, line.shape)
        if psb is not None:
            y += psb.weight * line.area * _unit_profile(x, psb.center(line.center_wavelength), psb.fwhm, "gaussian")
    return Spectrum(x, np.maximum(y, 0.0))


@dataclass(frozen=True)
class FitResult:
    lines: tuple
    residual_norm: float
    nfev: int


def _model(x, params, shapes):
    y = np.zeros_like(x)
    for i, shape in enumerate(shapes):
        c, w, a = params[3 * i: 3 * i + 3]
        y += render_line(x, c, w, a, shape)
    return y


def fit_lines(spectrum: Spectrum, initial, max_nfev: int = 2000) -> FitResult:
    """Refine centers, widths and areas of ``initial`` lines by least squares."""
    x = spectrum.wavelength_grid
    y = spectrum.counts
    initial = list(initial)
    if not initial:
        raise ValueError("at least one initial line is required")
    for line in initial:
        if not x[0] <= line.center_wavelength <= x[-1]:
            raise ValueError(f"initial center {line.center_wavelength} nm outside the grid")
    shapes = [line.shape for line in initial]
    step = spectrum.step
    span = x[-1] - x[0]
    p0, lo, hi = [], [], []
    scale = max(float(np.max(np.abs(y))) * span, 1.0)
    for line in initial:
        w0 = min(max(line.fwhm, 2.0 * step), span)
        a0 = line.area if line.area > 0 else max(float(np.trapezoid(np.clip(y, 0, None), x)) / len(initial), 0.0)
        p0 += [line.center_wavelength, w0, min(a0, 10 * scale)]
        lo += [x[0], 0.5 * step, 0.0]
        hi += [x[-1], span, np.inf]
    p0 = np.clip(p0, lo, np.where(np.isinf(hi), np.asarray(p0) + 1, hi))

    if not np.any(y):
        lines = tuple(replace(line, fwhm=float(w), area=0.0) for line, w in zip(initial, p0[1::3]))
        return FitResult(lines, 0.0, 0)

    res = least_squares(lambda p: _model(x, p, shapes) - y, p0, bounds=(lo, hi),
                        x_scale="jac", xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=max_nfev)
    lines = tuple(
        EmissionLine(float(res.x[3 * i]), float(res.x[3 * i + 1]), float(res.x[3 * i + 2]), shapes[i])
        for i in range(len(shapes))
    )
    result = FitResult(lines, float(np.linalg.norm(res.fun)), int(res.nfev))
    if res.status <= 0:
        raise FitError(f"line fit did not converge: {res.message}", best=result)
    return result


def subtract_raman(spectrum: Spectrum, lambda_exc: float, raman_fwhm: float,
                   shift: float = DIAMOND_RAMAN_SHIFT, other_lines=(), shape: str = "lorentzian") -> Spectrum:
    """Remove the first-order diamond Raman line excited at ``lambda_exc`` (nm).

    The Raman line has a fixed position and width; only its area is fitted.
    ``other_lines`` are initial guesses for emission overlapping the Raman
    line; they are fitted jointly and left in the spectrum.
    """
    x = spectrum.wavelength_grid
    center = raman_line_wavelength(lambda_exc, shift)
    if not x[0] <= center <= x[-1]:
        log.warning("Raman line at %.2f nm lies outside the grid; spectrum left unchanged", center)
        return spectrum
    unit = render_line(x, center, raman_fwhm, 1.0, shape)
    y = spectrum.counts
    others = list(other_lines)
    if not others:
        window = np.abs(x - center) <= 3.0 * raman_fwhm
        u = unit[window]
        area = max(float(np.dot(u, y[window]) / np.dot(u, u)), 0.0)
    else:
        shapes = [line.shape for line in others]
        span = x[-1] - x[0]
        p0 = [y.max() * raman_fwhm]
        lo, hi = [0.0], [np.inf]
        for line in others:
            p0 += [line.center_wavelength, line.fwhm, line.area or y.max() * line.fwhm]
            lo += [x[0], 0.5 * spectrum.step, 0.0]
            hi += [x[-1], span, np.inf]

        def resid(p):
            return p[0] * unit + _model(x, p[1:], shapes) - y

        res = least_squares(resid, p0, bounds=(lo, hi), x_scale="jac", xtol=1e-12, ftol=1e-12)
        area = float(res.x[0])
    return spectrum.with_counts(np.maximum(y - area * unit, 0.0))
