"""Annealing, NV charge-state equilibrium and photoionization.

Densities are in cm^-3 throughout. All functions are pure and return new
``MaterialState`` records.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.optimize import brentq

# Recorded for reference only; no band-structure calculation is done.
NITROGEN_DONOR_LEVEL_EV = 1.7
NV_MINUS_LEVEL_EV = 2.58
NATIVE_NITROGEN_CM3 = 2e19  # ~100 ppm in type Ib diamond


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MaterialState:
    nitrogen_density: float
    vacancy_density: float
    nv_minus: float = 0.0
    nv_zero: float = 0.0
    gr1_density: float = 0.0
    donors_remaining: float = 0.0
    graphitized: bool = False

    def __post_init__(self):
        for name in ("nitrogen_density", "vacancy_density", "nv_minus", "nv_zero",
                     "gr1_density", "donors_remaining"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.donors_remaining > self.nitrogen_density * (1 + 1e-12):
            raise ValueError("donors_remaining exceeds nitrogen_density")

    @property
    def nv_total(self) -> float:
        return self.nv_minus + self.nv_zero

    @property
    def donors_available(self) -> float:
        """Neutral nitrogen donors left after charging the NV- population."""
        return self.donors_remaining - self.nv_minus

    @property
    def charge_ratio(self) -> float:
        """NV-/NV0; infinite when every NV is negative, nan with no NV at all."""
        if self.nv_zero > 0:
            return self.nv_minus / self.nv_zero
        return np.inf if self.nv_minus > 0 else np.nan

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AnnealModel:
    temperature: float = 600.0  # degC
    nv_conversion_efficiency: float = 0.0025
    vacancy_loss_fraction: float = 0.0025

    def __post_init__(self):
        for name in ("nv_conversion_efficiency", "vacancy_loss_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


ANNEAL_600C = AnnealModel(600.0, 0.0025, 0.0025)
# higher-temperature scenario: only the conversion efficiency is known
ANNEAL_800C = AnnealModel(800.0, 0.05, 0.0025)


@dataclass(frozen=True)
class ChargeEquilibrium:
    """Mass-action constant for NV0 + N <-> NV- + N+ (cm^3)."""

    k_eq: float = 5e-19

    def __post_init__(self):
        if not self.k_eq > 0:
            raise ValueError("k_eq must be positive")

    @classmethod
    def calibrated(cls, ratio: float = 10.0, donor_density: float = NATIVE_NITROGEN_CM3):
        return cls(ratio / donor_density)


@dataclass(frozen=True)
class PhotoionizationModel:
    beta: float = 0.01  # mW^-2
    t1_nv_minus: float = 12.0  # ns
    t1_nv_zero: float = 20.0  # ns
    # relative excitation efficiency of the NV0 channel
    nv_zero_excitation: float = 1.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if not (self.t1_nv_minus > 0 and self.t1_nv_zero > 0):
            raise ValueError("lifetimes must be positive")
        if not self.nv_zero_excitation > 0:
            raise ValueError("nv_zero_excitation must be positive")

    @classmethod
    def calibrated(cls, fraction: float = 0.20, power: float = 5.0, **kw):
        """Choose beta so that ``photoionization_fraction(power) == fraction``."""
        return cls(beta=fraction / ((1.0 - fraction) * power**2), **kw)


def anneal(vacancy_density: float, nitrogen_density: float, model: AnnealModel = ANNEAL_600C,
           graphitization_threshold: float | None = None) -> MaterialState:
    """Convert a fraction of N-V pairs to NV; the unconverted vacancies become GR1.

    The NV population is returned entirely as ``nv_zero``; ``charge_partition``
    distributes it between charge states.
    """
    if vacancy_density < 0 or nitrogen_density < 0:
        raise ValueError("densities must be non-negative")
    nv = model.nv_conversion_efficiency * min(vacancy_density, nitrogen_density)
    gr1 = (vacancy_density - nv) * (1.0 - model.vacancy_loss_fraction)
    graphitized = graphitization_threshold is not None and vacancy_density > graphitization_threshold
    return MaterialState(
        nitrogen_density=nitrogen_density,
        vacancy_density=vacancy_density,
        nv_minus=0.0,
        nv_zero=nv,
        gr1_density=gr1,
        donors_remaining=max(nitrogen_density - nv, 0.0),
        graphitized=graphitized,
    )


def solve_donors(nv_total: float, donors: float, k_eq: float) -> float:
    """Donors left neutral, d, solving d = donors - nv_total * K d / (1 + K d)."""
    if donors <= 0 or nv_total <= 0:
        return max(donors, 0.0)

    def residual(d):
        kd = k_eq * d
        return d - donors + nv_total * kd / (1.0 + kd)

    try:
        d, info = brentq(residual, 0.0, donors, xtol=1e-300, rtol=1e-13, maxiter=500, full_output=True)
    except (ValueError, RuntimeError) as exc:  # pragma: no cover - physical inputs always bracket
        raise ConvergenceError(f"donor balance did not converge: {exc}") from exc
    if not info.converged:  # pragma: no cover
        raise ConvergenceError("donor balance did not converge")
    return d


def charge_partition(state: MaterialState, eq: ChargeEquilibrium = ChargeEquilibrium()) -> MaterialState:
    """Split the NV population so NV-/NV0 = K_eq * (neutral donors left)."""
    nv = state.nv_total
    d = solve_donors(nv, state.donors_remaining, eq.k_eq)
    kd = eq.k_eq * d
    nv_minus = nv * kd / (1.0 + kd)
    # keep donors_available + nv_minus == donors_remaining on the stored numbers
    nv_minus = min(nv_minus, state.donors_remaining)
    return replace(state, nv_minus=nv_minus, nv_zero=nv - nv_minus)


def photoionization_fraction(power, model: PhotoionizationModel = PhotoionizationModel()):
    """Steady-state fraction of NV held neutral under excitation power ``power`` (mW)."""
    p = np.asarray(power, dtype=float)
    if np.any(p < 0):
        raise ValueError("power must be non-negative")
    x = model.beta * p * p
    f = x / (1.0 + x)
    return float(f) if f.ndim == 0 else f


def illuminated_populations(state: MaterialState, power, model: PhotoionizationModel = PhotoionizationModel()):
    """(NV-, NV0) densities under illumination: a fraction f of the dark NV- is ionized."""
    f = photoionization_fraction(power, model)
    n_minus = state.nv_minus * (1.0 - np.asarray(f))
    n_zero = state.nv_total - n_minus
    return n_minus, n_zero


def steady_state_pl(state: MaterialState, powers, model: PhotoionizationModel = PhotoionizationModel()):
    """Power-normalized PL (arbitrary units per mW) of NV- and NV0 over a power sweep.

    PL per unit power is population over radiative lifetime, with the NV0
    channel scaled by the relative excitation efficiency.
    """
    n_minus, n_zero = illuminated_populations(state, np.asarray(powers, dtype=float), model)
    return n_minus / model.t1_nv_minus, model.nv_zero_excitation * n_zero / model.t1_nv_zero


def check_nv_conservation(pl_minus, pl_zero, model: PhotoionizationModel = PhotoionizationModel()) -> float:
    """Relative standard deviation of the inferred NV count across a power sweep."""
    pm = np.asarray(pl_minus, dtype=float)
    pz = np.asarray(pl_zero, dtype=float)
    if pm.size == 0 or pz.size == 0:
        raise ValueError("empty PL series")
    if pm.shape != pz.shape:
        raise ValueError("PL series differ in length")
    if np.any(pm < 0) or np.any(pz < 0):
        raise ValueError("PL intensities must be non-negative")
    counts = pm * model.t1_nv_minus + pz * model.t1_nv_zero / model.nv_zero_excitation
    mean = counts.mean()
    if mean == 0:
        return 0.0
    return float(counts.std() / mean)
