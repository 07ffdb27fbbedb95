"""Figures of merit for an off-resonant Raman phonon-sideband memory in an NV- ensemble.

SI units unless a name says otherwise. Frequencies are ordinary (cycles per
second); angular frequencies are formed explicitly where a formula needs them.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .constants import C_LIGHT, EPS0, H_PLANCK, HBAR, K_B

ZPL_WAVELENGTH = 638e-9  # m
DIAMOND_INDEX = 2.4

GAMMA_INHOMOGENEOUS = "inhomogeneous"
GAMMA_RADIATIVE = "radiative"
GAMMA_INTERPRETATIONS = (GAMMA_INHOMOGENEOUS, GAMMA_RADIATIVE)

# Cavity model C_eff = C * Q / Q_REF, chosen so eta = 0.9 at Q = 1000 for C = 0.2.
# A model choice, not a measured constant.
Q_REF = 1000.0 * 0.2 / 9.0


@dataclass(frozen=True)
class LambdaSystem:
    zpl_frequency: float = C_LIGHT / ZPL_WAVELENGTH  # Hz
    storage_splitting: float = 15.3e12  # Hz
    radiative_lifetime: float = 12e-9  # s
    zpl_branching: float = 0.04
    inhomogeneous_zpl_width: float = 750e9  # Hz
    storage_state_width: float = 2e12  # Hz

    def __post_init__(self):
        for name in ("zpl_frequency", "storage_splitting", "radiative_lifetime",
                     "inhomogeneous_zpl_width", "storage_state_width"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.zpl_branching <= 1.0:
            raise ValueError("zpl_branching must lie in [0, 1]")

    @property
    def radiative_rate(self) -> float:
        return 1.0 / self.radiative_lifetime

    def gamma_eff(self, interpretation: str = GAMMA_INHOMOGENEOUS) -> float:
        """Excited-state rate entering the optical depth (s^-1)."""
        if interpretation == GAMMA_INHOMOGENEOUS:
            return self.inhomogeneous_zpl_width
        if interpretation == GAMMA_RADIATIVE:
            return self.radiative_rate
        raise ValueError(f"unknown gamma interpretation {interpretation!r}; use one of {GAMMA_INTERPRETATIONS}")


@dataclass(frozen=True)
class MemoryDesign:
    detuning: float = C_LIGHT * 10e-9 / ZPL_WAVELENGTH**2  # Hz (10 nm from the ZPL)
    photon_bandwidth: float = 1e12  # Hz
    repetition_rate: float = 80e6  # Hz
    control_average_power: float | None = None  # W, optional operating point
    cavity_Q: float | None = None
    incidence: str = "brewster"
    spot_diameter: float = 1e-6  # m
    refractive_index: float = DIAMOND_INDEX

    def __post_init__(self):
        for name in ("detuning", "photon_bandwidth", "repetition_rate", "spot_diameter"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.incidence not in ("normal", "brewster"):
            raise ValueError("incidence must be 'normal' or 'brewster'")
        if self.cavity_Q is not None and not self.cavity_Q > 0:
            raise ValueError("cavity_Q must be positive")
        if self.control_average_power is not None and self.control_average_power < 0:
            raise ValueError("control_average_power must be non-negative")
        if self.refractive_index < 1:
            raise ValueError("refractive_index must be >= 1")

    @classmethod
    def from_detuning_nm(cls, delta_lambda_nm: float, center_nm: float = ZPL_WAVELENGTH * 1e9, **kw):
        return cls(detuning=C_LIGHT * delta_lambda_nm * 1e-9 / (center_nm * 1e-9) ** 2, **kw)

    @property
    def detuning_ratio(self) -> float:
        return self.detuning / self.photon_bandwidth

    @property
    def far_detuned(self) -> bool:
        return self.detuning_ratio > 5.0


def dipole_from_lifetime(system: LambdaSystem) -> float:
    """ZPL transition dipole (C m) from the radiative rate and ZPL branching ratio."""
    omega = 2.0 * math.pi * system.zpl_frequency
    return math.sqrt(3.0 * math.pi * EPS0 * HBAR * C_LIGHT**3 * system.radiative_rate
                     * system.zpl_branching / omega**3)


def branching_from_dipole(dipole: float, system: LambdaSystem) -> float:
    """Inverse of ``dipole_from_lifetime`` for the ZPL branching ratio."""
    omega = 2.0 * math.pi * system.zpl_frequency
    return dipole**2 * omega**3 / (3.0 * math.pi * EPS0 * HBAR * C_LIGHT**3 * system.radiative_rate)


def surface_density(density_cm3: float, thickness_m: float) -> float:
    """Absorbers per cm^2 in a layer of ``thickness_m``."""
    return density_cm3 * thickness_m * 100.0


def optical_depth(dipole: float, nu12: float, sigma_cm2: float, gamma_eff: float) -> float:
    """D = d^2 nu12 sigma / (2 hbar eps0 c gamma), sigma in cm^-2."""
    if dipole < 0 or nu12 <= 0 or sigma_cm2 < 0 or gamma_eff <= 0:
        raise ValueError("optical_depth needs non-negative dipole and density, positive frequency and rate")
    return dipole**2 * nu12 * (sigma_cm2 * 1e4) / (2.0 * HBAR * EPS0 * C_LIGHT * gamma_eff)


def cooperativity(optical_depth_value: float, cavity_Q: float | None = None, q_ref: float = Q_REF) -> float:
    """C ~ D, scaled by Q / Q_ref when a cavity is present."""
    if cavity_Q is None:
        return optical_depth_value
    return optical_depth_value * cavity_Q / q_ref


def memory_efficiency(c: float) -> float:
    if c < 0:
        raise ValueError("cooperativity must be non-negative")
    return c / (c + 1.0)


def thermal_occupation(omega13: float, temperature: float) -> tuple[float, float]:
    """Boltzmann population of the storage state, returned as (value, log10 value)."""
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    x = H_PLANCK * omega13 / (K_B * temperature)
    return math.exp(-x), -x / math.log(10.0)


def dephasing_figures(delta_nu13: float, bandwidth: float) -> tuple[float, float]:
    """(dephasing time 1/delta_nu13 in s, memory quality bandwidth/delta_nu13)."""
    if not delta_nu13 > 0:
        raise ValueError("storage-state width must be positive")
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    return 1.0 / delta_nu13, bandwidth / delta_nu13


def brewster_angle(refractive_index: float) -> float:
    """Brewster angle in degrees."""
    if refractive_index < 1:
        raise ValueError("refractive index must be >= 1")
    return math.degrees(math.atan(refractive_index))


def confocal_center_count(density_cm3: float, spot_diameter_um: float, depth_um: float) -> float:
    if density_cm3 < 0 or spot_diameter_um < 0 or depth_um < 0:
        raise ValueError("inputs must be non-negative")
    volume_cm3 = math.pi * (0.5 * spot_diameter_um) ** 2 * depth_um * 1e-12
    return density_cm3 * volume_cm3


@dataclass(frozen=True)
class ControlPowerEstimate:
    average_power: float  # W
    rabi_frequency: float  # rad/s, peak control Rabi frequency
    pulse_energy: float  # J
    assumptions: dict = field(default_factory=dict)


def control_power_estimate(system: LambdaSystem, design: MemoryDesign, c: float,
                           interpretation: str = GAMMA_INHOMOGENEOUS) -> ControlPowerEstimate:
    """Average control power for efficient Raman storage of one photon.

    The two-photon coupling Omega_c * Omega_q / (2 Delta) must reach the photon
    bandwidth within one pulse, reduced by sqrt(C) through collective
    enhancement. The probe scale is Omega_q = sqrt(gamma_eff * delta), which
    makes the condition equivalent to Omega_c^2 tau C gamma / Delta^2 ~ 4 for
    a transform-limited pulse tau = 1/delta.
    """
    if not design.far_detuned:
        raise ValueError(f"detuning/bandwidth = {design.detuning_ratio:.2f}; Raman regime needs > 5")
    if not c > 0:
        return ControlPowerEstimate(math.inf, math.inf, math.inf, {"cooperativity": c})
    delta_a = 2.0 * math.pi * design.detuning
    band_a = 2.0 * math.pi * design.photon_bandwidth
    gamma = system.gamma_eff(interpretation)
    omega_q = math.sqrt(gamma * band_a)
    rabi = 2.0 * delta_a * band_a / (omega_q * math.sqrt(c))
    # control drives the sideband transition, which carries (1 - f12) of the oscillator strength
    f12 = system.zpl_branching
    d_control = dipole_from_lifetime(system) * math.sqrt((1.0 - f12) / f12) if 0 < f12 < 1 else dipole_from_lifetime(system)
    e_field = HBAR * rabi / d_control
    n = design.refractive_index
    intensity = 0.5 * C_LIGHT * EPS0 * n * e_field**2
    area = math.pi * (0.5 * design.spot_diameter) ** 2
    tau = 1.0 / design.photon_bandwidth
    pulse_energy = intensity * area * tau
    assumptions = {
        "pulse_duration_s": tau,
        "spot_diameter_m": design.spot_diameter,
        "refractive_index": n,
        "repetition_rate_hz": design.repetition_rate,
        "control_dipole_cm": d_control,
        "probe_scale": "sqrt(gamma_eff * 2 pi delta)",
        "gamma_interpretation": interpretation,
        "cooperativity": c,
    }
    return ControlPowerEstimate(pulse_energy * design.repetition_rate, rabi, pulse_energy, assumptions)


PROVENANCE = {
    "surface_density": "sigma = n_NV- * L",
    "dipole": "d = sqrt(3 pi eps0 hbar c^3 gamma f12 / omega^3), omega = 2 pi nu12",
    "optical_depth": "D = d^2 nu12 sigma / (2 hbar eps0 c gamma_eff)",
    "cooperativity": "C = D (x Q / Q_ref with a cavity)",
    "efficiency": "eta = C / (C + 1)",
    "thermal_occupation": "exp(-h nu13 / (k_B T))",
    "dephasing_time": "tau = 1 / delta_nu13",
    "memory_quality": "Q_mem = delta / delta_nu13",
    "brewster_angle": "theta_B = arctan(n)",
    "confocal_center_count": "N = n_NV- * pi (w/2)^2 * L",
    "control_average_power": "Omega_c Omega_q / (2 Delta) = delta / sqrt(C), Omega_q = sqrt(gamma_eff delta)",
}


@dataclass(frozen=True)
class MemoryReport:
    surface_density: float  # cm^-2
    dipole: float  # C m
    optical_depth: float
    cooperativity: float
    efficiency: float
    thermal_occupation: float
    thermal_occupation_log10: float
    dephasing_time: float  # s
    memory_quality: float
    brewster_angle: float  # deg
    confocal_center_count: float
    gamma_interpretation: str
    gamma_eff: float  # s^-1
    detuning_ratio: float
    control_average_power: float | None  # W
    provenance: dict = field(default_factory=lambda: dict(PROVENANCE))

    def __post_init__(self):
        if not 0.0 <= self.efficiency < 1.0:
            raise ValueError("efficiency must lie in [0, 1)")
        if not 0.0 <= self.thermal_occupation <= 1.0:
            raise ValueError("thermal_occupation must lie in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    def table(self) -> str:
        rows = [
            ("surface density", f"{self.surface_density:.4g}", "cm^-2"),
            ("dipole", f"{self.dipole:.4g}", "C m"),
            ("optical depth", f"{self.optical_depth:.4g}", ""),
            ("cooperativity", f"{self.cooperativity:.4g}", ""),
            ("efficiency", f"{self.efficiency:.4g}", ""),
            ("thermal occupation", f"1e{self.thermal_occupation_log10:.2f}", ""),
            ("dephasing time", f"{self.dephasing_time:.4g}", "s"),
            ("memory quality", f"{self.memory_quality:.4g}", ""),
            ("Brewster angle", f"{self.brewster_angle:.4g}", "deg"),
            ("centers in spot", f"{self.confocal_center_count:.4g}", ""),
            ("control power", "n/a" if self.control_average_power is None else f"{self.control_average_power:.4g}", "W"),
            ("gamma_eff", f"{self.gamma_eff:.4g} ({self.gamma_interpretation})", "s^-1"),
        ]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {value} {unit}".rstrip() for name, value, unit in rows)


def memory_report(system: LambdaSystem, design: MemoryDesign, nv_minus_density: float,
                  layer_thickness: float = 3e-6, temperature: float = 4.0,
                  interpretation: str = GAMMA_INHOMOGENEOUS) -> MemoryReport:
    """Evaluate every figure of merit for an NV- layer of given density (cm^-3) and thickness (m)."""
    if nv_minus_density < 0:
        raise ValueError("density must be non-negative")
    sigma = surface_density(nv_minus_density, layer_thickness)
    d = dipole_from_lifetime(system)
    gamma = system.gamma_eff(interpretation)
    depth = optical_depth(d, system.zpl_frequency, sigma, gamma)
    c = cooperativity(depth, design.cavity_Q)
    occ, occ_log = thermal_occupation(system.storage_splitting, temperature)
    tau, q_mem = dephasing_figures(system.storage_state_width, design.photon_bandwidth)
    power = None
    if design.far_detuned and c > 0:
        power = control_power_estimate(system, design, c, interpretation).average_power
    return MemoryReport(
        surface_density=sigma,
        dipole=d,
        optical_depth=depth,
        cooperativity=c,
        efficiency=memory_efficiency(c),
        thermal_occupation=occ,
        thermal_occupation_log10=occ_log,
        dephasing_time=tau,
        memory_quality=q_mem,
        brewster_angle=brewster_angle(design.refractive_index),
        confocal_center_count=confocal_center_count(nv_minus_density, design.spot_diameter * 1e6,
                                                    layer_thickness * 1e6),
        gamma_interpretation=interpretation,
        gamma_eff=gamma,
        detuning_ratio=design.detuning_ratio,
        control_average_power=power,
    )
