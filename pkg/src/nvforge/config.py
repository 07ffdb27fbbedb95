"""Run configuration: strict JSON schema mapped onto nested dataclasses.

Unknown keys anywhere in the document are rejected, and the ``version``
field must equal the schema version this toolkit reads.
"""

from __future__ import annotations

import json
import types
import typing
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import SCHEMA_VERSION
from .constants import C_LIGHT
from .defects import AnnealModel, ChargeEquilibrium, PhotoionizationModel
from .pl.intensity import AbsorptionModel, BroadeningModel
from .qmem import LambdaSystem, MemoryDesign
from .transport.materials import DIAMOND, IONS, PhysicsError, TransportConfig

DEFAULT_FLUENCES = (
    1e13, 3e13, 1e14, 2e14, 5e14, 1e15, 2e15, 5e15, 1e16, 2e16, 5e16, 1e17, 1.5e17, 2e17,
)
FLUENCE_PRESETS = {"paper-fig4": DEFAULT_FLUENCES}


class ConfigError(ValueError):
    pass


@dataclass
class TransportSection:
    ion: str = "He"
    energy_mev: float = 2.0
    ion_count: int = 10_000
    depth_bin_width_nm: float = 50.0
    energy_cutoff_ev: float = 50.0
    displacement_energy_ev: float = 50.0
    follow_recoils: bool = False
    damage_energy_partition: bool = True

    def beam(self):
        if self.ion not in IONS:
            raise PhysicsError(f"unsupported ion {self.ion!r}; choose one of {sorted(IONS)}")
        return IONS[self.ion].with_energy(self.energy_mev * 1e6)

    def target(self):
        return DIAMOND.with_displacement_energy(self.displacement_energy_ev)

    def transport_config(self, seed: int) -> TransportConfig:
        return TransportConfig(
            ion_count=self.ion_count,
            rng_seed=seed,
            depth_bin_width=self.depth_bin_width_nm * 1e-9,
            energy_cutoff=self.energy_cutoff_ev,
            follow_recoils=self.follow_recoils,
            damage_energy_partition=self.damage_energy_partition,
        )


@dataclass
class DefectSection:
    nitrogen_density: float = 2e19
    vacancy_density: float = 3e19
    anneal_temperature: float = 600.0
    nv_conversion_efficiency: float = 0.0025
    vacancy_loss_fraction: float = 0.0025
    k_eq: float = 5e-19
    beta: float = 0.01
    t1_nv_minus_ns: float = 12.0
    t1_nv_zero_ns: float = 20.0
    nv_zero_excitation: float = 1.0

    def anneal_model(self) -> AnnealModel:
        return AnnealModel(self.anneal_temperature, self.nv_conversion_efficiency, self.vacancy_loss_fraction)

    def equilibrium(self) -> ChargeEquilibrium:
        return ChargeEquilibrium(self.k_eq)

    def photoionization(self) -> PhotoionizationModel:
        return PhotoionizationModel(self.beta, self.t1_nv_minus_ns, self.t1_nv_zero_ns, self.nv_zero_excitation)


@dataclass
class PLSection:
    alpha_per_vacancy: float = 3e-17
    graphitization_threshold: float = 1e22
    cap_thickness_um: float = 3.0
    broadening_anchors: list = field(default_factory=lambda: [[1e13, 0.66], [2e17, 2.7]])

    def absorption(self) -> AbsorptionModel:
        return AbsorptionModel(self.alpha_per_vacancy, self.graphitization_threshold)

    def broadening(self) -> BroadeningModel:
        return BroadeningModel(tuple(tuple(a) for a in self.broadening_anchors))


@dataclass
class QmemSection:
    zpl_wavelength_nm: float = 638.0
    storage_splitting_hz: float = 15.3e12
    radiative_lifetime_s: float = 12e-9
    zpl_branching: float = 0.04
    inhomogeneous_zpl_width_hz: float = 750e9
    storage_state_width_hz: float = 2e12
    detuning_nm: float = 10.0
    photon_bandwidth_hz: float = 1e12
    repetition_rate_hz: float = 80e6
    cavity_q: float | None = None
    incidence: str = "brewster"
    spot_diameter_um: float = 1.0
    refractive_index: float = 2.4
    # 5 % conversion at F = 1e15 cm^-2
    nv_minus_density: float = 2e18
    layer_thickness_um: float = 3.0
    temperature_k: float = 4.0
    gamma_interpretation: str = "inhomogeneous"

    def system(self) -> LambdaSystem:
        return LambdaSystem(
            zpl_frequency=C_LIGHT / (self.zpl_wavelength_nm * 1e-9),
            storage_splitting=self.storage_splitting_hz,
            radiative_lifetime=self.radiative_lifetime_s,
            zpl_branching=self.zpl_branching,
            inhomogeneous_zpl_width=self.inhomogeneous_zpl_width_hz,
            storage_state_width=self.storage_state_width_hz,
        )

    def design(self) -> MemoryDesign:
        return MemoryDesign.from_detuning_nm(
            self.detuning_nm, self.zpl_wavelength_nm,
            photon_bandwidth=self.photon_bandwidth_hz,
            repetition_rate=self.repetition_rate_hz,
            cavity_Q=self.cavity_q,
            incidence=self.incidence,
            spot_diameter=self.spot_diameter_um * 1e-6,
            refractive_index=self.refractive_index,
        )


@dataclass
class SweepSection:
    axis: str = "fluence"
    values: list | None = None
    preset: str | None = "paper-fig4"
    range: list | None = None  # [start, stop, n] log-spaced
    outputs: list = field(default_factory=list)
    fluence: float = 5e14  # fixed fluence for power sweeps


@dataclass
class RunConfig:
    version: str = SCHEMA_VERSION
    rng_seed: int = 42
    output_dir: str = "."
    transport: TransportSection = field(default_factory=TransportSection)
    defects: DefectSection = field(default_factory=DefectSection)
    pl: PLSection = field(default_factory=PLSection)
    qmem: QmemSection = field(default_factory=QmemSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    def to_dict(self) -> dict:
        return asdict(self)


def _coerce(value, tp, where):
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], where)
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    if tp is list or origin is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list")
        return value
    return value


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    hints = typing.get_type_hints(cls)
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        tp = hints[name]
        path = f"{where}.{name}" if where else name
        if isinstance(tp, type) and hasattr(tp, "__dataclass_fields__"):
            kwargs[name] = _build(tp, value, path)
        else:
            kwargs[name] = _coerce(value, tp, path)
    return cls(**kwargs)


def config_from_dict(data: dict) -> RunConfig:
    version = data.get("version", SCHEMA_VERSION) if isinstance(data, dict) else None
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config version {version!r} not supported (expected {SCHEMA_VERSION!r})")
    return _build(RunConfig, data, "")


def load_config(path) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    return config_from_dict(data)


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    outputs: tuple = ()

    def __post_init__(self):
        if self.axis not in ("fluence", "power"):
            raise ConfigError("sweep axis must be 'fluence' or 'power'")
        v = np.asarray(self.values, dtype=float)
        if v.size < 2:
            raise ConfigError("a sweep needs at least two points")
        if np.any(np.diff(v) <= 0):
            raise ConfigError("sweep values must be strictly increasing")
        if np.any(v < 0):
            raise ConfigError("sweep values must be non-negative")
        object.__setattr__(self, "values", tuple(float(x) for x in v))
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @classmethod
    def from_section(cls, s: SweepSection) -> SweepSpec:
        given = [s.values is not None, s.range is not None]
        if sum(given) > 1:
            raise ConfigError("give either sweep values or a sweep range, not both")
        if s.values is not None:
            values = s.values
        elif s.range is not None:
            if len(s.range) != 3:
                raise ConfigError("sweep range must be [start, stop, n]")
            start, stop, n = s.range
            if not (start > 0 and stop > 0 and int(n) == n):
                raise ConfigError("sweep range needs positive bounds and an integer count")
            values = np.geomspace(start, stop, int(n))
        elif s.preset is not None:
            if s.preset not in FLUENCE_PRESETS:
                raise ConfigError(f"unknown sweep preset {s.preset!r}")
            values = FLUENCE_PRESETS[s.preset]
        else:
            raise ConfigError("sweep needs values, a range or a preset")
        return cls(s.axis, tuple(values), tuple(s.outputs))

