"""Depth-resolved damage from binary-collision transport, and profile reductions."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .materials import IonBeamSpec, PhysicsError, TargetMaterial, TransportConfig
from .stopping import STOPPING_TABLES, electronic_stopping, lindhard_scharff

log = logging.getLogger(__name__)

FLIGHT_ENERGY_FRACTION = 0.02  # max fractional electronic loss per free flight
MAX_STACK = 20_000  # pending recoils per ion in cascade mode


@dataclass(frozen=True, eq=False)
class DamageProfile:
    bin_width: float  # m
    vacancies_per_ion_per_bin: np.ndarray
    ion_stop_per_bin: np.ndarray
    range_mean: float  # m
    range_straggle: float  # m
    ions_simulated: int
    ions_backscattered: int = 0
    # per-ion (initial, electronic, nuclear, residual) energies in eV
    energy_ledger: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("vacancies_per_ion_per_bin", "ion_stop_per_bin"):
            arr = np.array(getattr(self, name), dtype=float)
            if np.any(arr < 0):
                raise ValueError(f"{name} has negative entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.vacancies_per_ion_per_bin.shape != self.ion_stop_per_bin.shape:
            raise ValueError("histograms must have the same length")
        if self.energy_ledger is not None:
            led = np.array(self.energy_ledger, dtype=float)
            led.setflags(write=False)
            object.__setattr__(self, "energy_ledger", led)

    @property
    def n_bins(self) -> int:
        return self.vacancies_per_ion_per_bin.size

    @property
    def bin_edges(self) -> np.ndarray:
        return np.arange(self.n_bins + 1) * self.bin_width

    @property
    def depth_centers(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) * self.bin_width

    def vacancy_density_per_ion(self) -> np.ndarray:
        """Vacancies per ion per cm of depth, i.e. vacancy density (cm^-3) per unit fluence."""
        return self.vacancies_per_ion_per_bin / (self.bin_width * 100.0)

    def energy_balance_error(self) -> np.ndarray:
        """Per-ion relative mismatch |E0 - (electronic + nuclear + residual)| / E0."""
        if self.energy_ledger is None:
            raise ValueError("profile carries no energy ledger")
        e0, el, nuc, res = self.energy_ledger.T
        return np.abs(e0 - (el + nuc + res)) / e0


def nrt_vacancies(transferred_energy, e_d):
    """Modified Kinchin-Pease (NRT) displacements for a recoil of energy T."""
    t = np.asarray(transferred_energy, dtype=float)
    if e_d <= 0:
        raise ValueError("displacement energy must be positive")
    n = np.where(t < e_d, 0.0, np.where(t < 2.0 * e_d / 0.8, 1.0, 0.8 * t / (2.0 * e_d)))
    return float(n) if n.ndim == 0 else n


def _stopping_table(beam_z, beam_m, target, e_max):
    """Uniform log grid of electronic stopping (eV/nm) for the kernel, or LS constant."""
    if (beam_z, target.atomic_Z) not in STOPPING_TABLES:
        k = lindhard_scharff(1.0, beam_z, beam_m, target) * 1e-15 * target.atomic_density * 1e-7
        return 0.0, 1.0, np.zeros(0), float(k)
    n = max(int(np.ceil(np.log10(e_max) * 80)), 2)
    ln_e = np.linspace(0.0, np.log(e_max), n)
    s = electronic_stopping(np.exp(ln_e), target, beam_z, beam_m) * 1e-9
    return 0.0, 1.0 / (ln_e[1] - ln_e[0]), np.log(s), 0.0


def _depth_bound_nm(table, e0, e_cut):
    ln_e0, inv_dln, ln_s, k = table
    if e_cut >= e0:  # the ion is stopped on entry
        return 0.0
    e = np.geomspace(max(e_cut, 1.0) * 0.5, e0, 2000)
    if ln_s.size:
        s = np.exp(np.interp(np.log(e), ln_e0 + np.arange(ln_s.size) / inv_dln, ln_s))
    else:
        s = k * np.sqrt(e)
    return float(np.trapezoid(1.0 / s, e))


def _resolve_threads(cfg: TransportConfig) -> int:
    if cfg.threads:
        return max(1, int(cfg.threads))
    env = os.environ.get("NVFORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def simulate_transport(beam: IonBeamSpec, target: TargetMaterial, cfg: TransportConfig) -> DamageProfile:
    """Monte Carlo slowing-down of ``cfg.ion_count`` ions entering at normal incidence.

    Vacancies are tallied at the collision depth: through NRT for each recoil
    above the displacement energy, or by following the full cascade when
    ``cfg.follow_recoils`` is set. The result does not depend on the number of
    worker threads.
    """
    if not target.atomic_density > 0:
        raise PhysicsError("target atomic density must be positive")
    cfg.validate_against(target)
    e0 = beam.energy
    e_d = target.displacement_energy
    e_cut = cfg.energy_cutoff
    t_min = min(0.5 * e_d, 25.0)
    n_nm3 = target.atomic_density_nm3
    bin_nm = cfg.depth_bin_width * 1e9

    ion_tab = _stopping_table(beam.species_Z, beam.species_mass, target, max(e0, 10.0) * 1.01)
    rec_tab = _stopping_table(target.atomic_Z, target.atomic_mass, target, max(e0, 10.0) * 1.01)
    bound = 1.3 * _depth_bound_nm(ion_tab, e0, e_cut) + 2.0 * bin_nm
    n_bins = int(np.ceil(bound / bin_nm)) + 1

    chunks = [
        (start, min(cfg.chunk_size, cfg.ion_count - start))
        for start in range(0, cfg.ion_count, cfg.chunk_size)
    ]

    def run(chunk):
        first, n = chunk
        return kernel.run_chunk(
            first, n, np.uint64(cfg.rng_seed), float(e0),
            float(beam.species_Z), float(beam.species_mass),
            float(target.atomic_Z), float(target.atomic_mass), n_nm3,
            float(e_d), float(e_cut), float(t_min), FLIGHT_ENERGY_FRACTION,
            ion_tab[0], ion_tab[1], ion_tab[2], ion_tab[3],
            rec_tab[2], rec_tab[3],
            bool(cfg.follow_recoils), bool(cfg.damage_energy_partition), bin_nm, n_bins, MAX_STACK,
        )

    threads = min(_resolve_threads(cfg), len(chunks))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]

    vac = np.zeros(n_bins)
    for v, _ in results:  # fixed chunk order keeps the sum bit-stable
        vac = vac + v
    ledger = np.concatenate([led for _, led in results], axis=0)

    stopped = ledger[:, 4] == kernel.STOPPED
    depths_nm = ledger[stopped, 3]
    n_stopped = int(stopped.sum())
    stop_hist = np.zeros(n_bins)
    if n_stopped:
        idx = np.minimum((depths_nm / bin_nm).astype(np.int64), n_bins - 1)
        stop_hist = np.bincount(idx, minlength=n_bins).astype(float) / n_stopped
        range_mean = float(depths_nm.mean()) * 1e-9
        straggle = float(depths_nm.std()) * 1e-9
    else:
        range_mean = straggle = 0.0
    if n_stopped < cfg.ion_count:
        log.info("%d of %d ions left through the surface", cfg.ion_count - n_stopped, cfg.ion_count)

    energy_ledger = np.column_stack([np.full(len(ledger), e0), ledger[:, 0], ledger[:, 1], ledger[:, 2]])
    return DamageProfile(
        bin_width=cfg.depth_bin_width,
        vacancies_per_ion_per_bin=vac / cfg.ion_count,
        ion_stop_per_bin=stop_hist,
        range_mean=range_mean,
        range_straggle=straggle,
        ions_simulated=cfg.ion_count,
        ions_backscattered=cfg.ion_count - n_stopped,
        energy_ledger=energy_ledger,
    )


def vacancies_per_ion(profile: DamageProfile) -> float:
    return float(np.sum(profile.vacancies_per_ion_per_bin))


def _vacancies_between(profile: DamageProfile, lo: float, hi: float) -> float:
    """Vacancies per ion in depth window [lo, hi) (m), assuming uniform density inside bins."""
    edges = profile.bin_edges
    overlap = np.clip(np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0.0, None)
    return float(np.sum(profile.vacancies_per_ion_per_bin * overlap / profile.bin_width))


def end_of_range_fraction(profile: DamageProfile, window: float) -> float:
    """Share of all vacancies created deeper than ``range_mean - window``."""
    if not 0 < window < profile.range_mean:
        raise ValueError(f"window must lie in (0, range_mean={profile.range_mean:.3e} m)")
    total = vacancies_per_ion(profile)
    if total == 0:
        return 0.0
    return _vacancies_between(profile, profile.range_mean - window, np.inf) / total


def cap_layer_density(profile: DamageProfile, fluence: float, cap_thickness: float) -> float:
    """Mean vacancy density (cm^-3) in the surface layer [0, cap_thickness] at ``fluence``."""
    if not cap_thickness > 0:
        raise ValueError("cap_thickness must be positive")
    if fluence < 0:
        raise ValueError("fluence must be non-negative")
    per_ion = _vacancies_between(profile, 0.0, cap_thickness)
    return per_ion * fluence / (cap_thickness * 100.0)
