"""Electronic and nuclear stopping for light ions in carbon.

Electronic stopping for H and He in carbon comes from an embedded table
(log-log interpolated, 1 keV - 10 MeV) scaled by the target atomic density.
The table was generated from the Andersen-Ziegler proton coefficients for
carbon (A1..A5 = 2.631, 2.601, 1701, 1279, 0.01638) and, for helium, the
Ziegler-Biersack-Littmark helium effective-charge fraction. Below the table
the stopping is taken proportional to ion velocity; above it a Bethe form is
matched to the last table point. Heavier ions (carbon recoils) use
Lindhard-Scharff.
"""

from __future__ import annotations

import numpy as np

from ..constants import BOHR_NM, E2_EV_NM, M_ELECTRON_EV, AMU_EV
from .materials import PhysicsError, TargetMaterial

# ion energy, eV (same grid for both ions)
TABLE_ENERGY_EV = np.logspace(3.0, 7.0, 33)

# eV / (1e15 atoms cm^-2)
_S_HE_IN_C = np.array([
    1.31, 1.513, 1.747, 2.018, 2.33, 2.744, 3.508, 4.452, 5.624, 7.065, 8.816,
    10.91, 13.39, 14.18, 16.79, 19.68, 22.87, 26.31, 29.95, 33.58, 36.84, 39.17,
    39.96, 38.92, 36.33, 32.78, 28.83, 24.87, 21.13, 17.72, 14.73, 12.13, 9.919,
])
_S_H_IN_C = np.array([
    2.621, 3.026, 3.495, 4.036, 4.66, 5.382, 6.214, 7.176, 8.287, 8.199, 9.253,
    10.39, 11.56, 12.7, 13.67, 14.28, 14.32, 13.67, 12.42, 10.84, 9.234, 7.792,
    6.558, 5.509, 4.609, 3.831, 3.16, 2.588, 2.104, 1.7, 1.366, 1.092, 0.8694,
])
STOPPING_TABLES = {(1, 6): _S_H_IN_C, (2, 6): _S_HE_IN_C}

MIN_ENERGY_EV = 1.0
MAX_ENERGY_EV = 1.0e8

# ZBL universal screening function coefficients
ZBL_C = np.array([0.18175, 0.50986, 0.28022, 0.028171])
ZBL_D = np.array([3.1998, 0.94229, 0.4029, 0.20162])


def zbl_screening_length(z1: int, z2: int) -> float:
    """Universal screening length, nm."""
    return 0.8854 * BOHR_NM / (z1**0.23 + z2**0.23)


def zbl_phi(x):
    x = np.asarray(x, dtype=float)
    return np.sum(ZBL_C[:, None] * np.exp(-ZBL_D[:, None] * x.ravel()), axis=0).reshape(x.shape)


def reduced_energy(energy, z1, m1, z2, m2):
    """Lab energy (eV) to ZBL reduced energy."""
    a = zbl_screening_length(z1, z2)
    return np.asarray(energy) * m2 / (m1 + m2) * a / (z1 * z2 * E2_EV_NM)


def _per_atom_to_ev_m(s_per_1e15, target: TargetMaterial):
    # eV cm^2 * 1e-15 * atoms cm^-3 -> eV/cm -> eV/m
    return s_per_1e15 * 1e-15 * target.atomic_density * 1e2


def _bethe_per_atom(energy, ion_Z, ion_mass, target: TargetMaterial):
    """Bethe electronic stopping per atom, eV / (1e15 atoms cm^-2), no corrections."""
    e_per_amu = np.asarray(energy, dtype=float) / ion_mass
    beta2 = 2.0 * e_per_amu / AMU_EV  # non-relativistic, fine below ~100 MeV/u
    # 4 pi e^4 z^2 Z2 / (m v^2) with e^2 in eV nm; nm^2 -> cm^2 is 1e-14
    pref = 4.0 * np.pi * E2_EV_NM**2 * ion_Z**2 * target.atomic_Z / (M_ELECTRON_EV * beta2)
    log_arg = 2.0 * M_ELECTRON_EV * beta2 / target.mean_ionization_energy
    return pref * 1e-14 * np.log(log_arg) * 1e15


def lindhard_scharff(energy, ion_Z, ion_mass, target: TargetMaterial):
    """Lindhard-Scharff electronic stopping, eV / (1e15 atoms cm^-2); energy in eV."""
    z1, z2 = ion_Z, target.atomic_Z
    k = 1.212 * z1 ** (7 / 6) * z2 / ((z1 ** (2 / 3) + z2 ** (2 / 3)) ** 1.5 * np.sqrt(ion_mass))
    return k * np.sqrt(np.asarray(energy, dtype=float) / 1e3)


def _per_atom_stopping(energy, ion_Z, ion_mass, target: TargetMaterial):
    energy = np.asarray(energy, dtype=float)
    table = STOPPING_TABLES.get((ion_Z, target.atomic_Z))
    if table is None:
        if ion_Z <= 2:
            raise PhysicsError(
                f"no electronic stopping table for Z1={ion_Z} in Z2={target.atomic_Z}"
            )
        return lindhard_scharff(energy, ion_Z, ion_mass, target)
    e_lo, e_hi = TABLE_ENERGY_EV[0], TABLE_ENERGY_EV[-1]
    s = np.exp(np.interp(np.log(energy), np.log(TABLE_ENERGY_EV), np.log(table)))
    low = energy < e_lo
    s = np.where(low, table[0] * np.sqrt(energy / e_lo), s)
    high = energy > e_hi
    if np.any(high):
        match = table[-1] / _bethe_per_atom(e_hi, ion_Z, ion_mass, target)
        s = np.where(high, match * _bethe_per_atom(np.where(high, energy, e_hi), ion_Z, ion_mass, target), s)
    return s


def electronic_stopping(energy, target: TargetMaterial, ion_Z: int = 2, ion_mass: float = 4.002602):
    """Electronic stopping power in eV/m.

    ``energy`` in eV, scalar or array, within [1 eV, 100 MeV].
    """
    e = np.asarray(energy, dtype=float)
    if np.any(~np.isfinite(e)) or np.any(e < MIN_ENERGY_EV) or np.any(e > MAX_ENERGY_EV):
        raise PhysicsError(
            f"energy outside supported stopping range [{MIN_ENERGY_EV}, {MAX_ENERGY_EV}] eV"
        )
    s = _per_atom_to_ev_m(_per_atom_stopping(e, ion_Z, ion_mass, target), target)
    return float(s) if np.ndim(energy) == 0 else s


def zbl_reduced_nuclear_stopping(eps):
    """ZBL universal reduced nuclear stopping s_n(eps)."""
    eps = np.asarray(eps, dtype=float)
    small = np.log(1 + 1.1383 * eps) / (2 * (eps + 0.01321 * eps**0.21226 + 0.19593 * np.sqrt(eps)))
    safe = np.maximum(eps, 30.0)
    return np.where(eps <= 30, small, np.log(safe) / (2 * safe))


def nuclear_stopping(energy, target: TargetMaterial, ion_Z: int = 2, ion_mass: float = 4.002602):
    """ZBL universal nuclear stopping in eV/m."""
    z1, m1, z2, m2 = ion_Z, ion_mass, target.atomic_Z, target.atomic_mass
    eps = reduced_energy(energy, z1, m1, z2, m2)
    # S_n [eV/(1e15 atoms cm^-2)] = 8.462 z1 z2 m1 s_n / ((m1+m2)(z1^.23+z2^.23))
    s = 8.462 * z1 * z2 * m1 * zbl_reduced_nuclear_stopping(eps) / ((m1 + m2) * (z1**0.23 + z2**0.23))
    return _per_atom_to_ev_m(s, target)
