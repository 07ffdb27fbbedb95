"""Beam, target and run-configuration records for the transport code."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..constants import N_AVOGADRO


class PhysicsError(ValueError):
    """Raised for non-physical or unsupported inputs."""


@dataclass(frozen=True)
class IonBeamSpec:
    species_Z: int
    species_mass: float  # amu
    energy: float  # eV
    fluence: float = 0.0  # ions cm^-2

    def __post_init__(self):
        if self.species_Z < 1:
            raise PhysicsError(f"species_Z must be >= 1, got {self.species_Z}")
        if not self.species_mass > 0:
            raise PhysicsError(f"species_mass must be > 0, got {self.species_mass}")
        if not self.energy > 0:
            raise PhysicsError(f"beam energy must be > 0 eV, got {self.energy}")
        if self.fluence < 0:
            raise PhysicsError(f"fluence must be >= 0, got {self.fluence}")

    def with_energy(self, energy: float) -> IonBeamSpec:
        return replace(self, energy=energy)


@dataclass(frozen=True)
class TargetMaterial:
    atomic_Z: int
    atomic_mass: float  # amu
    atomic_density: float  # atoms cm^-3
    mass_density: float  # g cm^-3
    displacement_energy: float = 50.0  # eV
    mean_ionization_energy: float = 78.0  # eV
    check_consistency: bool = True

    def __post_init__(self):
        if not self.displacement_energy > 0:
            raise PhysicsError("displacement_energy must be > 0")
        if self.atomic_density < 0 or self.mass_density < 0:
            raise PhysicsError("densities must be non-negative")
        if self.check_consistency and self.mass_density > 0:
            expected = self.mass_density * N_AVOGADRO / self.atomic_mass
            if abs(self.atomic_density / expected - 1.0) > 1e-3:
                raise PhysicsError(
                    f"atomic_density {self.atomic_density:.4e} cm^-3 inconsistent with "
                    f"mass_density {self.mass_density} g/cm^3 (expected {expected:.4e})"
                )

    @classmethod
    def from_mass_density(cls, atomic_Z, atomic_mass, mass_density, **kw) -> TargetMaterial:
        n = mass_density * N_AVOGADRO / atomic_mass
        return cls(atomic_Z, atomic_mass, n, mass_density, **kw)

    @property
    def atomic_density_nm3(self) -> float:
        return self.atomic_density * 1e-21

    def with_displacement_energy(self, e_d: float) -> TargetMaterial:
        return replace(self, displacement_energy=e_d)

    def scaled_density(self, factor: float) -> TargetMaterial:
        """Same material at ``factor`` times the density (consistency check kept)."""
        return replace(
            self,
            atomic_density=self.atomic_density * factor,
            mass_density=self.mass_density * factor,
        )


@dataclass(frozen=True)
class TransportConfig:
    ion_count: int = 10_000
    rng_seed: int = 42
    depth_bin_width: float = 50e-9  # m
    energy_cutoff: float = 50.0  # eV
    follow_recoils: bool = False
    # NRT counts from the recoil's damage energy rather than its full kinetic energy
    damage_energy_partition: bool = True
    threads: int | None = None
    chunk_size: int = 500  # fixed partition; results do not depend on `threads`

    def __post_init__(self):
        if self.ion_count < 1:
            raise PhysicsError("ion_count must be >= 1")
        if not self.depth_bin_width > 0:
            raise PhysicsError("depth_bin_width must be > 0")
        if not 0 <= self.rng_seed < 2**64:
            raise PhysicsError("rng_seed must fit in an unsigned 64-bit integer")
        if self.chunk_size < 1:
            raise PhysicsError("chunk_size must be >= 1")

    def validate_against(self, target: TargetMaterial) -> None:
        if self.energy_cutoff < target.displacement_energy:
            raise PhysicsError(
                f"energy_cutoff ({self.energy_cutoff} eV) must not be below the "
                f"displacement energy ({target.displacement_energy} eV)"
            )


HELIUM = IonBeamSpec(species_Z=2, species_mass=4.002602, energy=2.0e6)
PROTON = IonBeamSpec(species_Z=1, species_mass=1.007276, energy=1.0e6)
IONS = {"He": HELIUM, "H": PROTON}

# 3.52 g/cm^3; atomic density follows from the mass density (1.765e23 cm^-3)
DIAMOND = TargetMaterial.from_mass_density(
    6, 12.011, 3.52, displacement_energy=50.0, mean_ionization_energy=78.0
)
