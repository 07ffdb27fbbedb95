"""Binary-collision Monte Carlo for light ions in diamond."""

from .damage import (
    DamageProfile,
    cap_layer_density,
    end_of_range_fraction,
    nrt_vacancies,
    simulate_transport,
    vacancies_per_ion,
)
from .materials import (
    DIAMOND,
    HELIUM,
    IONS,
    PROTON,
    IonBeamSpec,
    PhysicsError,
    TargetMaterial,
    TransportConfig,
)
from .stopping import electronic_stopping, nuclear_stopping

__all__ = [
    "DIAMOND", "HELIUM", "IONS", "PROTON", "DamageProfile", "IonBeamSpec", "PhysicsError",
    "TargetMaterial", "TransportConfig", "cap_layer_density", "electronic_stopping",
    "end_of_range_fraction", "nrt_vacancies", "nuclear_stopping", "simulate_transport",
    "vacancies_per_ion",
]
