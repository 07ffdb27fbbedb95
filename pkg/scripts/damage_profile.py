"""Run the He damage simulation and print the headline numbers.

    python scripts/damage_profile.py [--ions N] [--seed S] [--energy-mev E]
"""

import argparse
import time

import numpy as np

from nvforge.config import TransportSection
from nvforge.transport import cap_layer_density, end_of_range_fraction, simulate_transport, vacancies_per_ion


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ions", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--energy-mev", type=float, default=2.0)
    ap.add_argument("--ion", choices=("He", "H"), default="He")
    args = ap.parse_args()

    section = TransportSection(ion=args.ion, energy_mev=args.energy_mev, ion_count=args.ions)
    t0 = time.perf_counter()
    profile = simulate_transport(section.beam(), section.target(), section.transport_config(args.seed))
    dt = time.perf_counter() - t0

    print(f"{args.ions} {args.ion} ions at {args.energy_mev} MeV, seed {args.seed}: {dt:.1f} s")
    print(f"  vacancies per ion      {vacancies_per_ion(profile):.2f}")
    print(f"  mean range             {profile.range_mean * 1e6:.3f} um (straggle {profile.range_straggle * 1e6:.3f})")
    print(f"  last 0.5 um fraction   {end_of_range_fraction(profile, 0.5e-6):.3f}")
    print(f"  cap density at 1e15    {cap_layer_density(profile, 1e15, 3e-6):.3e} cm^-3")
    print(f"  backscattered          {profile.ions_backscattered}")
    print(f"  max energy imbalance   {profile.energy_balance_error().max():.1e}")
    peak = int(np.argmax(profile.vacancies_per_ion_per_bin))
    print(f"  damage peak at         {profile.depth_centers[peak] * 1e6:.3f} um")


if __name__ == "__main__":
    main()
