"""Print the quantum-memory figures of merit for a range of NV- densities.

    python scripts/memory_budget.py [--gamma inhomogeneous|radiative] [--cavity-q Q]
"""

import argparse

from nvforge.qmem import LambdaSystem, MemoryDesign, memory_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma", choices=("inhomogeneous", "radiative"), default="inhomogeneous")
    ap.add_argument("--cavity-q", type=float, default=None)
    args = ap.parse_args()

    system = LambdaSystem()
    design = MemoryDesign.from_detuning_nm(10.0, cavity_Q=args.cavity_q)
    print(memory_report(system, design, 2e18, interpretation=args.gamma).table())
    print()
    print(f"{'NV- cm^-3':>10} {'D':>9} {'C':>9} {'eta':>7} {'P_ctrl W':>9}")
    for density in (1e16, 1e17, 5e17, 1e18, 2e18, 5e18):
        r = memory_report(system, design, density, interpretation=args.gamma)
        p = f"{r.control_average_power:9.2e}" if r.control_average_power is not None else f"{'-':>9}"
        print(f"{density:10.1e} {r.optical_depth:9.4f} {r.cooperativity:9.4f} {r.efficiency:7.4f} {p}")


if __name__ == "__main__":
    main()
