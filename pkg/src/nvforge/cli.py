"""Command-line entry point: ``nvforge {damage,anneal,sweep,fit,qmem-report}``.

Exit codes: 0 success, 1 usage or configuration error, 2 physics error
(invalid physical input, non-convergence), 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, SweepSpec, config_from_dict, load_config
from .defects import ConvergenceError, anneal, charge_partition, photoionization_fraction, steady_state_pl
from .io import DataFormatError, read_profile, read_spectrum, write_csv, write_json, write_profile
from .pl.intensity import linewidth_at_fluence, predict_zpl_intensities
from .pl.spectra import EmissionLine, FitError, fit_lines
from .qmem import memory_report
from .transport import (
    PhysicsError,
    cap_layer_density,
    end_of_range_fraction,
    simulate_transport,
    vacancies_per_ion,
)

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS, EXIT_IO = 0, 1, 2, 3
EOR_WINDOW = 0.5e-6  # m

log = logging.getLogger("nvforge")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _global_options(defaults: bool) -> argparse.ArgumentParser:
    # defined on the main parser and every subcommand so flags work in either position
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--config", default=d(None), help="JSON run configuration")
    p.add_argument("--seed", type=_u64, default=d(None), help="RNG seed (u64)")
    p.add_argument("--out", default=d(None), help="output directory (or file path for single outputs)")
    p.add_argument("--format", choices=("csv", "json"), default=d(None), help="tabular output format")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nvforge", description=__doc__.splitlines()[0], parents=[_global_options(True)])
    parser.add_argument("--version", action="version", version=f"nvforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    g = [_global_options(False)]

    p = sub.add_parser("damage", parents=g, help="Monte Carlo damage profile")
    p.add_argument("--ion", choices=("He", "H"))
    p.add_argument("--energy-mev", type=float)
    p.add_argument("--ions", type=int)
    p.add_argument("--bin-nm", type=float)
    p.add_argument("--displacement-energy", type=float)
    p.add_argument("--follow-recoils", action="store_true", default=None)
    p.add_argument("--threads", type=int, help="worker threads (does not change results)")

    p = sub.add_parser("anneal", parents=g, help="anneal a vacancy population and partition NV charge")
    p.add_argument("--vacancy-density", type=float, help="cm^-3")
    p.add_argument("--nitrogen-density", type=float, help="cm^-3")
    p.add_argument("--efficiency", type=float, help="NV conversion efficiency")

    p = sub.add_parser("sweep", parents=g, help="fluence or excitation-power sweep")
    p.add_argument("--axis", choices=("fluence", "power"))
    p.add_argument("--values", help="comma-separated axis values")
    p.add_argument("--range", nargs=3, type=float, metavar=("START", "STOP", "N"), help="log-spaced values")
    p.add_argument("--preset", help="named fluence grid, e.g. paper-fig4")
    p.add_argument("--outputs", help="extra columns: charge_ratio,cap_vacancy_density")
    p.add_argument("--profile", help="damage profile CSV to reuse instead of running transport")
    p.add_argument("--fluence", type=float, help="fixed fluence for power sweeps (cm^-2)")
    p.add_argument("--ions", type=int, help="ions for the transport run")

    p = sub.add_parser("fit", parents=g, help="fit emission lines to a spectrum CSV")
    p.add_argument("spectrum")
    p.add_argument("--line", action="append", default=[], metavar="CENTER[:FWHM[:SHAPE]]",
                   help="initial guess in nm; repeat per line")
    p.add_argument("--lines-json", help="JSON array of {center_nm, fwhm_nm, area, shape}")
    p.add_argument("--shape", choices=("lorentzian", "gaussian"), default="lorentzian")

    p = sub.add_parser("qmem-report", parents=g, help="quantum-memory figures of merit")
    p.add_argument("design", nargs="?", help="JSON design document (qmem fields)")
    p.add_argument("--gamma", choices=("inhomogeneous", "radiative"))
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.rng_seed = args.seed
    if args.out is not None:
        cfg.output_dir = args.out
    return cfg


def _out_path(args, cfg: RunConfig, default_name: str, suffix: str) -> Path:
    """``--out`` naming a file with a suffix is used as-is; otherwise it is a directory."""
    target = Path(args.out) if args.out is not None else Path(cfg.output_dir)
    if target.suffix in (".csv", ".json"):
        return target.with_suffix(suffix)
    return target / f"{default_name}{suffix}"


def _profile_for(args, cfg: RunConfig):
    if getattr(args, "profile", None):
        return read_profile(args.profile)
    t = cfg.transport
    return simulate_transport(t.beam(), t.target(), t.transport_config(cfg.rng_seed))


def cmd_damage(args, cfg: RunConfig) -> int:
    t = cfg.transport
    if args.ion is not None:
        t.ion = args.ion
    if args.energy_mev is not None:
        t.energy_mev = args.energy_mev
    if args.ions is not None:
        t.ion_count = args.ions
    if args.bin_nm is not None:
        t.depth_bin_width_nm = args.bin_nm
    if args.displacement_energy is not None:
        t.displacement_energy_ev = args.displacement_energy
        t.energy_cutoff_ev = max(t.energy_cutoff_ev, args.displacement_energy)
    if args.follow_recoils:
        t.follow_recoils = True
    tc = replace(t.transport_config(cfg.rng_seed), threads=args.threads)
    profile = simulate_transport(t.beam(), t.target(), tc)
    resolved = cfg.to_dict()
    fmt = args.format or "csv"
    out = _out_path(args, cfg, "profile", "." + fmt)
    if fmt == "csv":
        write_profile(out, profile, resolved)
    else:
        write_json(out, {
            "bin_width_m": profile.bin_width,
            "depth_um": profile.depth_centers * 1e6,
            "vacancies_per_ion_per_bin": profile.vacancies_per_ion_per_bin,
            "ion_stop_per_bin": profile.ion_stop_per_bin,
        }, resolved)
    eor = end_of_range_fraction(profile, EOR_WINDOW) if profile.range_mean > EOR_WINDOW else None
    summary = {
        "range_mean_m": profile.range_mean,
        "range_straggle_m": profile.range_straggle,
        "vacancies_per_ion": vacancies_per_ion(profile),
        "end_of_range_fraction": eor,
        "end_of_range_window_m": EOR_WINDOW,
        "cap_vacancy_density_at_1e15_cm3": cap_layer_density(profile, 1e15, cfg.pl.cap_thickness_um * 1e-6),
        "ions_simulated": profile.ions_simulated,
        "ions_backscattered": profile.ions_backscattered,
        "max_energy_balance_error": float(profile.energy_balance_error().max()),
    }
    write_json(out.with_name(out.stem + ".summary.json"), summary, resolved)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_anneal(args, cfg: RunConfig) -> int:
    d = cfg.defects
    if args.vacancy_density is not None:
        d.vacancy_density = args.vacancy_density
    if args.nitrogen_density is not None:
        d.nitrogen_density = args.nitrogen_density
    if args.efficiency is not None:
        d.nv_conversion_efficiency = args.efficiency
    state = charge_partition(anneal(d.vacancy_density, d.nitrogen_density, d.anneal_model(),
                                    cfg.pl.graphitization_threshold), d.equilibrium())
    record = state.to_dict()
    record["nv_total"] = state.nv_total
    record["donors_available"] = state.donors_available
    record["charge_ratio"] = state.charge_ratio
    resolved = cfg.to_dict()
    fmt = args.format or "json"
    out = _out_path(args, cfg, "anneal", "." + fmt)
    if fmt == "json":
        write_json(out, {"state": record}, resolved)
    else:
        write_csv(out, list(record), [list(record.values())], resolved)
    print(f"wrote {out}")
    return EXIT_OK


def _sweep_spec(args, cfg: RunConfig) -> SweepSpec:
    s = cfg.sweep
    if args.axis is not None:
        s.axis = args.axis
    if args.values is not None:
        s.values = [float(v) for v in args.values.split(",") if v.strip()]
        s.range = None
    if args.range is not None:
        s.range = list(args.range)
        s.values = None
    if args.preset is not None:
        s.preset = args.preset
        s.values = s.range = None
    if args.outputs is not None:
        s.outputs = [o.strip() for o in args.outputs.split(",") if o.strip()]
    if args.fluence is not None:
        s.fluence = args.fluence
    if s.axis == "power" and s.values is None and s.range is None:
        raise ConfigError("power sweeps need --values or --range")
    return SweepSpec.from_section(s)


FLUENCE_EXTRAS = ("charge_ratio", "cap_vacancy_density")


def cmd_sweep(args, cfg: RunConfig) -> int:
    spec = _sweep_spec(args, cfg)
    if args.ions is not None:
        cfg.transport.ion_count = args.ions
    bad = [o for o in spec.outputs if o not in FLUENCE_EXTRAS]
    if bad:
        raise ConfigError(f"unknown sweep output(s) {', '.join(bad)}; available: {', '.join(FLUENCE_EXTRAS)}")
    profile = _profile_for(args, cfg)
    d, pl = cfg.defects, cfg.pl
    cap = pl.cap_thickness_um * 1e-6
    values = np.array(spec.values)
    if spec.axis == "fluence":
        res = predict_zpl_intensities(values, profile, d.anneal_model(), d.equilibrium(), pl.absorption(),
                                      d.nitrogen_density, cap, d.nv_zero_excitation)
        columns = ["fluence_cm2", "i_nv_minus", "i_nv_zero", "i_gr1", "fwhm_nv_minus_nm"]
        cols = [values, res.nv_minus, res.nv_zero, res.gr1, linewidth_at_fluence(values, pl.broadening())]
        if "charge_ratio" in spec.outputs:
            columns.append("ratio_nv_minus_nv_zero")
            cols.append(res.charge_ratio)
        if "cap_vacancy_density" in spec.outputs:
            columns.append("cap_vacancy_density_cm3")
            cols.append(np.array([cap_layer_density(profile, f, cap) for f in values]))
    else:
        v = cap_layer_density(profile, cfg.sweep.fluence, cap)
        state = charge_partition(anneal(v, d.nitrogen_density, d.anneal_model()), d.equilibrium())
        model = d.photoionization()
        pm, pz = steady_state_pl(state, values, model)
        columns = ["power_mw", "i_nv_minus", "i_nv_zero", "ratio_nv_zero_nv_minus", "neutral_fraction"]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pm > 0, pz / pm, np.inf)
        cols = [values, pm, pz, ratio, photoionization_fraction(values, model)]
    rows = list(zip(*cols))
    resolved = cfg.to_dict()
    fmt = args.format or "csv"
    out = _out_path(args, cfg, "sweep", "." + fmt)
    if fmt == "csv":
        write_csv(out, columns, rows, resolved)
    else:
        write_json(out, {"axis": spec.axis, "columns": columns, "rows": [list(r) for r in rows]}, resolved)
    print(f"wrote {out}")
    return EXIT_OK


def _parse_line(text: str, shape: str) -> EmissionLine:
    parts = text.split(":")
    try:
        center = float(parts[0])
        fwhm = float(parts[1]) if len(parts) > 1 and parts[1] else 1.0
    except ValueError:
        raise UsageError(f"bad --line value {text!r}") from None
    return EmissionLine(center, fwhm, 0.0, parts[2] if len(parts) > 2 else shape)


def _auto_guesses(spectrum, shape, n=2):
    from scipy.signal import find_peaks

    y = spectrum.counts
    peaks, props = find_peaks(y, prominence=0.05 * max(y.max(), 1e-300))
    order = np.argsort(props["prominences"])[::-1][:n]
    return [EmissionLine(float(spectrum.wavelength_grid[i]), 4 * spectrum.step, 0.0, shape) for i in sorted(peaks[order])]


def cmd_fit(args, cfg: RunConfig) -> int:
    spectrum = read_spectrum(args.spectrum)
    guesses = [_parse_line(s, args.shape) for s in args.line]
    if args.lines_json:
        guesses += [EmissionLine.from_dict(d) for d in json.loads(Path(args.lines_json).read_text())]
    if not guesses:
        guesses = _auto_guesses(spectrum, args.shape)
    if not guesses:
        if np.any(spectrum.counts):
            raise UsageError("no lines found; give initial guesses with --line")
        guesses = [EmissionLine(float(spectrum.wavelength_grid[spectrum.counts.size // 2]), 1.0, 0.0, args.shape)]
    resolved = cfg.to_dict()
    out = _out_path(args, cfg, "fit", ".json")
    try:
        result = fit_lines(spectrum, guesses)
    except FitError as exc:
        if exc.best is not None:
            write_json(out, {"converged": False, "lines": [ln.to_dict() for ln in exc.best.lines],
                             "residual_norm": exc.best.residual_norm}, resolved)
        raise
    write_json(out, {"converged": True, "lines": [ln.to_dict() for ln in result.lines],
                     "residual_norm": result.residual_norm, "source": str(args.spectrum)}, resolved)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_qmem_report(args, cfg: RunConfig) -> int:
    q = cfg.qmem
    if args.design:
        data = json.loads(Path(args.design).read_text(encoding="utf-8"))
        merged = cfg.to_dict()
        merged["qmem"].update(data)
        cfg = config_from_dict(merged)
        q = cfg.qmem
    if args.gamma is not None:
        q.gamma_interpretation = args.gamma
    report = memory_report(q.system(), q.design(), q.nv_minus_density, q.layer_thickness_um * 1e-6,
                           q.temperature_k, q.gamma_interpretation)
    out = _out_path(args, cfg, "qmem_report", ".json")
    write_json(out, {"report": report.to_dict()}, cfg.to_dict())
    print(report.table())
    print(f"wrote {out}")
    return EXIT_OK


COMMANDS = {
    "damage": cmd_damage,
    "anneal": cmd_anneal,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "qmem-report": cmd_qmem_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ConfigError) as exc:
        print(f"nvforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, OSError) as exc:
        print(f"nvforge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PhysicsError, ConvergenceError, FitError, ValueError) as exc:
        print(f"nvforge: physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
