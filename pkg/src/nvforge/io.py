"""File formats: profile, spectrum and sweep CSV, JSON reports, atomic writes.

CSV files start with ``#`` comment lines carrying the toolkit version and the
resolved run configuration, followed by a mandatory header row. Floats are
written in shortest round-trip form.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .pl.spectra import Spectrum
from .transport.damage import DamageProfile


class DataFormatError(ValueError):
    """Malformed input file; ``line`` is 1-based."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


PROFILE_COLUMNS = ("depth_um", "vacancies_per_ion_per_um", "ion_stop_fraction")
SPECTRUM_COLUMNS = ("wavelength_nm", "counts")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def meta_block(config: dict | None) -> dict:
    return {"toolkit": "nvforge", "version": __version__, "config": config or {}}


def header_lines(config: dict | None) -> list[str]:
    return [
        f"# nvforge {__version__}",
        "# config " + json.dumps(_jsonable(config or {}), sort_keys=True, separators=(",", ":")),
    ]


def csv_text(columns, rows, config: dict | None) -> str:
    lines = header_lines(config)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def json_text(payload: dict, config: dict | None) -> str:
    body = {"meta": meta_block(config)}
    body.update(payload)
    return json.dumps(_jsonable(body), indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_csv(path, columns, rows, config: dict | None = None) -> None:
    atomic_write(path, csv_text(columns, rows, config))


def write_json(path, payload: dict, config: dict | None = None) -> None:
    atomic_write(path, json_text(payload, config))


def read_csv(path, expected_columns=None) -> tuple[list[str], np.ndarray]:
    """Read a numeric CSV with optional ``#`` comment lines; returns (columns, data)."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    columns = None
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if columns is None:
            columns = fields
            if expected_columns is not None and tuple(columns) != tuple(expected_columns):
                raise DataFormatError(path, lineno, f"expected columns {','.join(expected_columns)}")
            continue
        if len(fields) != len(columns):
            raise DataFormatError(path, lineno, f"expected {len(columns)} fields, got {len(fields)}")
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise DataFormatError(path, lineno, f"non-numeric field ({exc})") from None
    if columns is None:
        raise DataFormatError(path, max(len(lines), 1), "missing header row")
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    if not np.all(np.isfinite(data)):
        bad = int(np.argwhere(~np.isfinite(data))[0][0])
        raise DataFormatError(path, bad + 1, "non-finite value")
    return columns, data


def profile_rows(profile: DamageProfile):
    per_um = profile.vacancies_per_ion_per_bin / (profile.bin_width * 1e6)
    depth = profile.depth_centers * 1e6
    return [(depth[i], per_um[i], profile.ion_stop_per_bin[i]) for i in range(profile.n_bins)]


def write_profile(path, profile: DamageProfile, config: dict | None = None) -> None:
    write_csv(path, PROFILE_COLUMNS, profile_rows(profile), config)


def read_profile(path) -> DamageProfile:
    _, data = read_csv(path, PROFILE_COLUMNS)
    if data.shape[0] < 2:
        raise DataFormatError(path, 1, "profile needs at least two bins")
    depth_um, per_um, stop = data.T
    width_um = float(depth_um[1] - depth_um[0])
    if width_um <= 0:
        raise DataFormatError(path, 1, "depth column must increase")
    total = stop.sum()
    mean = float(np.dot(stop, depth_um) / total) if total > 0 else 0.0
    var = float(np.dot(stop, (depth_um - mean) ** 2) / total) if total > 0 else 0.0
    return DamageProfile(
        bin_width=width_um * 1e-6,
        vacancies_per_ion_per_bin=per_um * width_um,
        ion_stop_per_bin=stop,
        range_mean=mean * 1e-6,
        range_straggle=math.sqrt(var) * 1e-6,
        ions_simulated=0,
    )


def write_spectrum(path, spectrum: Spectrum, config: dict | None = None) -> None:
    rows = zip(spectrum.wavelength_grid, spectrum.counts)
    write_csv(path, SPECTRUM_COLUMNS, rows, config)


def read_spectrum(path) -> Spectrum:
    _, data = read_csv(path, SPECTRUM_COLUMNS)
    try:
        return Spectrum(data[:, 0], data[:, 1])
    except ValueError as exc:
        raise DataFormatError(path, 1, str(exc)) from None
