import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvforge import SCHEMA_VERSION
from nvforge.config import ConfigError, RunConfig, SweepSection, SweepSpec, config_from_dict, load_config
from nvforge.io import DataFormatError, csv_text, fmt, read_csv, read_profile, write_json, write_profile


# ---------------------------------------------------------------- config


def test_defaults_round_trip():
    cfg = RunConfig()
    assert config_from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_dict({"seed": 1})
    with pytest.raises(ConfigError, match="pl: unknown key.*capp"):
        config_from_dict({"pl": {"capp": 1}})


def test_version_checked():
    with pytest.raises(ConfigError, match="version"):
        config_from_dict({"version": "0"})
    assert config_from_dict({"version": SCHEMA_VERSION}).version == SCHEMA_VERSION


def test_type_checks():
    with pytest.raises(ConfigError):
        config_from_dict({"rng_seed": 1.5})
    with pytest.raises(ConfigError):
        config_from_dict({"transport": {"follow_recoils": "yes"}})
    with pytest.raises(ConfigError):
        config_from_dict({"transport": {"energy_mev": "1"}})
    assert config_from_dict({"transport": {"energy_mev": 2}}).transport.energy_mev == 2.0


def test_load_config_reports_line(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{\n  "rng_seed": 1,\n  oops\n}')
    with pytest.raises(ConfigError, match=":3:"):
        load_config(p)


def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec("fluence", (1e14,))
    with pytest.raises(ConfigError):
        SweepSpec("fluence", (1e15, 1e14))
    with pytest.raises(ConfigError):
        SweepSpec("fluence", (-1.0, 1.0))
    with pytest.raises(ConfigError):
        SweepSpec("depth", (1.0, 2.0))
    with pytest.raises(ConfigError):
        SweepSpec.from_section(SweepSection(values=[1, 2], range=[1, 2, 3]))
    with pytest.raises(ConfigError):
        SweepSpec.from_section(SweepSection(preset=None))
    assert len(SweepSpec.from_section(SweepSection()).values) == 14


# ---------------------------------------------------------------- io


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(fmt(x)) == x


def test_fmt_types():
    assert fmt(True) == "true" and fmt(np.int64(3)) == "3" and fmt(0.1) == "0.1"


def test_read_csv_errors(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("# comment\na,b\n1,2\n3\n")
    with pytest.raises(DataFormatError) as exc:
        read_csv(p)
    assert exc.value.line == 4
    p.write_text("a,b\n1,nan\n")
    with pytest.raises(DataFormatError):
        read_csv(p)
    p.write_text("# only comments\n")
    with pytest.raises(DataFormatError):
        read_csv(p)
    p.write_text("x,y\n1,2\n")
    with pytest.raises(DataFormatError):
        read_csv(p, ("a", "b"))


def test_csv_header_carries_config():
    text = csv_text(["a"], [[1.5]], {"rng_seed": 7})
    lines = text.splitlines()
    assert lines[0].startswith("# nvforge ")
    assert json.loads(lines[1][len("# config "):]) == {"rng_seed": 7}
    assert lines[2:] == ["a", "1.5"]


def test_json_meta_and_non_finite(tmp_path):
    write_json(tmp_path / "r.json", {"value": float("inf"), "arr": np.arange(3)}, {"k": 1})
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["meta"]["config"] == {"k": 1}
    assert doc["value"] is None and doc["arr"] == [0, 1, 2]


def test_profile_round_trip(tmp_path, small_profile):
    write_profile(tmp_path / "p.csv", small_profile)
    back = read_profile(tmp_path / "p.csv")
    assert back.bin_width == pytest.approx(small_profile.bin_width)
    assert back.vacancies_per_ion_per_bin == pytest.approx(small_profile.vacancies_per_ion_per_bin, rel=1e-12)
    assert back.range_mean == pytest.approx(small_profile.range_mean, rel=0.02)


def test_profile_needs_increasing_depth(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("depth_um,vacancies_per_ion_per_um,ion_stop_fraction\n1,0,0\n0.5,0,0\n")
    with pytest.raises(DataFormatError):
        read_profile(p)


def test_atomic_write_leaves_no_temp(tmp_path):
    write_json(tmp_path / "sub" / "r.json", {"a": 1})
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["r.json"]
