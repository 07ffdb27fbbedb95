import json

import numpy as np
import pytest

from nvforge import __version__
from nvforge.cli import main
from nvforge.io import read_csv, write_profile, write_spectrum
from nvforge.pl import EmissionLine, Spectrum, synthesize_spectrum, uniform_grid


@pytest.fixture
def profile_csv(tmp_path, he_profile):
    path = tmp_path / "he.csv"
    write_profile(path, he_profile)
    return path


def run(*argv):
    return main([str(a) for a in argv])


def load_json(path):
    return json.loads(path.read_text())


# ---------------------------------------------------------------- exit codes


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run("nosuchcommand")
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run("damage", "--ions", "many")
    assert exc.value.code == 1
    assert run("sweep", "--values", "1e14", "--out", tmp_path) == 1
    assert run("sweep", "--preset", "nope", "--out", tmp_path) == 1
    assert run("sweep", "--axis", "power", "--out", tmp_path) == 1
    assert "error" in capsys.readouterr().err


def test_physics_errors(tmp_path):
    assert run("damage", "--ions", 0, "--out", tmp_path) == 2
    assert run("damage", "--energy-mev", -1, "--ions", 10, "--out", tmp_path) == 2
    assert run("anneal", "--vacancy-density", -1, "--out", tmp_path) == 2


def test_io_errors(tmp_path):
    assert run("fit", tmp_path / "missing.csv", "--out", tmp_path) == 3
    assert run("sweep", "--profile", tmp_path / "missing.csv", "--out", tmp_path) == 3
    assert run("--config", tmp_path / "missing.json", "anneal", "--out", tmp_path) == 3


def test_config_errors_are_usage(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"version": "1", "transport": {"ionz": "He"}}))
    assert run("--config", cfg, "anneal", "--out", tmp_path) == 1
    cfg.write_text(json.dumps({"version": "99"}))
    assert run("--config", cfg, "anneal", "--out", tmp_path) == 1
    cfg.write_text("{not json")
    assert run("--config", cfg, "anneal", "--out", tmp_path) == 1


# ---------------------------------------------------------------- damage


def test_damage_single_ion(tmp_path):
    assert run("damage", "--ions", 1, "--out", tmp_path) == 0
    summary = load_json(tmp_path / "profile.summary.json")
    assert summary["ions_simulated"] == 1
    assert summary["meta"]["version"] == __version__
    cols, data = read_csv(tmp_path / "profile.csv")
    assert cols == ["depth_um", "vacancies_per_ion_per_um", "ion_stop_fraction"]
    assert data.shape[0] > 1


def test_damage_rerun_byte_identical(tmp_path, monkeypatch):
    # identical arguments, so the recorded configuration is identical too
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        monkeypatch.chdir(tmp_path / d)
        assert run("damage", "--ions", 200, "--seed", 9) == 0
    assert (tmp_path / "a/profile.csv").read_bytes() == (tmp_path / "b/profile.csv").read_bytes()
    assert (tmp_path / "a/profile.summary.json").read_bytes() == (tmp_path / "b/profile.summary.json").read_bytes()


def test_damage_csv_header(tmp_path):
    assert run("damage", "--ions", 50, "--seed", 3, "--out", tmp_path / "p.csv") == 0
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == f"# nvforge {__version__}"
    cfg = json.loads(lines[1][len("# config "):])
    assert cfg["rng_seed"] == 3 and cfg["transport"]["ion_count"] == 50


def test_damage_json_format(tmp_path):
    assert run("damage", "--ions", 20, "--format", "json", "--out", tmp_path) == 0
    doc = load_json(tmp_path / "profile.json")
    assert len(doc["depth_um"]) == len(doc["vacancies_per_ion_per_bin"])


# ---------------------------------------------------------------- anneal


def test_anneal_defaults(tmp_path):
    assert run("anneal", "--vacancy-density", 3e19, "--nitrogen-density", 2e19, "--out", tmp_path) == 0
    state = load_json(tmp_path / "anneal.json")["state"]
    assert state["nv_total"] == pytest.approx(5e16)
    assert state["nv_minus"] + state["nv_zero"] == pytest.approx(5e16)


# ---------------------------------------------------------------- sweeps


def test_two_point_sweep(tmp_path, profile_csv):
    assert run("sweep", "--values", "1e14,1e15", "--profile", profile_csv, "--out", tmp_path) == 0
    cols, data = read_csv(tmp_path / "sweep.csv")
    assert cols == ["fluence_cm2", "i_nv_minus", "i_nv_zero", "i_gr1", "fwhm_nv_minus_nm"]
    assert data.shape == (2, 5)


def test_preset_sweep_is_non_monotonic(tmp_path, profile_csv):
    assert run("sweep", "--preset", "paper-fig4", "--profile", profile_csv,
               "--outputs", "charge_ratio,cap_vacancy_density", "--out", tmp_path) == 0
    cols, data = read_csv(tmp_path / "sweep.csv")
    nv = data[:, cols.index("i_nv_minus")]
    assert data.shape[0] == 14
    assert 0 < np.argmax(nv) < len(nv) - 1
    assert "ratio_nv_minus_nv_zero" in cols and "cap_vacancy_density_cm3" in cols


def test_unknown_sweep_output(tmp_path, profile_csv):
    assert run("sweep", "--profile", profile_csv, "--outputs", "bogus", "--out", tmp_path) == 1


def test_range_sweep(tmp_path, profile_csv):
    assert run("sweep", "--range", 1e13, 1e17, 5, "--profile", profile_csv, "--out", tmp_path) == 0
    _, data = read_csv(tmp_path / "sweep.csv")
    assert data[:, 0] == pytest.approx(np.geomspace(1e13, 1e17, 5))


def test_power_sweep(tmp_path, profile_csv):
    assert run("sweep", "--axis", "power", "--values", "0,1,2,5,10", "--fluence", 5e14,
               "--profile", profile_csv, "--out", tmp_path) == 0
    cols, data = read_csv(tmp_path / "sweep.csv")
    assert cols == ["power_mw", "i_nv_minus", "i_nv_zero", "ratio_nv_zero_nv_minus", "neutral_fraction"]
    ratio = data[:, cols.index("ratio_nv_zero_nv_minus")]
    assert np.all(np.diff(ratio) > 0)
    assert data[3, cols.index("neutral_fraction")] == pytest.approx(0.2)


def test_sweep_json(tmp_path, profile_csv):
    assert run("sweep", "--values", "1e14,1e15", "--profile", profile_csv, "--format", "json",
               "--out", tmp_path) == 0
    doc = load_json(tmp_path / "sweep.json")
    assert doc["axis"] == "fluence" and len(doc["rows"]) == 2 and "meta" in doc


def test_inputs_not_modified(tmp_path, profile_csv):
    before = profile_csv.read_bytes()
    assert run("sweep", "--values", "1e14,1e15", "--profile", profile_csv, "--out", tmp_path / "o") == 0
    assert profile_csv.read_bytes() == before


# ---------------------------------------------------------------- fit


def test_fit_recovers_centers(tmp_path):
    grid = uniform_grid(600.0, 780.0, 0.05)
    spec = synthesize_spectrum([EmissionLine(638.0, 0.66, 1000.0), EmissionLine(742.0, 2.7, 4000.0)], grid)
    write_spectrum(tmp_path / "s.csv", spec)
    assert run("fit", tmp_path / "s.csv", "--line", "637.5:1", "--line", "741:2", "--out", tmp_path) == 0
    lines = load_json(tmp_path / "fit.json")["lines"]
    assert [ln["center_nm"] for ln in lines] == pytest.approx([638.0, 742.0], abs=0.1)


def test_fit_auto_guesses(tmp_path):
    grid = uniform_grid(600.0, 780.0, 0.05)
    spec = synthesize_spectrum([EmissionLine(638.0, 0.66, 1000.0), EmissionLine(742.0, 2.7, 4000.0)], grid)
    write_spectrum(tmp_path / "s.csv", spec)
    assert run("fit", tmp_path / "s.csv", "--out", tmp_path) == 0
    lines = load_json(tmp_path / "fit.json")["lines"]
    assert [ln["center_nm"] for ln in lines] == pytest.approx([638.0, 742.0], abs=0.1)


def test_fit_empty_spectrum(tmp_path):
    grid = uniform_grid(600.0, 700.0, 0.1)
    write_spectrum(tmp_path / "z.csv", Spectrum(grid, np.zeros_like(grid)))
    assert run("fit", tmp_path / "z.csv", "--out", tmp_path) == 0
    assert all(ln["area"] == 0 for ln in load_json(tmp_path / "fit.json")["lines"])


def test_fit_malformed_csv(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("wavelength_nm,counts\n600.0,1\n600.1,oops\n")
    assert run("fit", bad, "--out", tmp_path) == 3
    assert "bad.csv:3" in capsys.readouterr().err


def test_fit_bad_line_flag(tmp_path):
    grid = uniform_grid(600.0, 700.0, 0.1)
    write_spectrum(tmp_path / "s.csv", synthesize_spectrum([EmissionLine(650.0, 1.0, 10.0)], grid))
    assert run("fit", tmp_path / "s.csv", "--line", "abc", "--out", tmp_path) == 1


# ---------------------------------------------------------------- qmem-report


def test_qmem_report_defaults(tmp_path, capsys):
    assert run("qmem-report", "--out", tmp_path) == 0
    report = load_json(tmp_path / "qmem_report.json")["report"]
    assert 0.14 <= report["efficiency"] <= 0.20
    assert report["gamma_interpretation"] == "inhomogeneous"
    assert "efficiency" in capsys.readouterr().out


def test_qmem_report_zero_density(tmp_path):
    design = tmp_path / "d.json"
    design.write_text(json.dumps({"nv_minus_density": 0.0}))
    assert run("qmem-report", design, "--out", tmp_path) == 0
    assert load_json(tmp_path / "qmem_report.json")["report"]["efficiency"] == 0.0


def test_qmem_report_radiative(tmp_path):
    assert run("qmem-report", "--gamma", "radiative", "--out", tmp_path) == 0
    report = load_json(tmp_path / "qmem_report.json")["report"]
    assert report["gamma_interpretation"] == "radiative"
    assert report["efficiency"] > 0.9


def test_qmem_report_unknown_design_key(tmp_path):
    design = tmp_path / "d.json"
    design.write_text(json.dumps({"nv_density": 1.0}))
    assert run("qmem-report", design, "--out", tmp_path) == 1
