"""Command-line behaviour: exit codes, CSV/JSON shapes, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from cosetflow import cli

KANCHEVA_CONFIG = {
    "model": "kancheva",
    "parameters": {"delta": 5.0, "v1": 1.0, "v2": 2.0},
    "t0": 0.0,
    "t1": 5.0,
    "samples": 101,
}

LAMBDA4_CONFIG = {
    "model": "custom-coefficients",
    "parameters": {"a": [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]},
    "t0": 0.0,
    "t1": 3.0,
}


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def read_rows(csv_path):
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == cli.CSV_HEADER
    return np.array([[float(c) for c in line.split(",")] for line in lines[1:]])


# ---------------------------------------------------------------------------
# evolve


def test_evolve_writes_the_documented_csv(tmp_path):
    config = write_config(tmp_path, KANCHEVA_CONFIG)
    out = tmp_path / "run.csv"
    assert cli.main(["evolve", "--config", str(config), "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows.shape == (101, 17)
    assert rows[0, 0] == 0.0 and rows[-1, 0] == 5.0
    populations = rows[:, 1:4]
    assert np.abs(populations.sum(axis=1) - 1.0).max() < 1e-9
    assert populations[0] == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)
    m_norms = np.linalg.norm(rows[:, 4:10], axis=1)
    assert np.abs(m_norms - 1.0).max() < 1e-9
    assert rows[:, 15].max() < 1e-8  # unitarity residual
    assert rows[:, 16].max() < 1e-6  # deviation from the reference run


def test_evolve_output_is_deterministic(tmp_path):
    config = write_config(tmp_path, KANCHEVA_CONFIG)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["evolve", "--config", str(config), "--out", str(first)]) == 0
    assert cli.main(["evolve", "--config", str(config), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_evolve_overrides_change_the_run(tmp_path):
    config = write_config(tmp_path, KANCHEVA_CONFIG)
    out = tmp_path / "run.csv"
    rc = cli.main(
        [
            "evolve",
            "--config",
            str(config),
            "--out",
            str(out),
            "--pipeline",
            "oracle",
            "--samples",
            "21",
        ]
    )
    assert rc == 0
    assert read_rows(out).shape == (21, 17)


def test_evolve_su4_pipeline_matches_the_reference(tmp_path):
    payload = dict(KANCHEVA_CONFIG, pipeline="su4", samples=41, t1=2.0)
    config = write_config(tmp_path, payload)
    out = tmp_path / "run.csv"
    assert cli.main(["evolve", "--config", str(config), "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[:, 16].max() < 1e-6


@pytest.mark.parametrize(
    "payload",
    [
        {"model": "nonsense", "parameters": {}},
        dict(KANCHEVA_CONFIG, extra_key=1),
        {"model": "kancheva", "parameters": {"delta": 1.0, "v1": 1.0, "v2": 1.0}, "t0": 0.0},
        dict(KANCHEVA_CONFIG, tol=0.5),
        dict(KANCHEVA_CONFIG, samples=1),
        dict(KANCHEVA_CONFIG, t1=-1.0),
        dict(KANCHEVA_CONFIG, initial=5),
        {"model": "dm", "parameters": {"j": 1.0}},
        {"model": "custom-coefficients", "parameters": {}, "t0": 0.0, "t1": 1.0},
        dict(KANCHEVA_CONFIG, parameters={"delta": 1.0, "v1": 1.0, "v2": 1.0, "zz": 2}),
        "not an object",
    ],
)
def test_bad_configs_exit_2(tmp_path, payload):
    config = write_config(tmp_path, payload)
    out = tmp_path / "run.csv"
    assert cli.main(["evolve", "--config", str(config), "--out", str(out)]) == 2
    assert not out.exists()


def test_unparseable_json_and_missing_file_exit_2(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{nope", encoding="utf-8")
    out = tmp_path / "run.csv"
    assert cli.main(["evolve", "--config", str(broken), "--out", str(out)]) == 2
    missing = tmp_path / "missing.json"
    assert cli.main(["evolve", "--config", str(missing), "--out", str(out)]) == 2


def test_out_of_range_tol_override_exits_2(tmp_path):
    config = write_config(tmp_path, KANCHEVA_CONFIG)
    out = tmp_path / "run.csv"
    rc = cli.main(["evolve", "--config", str(config), "--out", str(out), "--tol", "1.0"])
    assert rc == 2


def test_integration_breakdown_exits_3(tmp_path):
    config = write_config(tmp_path, dict(LAMBDA4_CONFIG, pipeline="su4"))
    out = tmp_path / "run.csv"
    assert cli.main(["evolve", "--config", str(config), "--out", str(out)]) == 3


def test_chart_crossing_run_reports_its_own_deviation(tmp_path):
    # The unit-vector pipeline crosses its chart boundary on this drive.
    # The run still exits 0, but it warns, and the final CSV column (the
    # distance from the always-on reference run) exposes the damage.
    config = write_config(tmp_path, dict(LAMBDA4_CONFIG, pipeline="su3", samples=201))
    out = tmp_path / "run.csv"
    with pytest.warns(RuntimeWarning, match="cross zero"):
        rc = cli.main(["evolve", "--config", str(config), "--out", str(out)])
    assert rc == 0
    rows = read_rows(out)
    assert rows[:, 16].max() > 0.1


def test_dm_model_notes_the_dropped_term_on_stderr(tmp_path, capsys):
    payload = {
        "model": "dm",
        "parameters": {"j": 1.0, "beta": [0.0, 0.0, 0.4]},
        "t0": 0.0,
        "t1": 1.0,
        "samples": 21,
    }
    config = write_config(tmp_path, payload)
    out = tmp_path / "run.csv"
    assert cli.main(["evolve", "--config", str(config), "--out", str(out)]) == 0
    err = capsys.readouterr().err
    assert err.count("antisymmetric exchange") == 1
    assert read_rows(out).shape == (21, 17)


# ---------------------------------------------------------------------------
# gphase


def write_path(tmp_path, theta1, theta2, n=2001, header=True):
    s = np.linspace(0.0, 1.0, n)
    lines = ["t,theta1,theta2,eps1,eps2"] if header else []
    for si in s:
        lines.append(f"{si},{theta1},{theta2},{2 * np.pi * si},0.0")
    path = tmp_path / "path.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_gphase_on_a_first_azimuth_circle(tmp_path):
    theta1, theta2 = 1.2, 0.7
    path = write_path(tmp_path, theta1, theta2)
    out = tmp_path / "gamma.json"
    assert cli.main(["gphase", "--config", str(path), "--out", str(out)]) == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    expected = -np.pi * np.sin(theta1 / 2.0) ** 2 * (1.0 + np.cos(theta2))
    assert payload["path_closed"] is True
    assert payload["gamma_g"] == pytest.approx(expected, abs=1e-4)
    assert payload["gamma_g_wrapped"] == pytest.approx(
        np.angle(np.exp(1j * expected)), abs=1e-4
    )


def test_gphase_rejects_malformed_paths(tmp_path):
    out = tmp_path / "gamma.json"
    short = tmp_path / "short.csv"
    short.write_text("t,theta1,theta2,eps1,eps2\n0,1,1,0,0\n", encoding="utf-8")
    assert cli.main(["gphase", "--config", str(short), "--out", str(out)]) == 2
    narrow = tmp_path / "narrow.csv"
    narrow.write_text("0,1,1\n1,1,1\n", encoding="utf-8")
    assert cli.main(["gphase", "--config", str(narrow), "--out", str(out)]) == 2
    missing = tmp_path / "nope.csv"
    assert cli.main(["gphase", "--config", str(missing), "--out", str(out)]) == 2


# ---------------------------------------------------------------------------
# sweep


def test_sweep_fans_out_and_writes_a_manifest(tmp_path):
    sweep = {
        "base": dict(KANCHEVA_CONFIG, samples=41, t1=2.0),
        "points": [{"delta": 3.0}, {"delta": 9.0}],
    }
    config = write_config(tmp_path, sweep, name="sweep.json")
    out_dir = tmp_path / "grid"
    assert cli.main(["sweep", "--config", str(config), "--out", str(out_dir)]) == 0
    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
    assert [r["file"] for r in manifest["runs"]] == ["run_000.csv", "run_001.csv"]
    assert [r["parameters"]["delta"] for r in manifest["runs"]] == [3.0, 9.0]
    first = read_rows(out_dir / "run_000.csv")
    second = read_rows(out_dir / "run_001.csv")
    assert first.shape == second.shape == (41, 17)
    assert np.abs(first - second).max() > 1e-3  # the points genuinely differ


def test_sweep_validates_every_point_before_running(tmp_path):
    sweep = {
        "base": dict(KANCHEVA_CONFIG, samples=41),
        "points": [{"delta": 3.0}, {"wrong": 1.0}],
    }
    config = write_config(tmp_path, sweep, name="sweep.json")
    out_dir = tmp_path / "grid"
    assert cli.main(["sweep", "--config", str(config), "--out", str(out_dir)]) == 2
    assert not (out_dir / "manifest.json").exists()


def test_sweep_rejects_missing_sections(tmp_path):
    config = write_config(tmp_path, {"points": []}, name="sweep.json")
    assert cli.main(["sweep", "--config", str(config), "--out", str(tmp_path / "g")]) == 2


# ---------------------------------------------------------------------------
# installed entry point


def test_module_entry_point_runs(tmp_path):
    config = write_config(tmp_path, dict(KANCHEVA_CONFIG, samples=21, t1=1.0))
    out = tmp_path / "run.csv"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "cosetflow.cli",
            "evolve",
            "--config",
            str(config),
            "--out",
            str(out),
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert read_rows(out).shape == (21, 17)
