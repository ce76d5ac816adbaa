"""Command-line behavior: formats, exit codes, config merging, atomic output."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import qprotect.fidelity
import qprotect.verify
from qprotect.cli import main
from qprotect.figures import figure_dataset
from qprotect.output import format_value, render_csv, render_json, write_text
from qprotect.verify import run_checks, unit_lattice


def run_cli(args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "qprotect.cli"] + args, capture_output=True, text=True, **kwargs
    )


SHOWCASE_FLAGS = [
    "--theta", "1.0155", "--phi", "0.8976", "--p", "0.18",
    "--chi", "0.8583", "--eta", "0.7913", "--beta", "5.8905",
]


def test_fidelity_report_lines(capsys):
    assert main(["fidelity"] + SHOWCASE_FLAGS) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    values = dict(line.split(": ") for line in lines)
    assert list(values) == ["f_closed", "f_simulated", "difference", "f_plus", "f_minus"]
    assert values["f_closed"] == "0.886870353515"
    assert abs(float(values["difference"])) < 1e-12


def test_fidelity_trivial_examples(capsys):
    main(["fidelity", "--theta", "0.9", "--phi", "1.2", "--p", "0",
          "--chi", str(math.pi / 2), "--eta", "0", "--beta", "0"])
    assert "f_closed: 1.000000000000" in capsys.readouterr().out
    main(["fidelity", "--theta", "0", "--phi", "0", "--p", "0.3",
          "--chi", str(math.pi / 2), "--eta", "0", "--beta", "0"])
    assert "f_closed: 0.700000000000" in capsys.readouterr().out


def test_degrees_flag_converts_angles_but_not_p(capsys):
    main(["fidelity", "--theta", "30", "--phi", "45", "--p", "0.2",
          "--chi", "60", "--eta", "10", "--beta", "90", "--degrees"])
    a = capsys.readouterr().out
    main(["fidelity", "--theta", str(math.radians(30)), "--phi", str(math.radians(45)),
          "--p", "0.2", "--chi", str(math.radians(60)), "--eta", str(math.radians(10)),
          "--beta", str(math.radians(90))])
    assert a == capsys.readouterr().out


def test_exit_codes():
    assert run_cli(["fidelity", "--theta", "9", "--phi", "0", "--p", "0",
                    "--chi", "0", "--eta", "0", "--beta", "0"]).returncode == 3
    assert run_cli(["fidelity", "--theta", "0.5"]).returncode == 2
    assert run_cli(["figure", "--figure", "9"]).returncode == 2
    assert run_cli(["sweep", "bogus", "--p", "0.1"]).returncode == 2
    assert run_cli(["nonsense"]).returncode == 2
    assert run_cli([]).returncode == 2


def test_range_error_writes_no_file(tmp_path):
    out = tmp_path / "sweep.csv"
    result = run_cli(["sweep", "--p", "0.7", "--out", str(out)])
    assert result.returncode == 3
    assert not out.exists()
    assert "error:" in result.stderr
    # no stray temp files either
    assert list(tmp_path.iterdir()) == []


def test_csv_shape_and_metadata(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--p", "0.2", "--grid-theta", "4", "--grid-phi", "3",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    meta = [ln for ln in lines if ln.startswith("# ")]
    body = [ln for ln in lines if not ln.startswith("# ")]
    assert body[0].startswith("theta,phi,p,chi_opt,")
    assert len(body) == 1 + 4 * 3
    meta_map = dict(ln[2:].split(": ", 1) for ln in meta)
    assert meta_map["command"] == "sweep"
    assert meta_map["grid_theta"] == "4"
    assert meta_map["chi_grid"] == "129"
    # row order: theta-major, then phi
    firsts = [tuple(map(float, ln.split(",")[:2])) for ln in body[1:]]
    assert firsts == sorted(firsts)


def test_csv_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["curve", "f_imp", "--p-steps", "4", "--grid-theta", "8", "--grid-phi", "8"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_round_trips_byte_identically(tmp_path):
    out = tmp_path / "curve.json"
    assert main(["curve", "--p-steps", "3", "--grid-theta", "6", "--grid-phi", "6",
                 "--format", "json", "--out", str(out)]) == 0
    text = out.read_text()
    payload = json.loads(text)
    assert json.dumps(payload, indent=2, sort_keys=True) + "\n" == text
    assert payload["columns"][0] == "p"
    assert len(payload["rows"]) == 3


def test_jobs_do_not_change_output_bytes(tmp_path):
    files = []
    for jobs in ("1", "3"):
        out = tmp_path / f"fig5-j{jobs}.csv"
        assert main(["figure", "--figure", "5", "--grid-theta", "7", "--grid-phi", "6",
                     "--jobs", jobs, "--out", str(out)]) == 0
        files.append(out.read_bytes())
    assert files[0] == files[1]


def test_figure7_initial_row_matches_bloch_formula(tmp_path):
    out = tmp_path / "fig7.csv"
    assert main(["figure", "--figure", "7", "--out", str(out)]) == 0
    body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert body[0] == "stage,weight,x,y,z"
    rows = {ln.split(",")[0]: ln.split(",")[1:] for ln in body[1:]}
    x, y, z = (float(v) for v in rows["initial"][1:])
    assert x == pytest.approx(math.cos(1.0155), abs=1e-12)
    assert y == pytest.approx(-math.sin(1.0155) * math.sin(0.8976), abs=1e-12)
    assert z == pytest.approx(math.sin(1.0155) * math.cos(0.8976), abs=1e-12)
    assert set(rows) == {
        "initial", "post_noise", "post_measurement_plus",
        "post_correction_plus", "final_normalized", "final_beta_zero",
    }
    # the beta-extended optimum beats the phase-free one at this point
    meta = dict(ln[2:].split(": ", 1) for ln in out.read_text().splitlines() if ln.startswith("# "))
    assert float(meta["fidelity"]) > float(meta["fidelity_beta_zero"])


def test_figure_dataset_rows_sorted_theta_phi_p():
    metadata, columns, rows = figure_dataset(2, grid_counts=(4, 3))
    assert columns == ["theta", "phi", "p", "delta_f"]
    assert len(rows) == 4 * 3 * 4
    keys = [(r[0], r[1], r[2]) for r in rows]
    assert keys == sorted(keys)
    assert metadata["figure"] == 2


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid_theta": 6, "grid_phi": 5, "format": "json"}))
    out = tmp_path / "s.json"
    assert main(["sweep", "--p", "0.1", "--config", str(cfg), "--out", str(out)]) == 0
    meta = json.loads(out.read_text())["metadata"]
    assert (meta["grid_theta"], meta["grid_phi"]) == (6, 5)

    out2 = tmp_path / "s2.json"
    assert main(["sweep", "--p", "0.1", "--config", str(cfg), "--grid-theta", "7",
                 "--out", str(out2)]) == 0
    assert json.loads(out2.read_text())["metadata"]["grid_theta"] == 7

    bad = tmp_path / "bad.json"
    bad.write_text('{"nope": 1}')
    assert main(["sweep", "--p", "0.1", "--config", str(bad)]) == 3
    assert main(["sweep", "--p", "0.1", "--config", str(tmp_path / "missing.json")]) == 3


def test_snapshot_stdout_and_csv_agree(tmp_path, capsys):
    assert main(["snapshot"] + SHOWCASE_FLAGS) == 0
    text = capsys.readouterr().out
    assert text.startswith("initial: weight=1.000000000000")
    out = tmp_path / "snap.csv"
    assert main(["snapshot"] + SHOWCASE_FLAGS + ["--out", str(out)]) == 0
    body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    stages = [ln.split(",")[0] for ln in body[1:]]
    assert stages == [
        "initial", "post_noise", "post_measurement_plus",
        "post_correction_plus", "final_normalized",
    ]
    final_x = float(body[-1].split(",")[2])
    assert final_x == pytest.approx(0.630786193283, abs=1e-10)


def test_verify_command_reports_and_reruns_identically():
    first = run_cli(["verify"])
    second = run_cli(["verify"])
    assert first.returncode == 0
    assert first.stdout == second.stdout
    pass_lines = [ln for ln in first.stdout.splitlines() if ln.startswith("PASS")]
    assert len(pass_lines) == 10
    assert "10/10 checks passed" in first.stdout


def test_verify_catches_a_perturbed_closed_form(monkeypatch, capsys):
    true_fn = qprotect.fidelity.fidelity_closed
    monkeypatch.setattr(
        qprotect.verify, "fidelity_closed", lambda params: true_fn(params) + 5e-12
    )
    results = {r.name: r for r in run_checks(samples=40)}
    assert not results["closed_vs_simulated"].passed
    assert main(["verify"]) == 1
    out = capsys.readouterr().out
    assert "FAIL closed_vs_simulated" in out


def test_unit_lattice_is_deterministic_and_spread():
    a = unit_lattice(100, 6)
    b = unit_lattice(100, 6)
    assert np.array_equal(a, b)
    assert a.shape == (100, 6)
    assert float(a.min()) >= 0.0 and float(a.max()) < 1.0
    # equidistribution sanity: column means near 1/2
    assert np.all(np.abs(a.mean(axis=0) - 0.5) < 0.1)
    with pytest.raises(ValueError):
        unit_lattice(10, 7)
    with pytest.raises(ValueError):
        unit_lattice(0, 2)


def test_format_value_significant_digits():
    assert format_value(0.1) == "0.1"
    assert format_value(1.0 / 3.0) == "0.333333333333"
    assert format_value(True) == "true"
    assert format_value(np.False_) == "false"
    assert format_value(7) == "7"
    assert format_value("stage") == "stage"


def test_renderers_reject_ragged_rows():
    with pytest.raises(ValueError):
        render_csv({}, ["a", "b"], [(1.0,)])
    with pytest.raises(ValueError):
        render_json({}, ["a", "b"], [(1.0,)])


def test_write_text_is_atomic_and_replaces(tmp_path):
    target = tmp_path / "data.csv"
    write_text(str(target), "first\n")
    write_text(str(target), "second\n")
    assert target.read_text() == "second\n"
    assert [p.name for p in tmp_path.iterdir()] == ["data.csv"]
