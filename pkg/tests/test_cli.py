import json
import os
import subprocess
import sys

import pytest

from crit_cycle import cli, config, experiments
from crit_cycle.errors import IntegrityError
from crit_cycle.io import canonical_hash, fmt, write_csv


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


BATTERY = {"schema_version": 1, "experiment": "battery",
           "protocol": {"family": "power_law", "tau": 20.0},
           "sweep": {"r": [0.5, 1.0, 2.0, 4.0]}}


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(1 / 3) == repr(1 / 3)
    assert float(fmt(2.0 / 7)) == 2.0 / 7
    assert fmt(True) == "true" and fmt(3) == "3" and fmt(None) == ""
    assert fmt(float("nan")) == "nan" and fmt(-float("inf")) == "-inf"


def test_write_csv_atomic(tmp_path):
    path = tmp_path / "sub" / "x.csv"
    write_csv(path, ("a", "b"), [(1, 0.5)])
    assert path.read_text() == "a,b\n1,0.5\n"

    def bad_rows():
        yield (1, 2)
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        write_csv(path, ("a", "b"), bad_rows())
    # the old file survives and no temp file is left behind
    assert path.read_text() == "a,b\n1,0.5\n"
    assert os.listdir(tmp_path / "sub") == ["x.csv"]


def test_canonical_hash_order_independent():
    assert canonical_hash({"a": 1, "b": [1, 2]}) == canonical_hash({"b": [1, 2], "a": 1})


def test_list(capsys):
    assert cli.main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    for kind in config.EXPERIMENTS:
        assert kind in out


def test_validate_ok(tmp_path, capsys):
    assert cli.main(["validate", write_cfg(tmp_path, BATTERY)]) == 0


@pytest.mark.parametrize("patch, needle", [
    ({"sweep": {"kappa": [-0.1]}, "experiment": "noisy_battery"}, "kappa"),
    ({"protocol": {"family": "power_law", "cycles": 0}}, "cycles"),
    ({"schema_version": 2}, "schema_version"),
    ({"sweep": {"r": []}}, "sweep.r"),
    ({"experiment": "plot"}, "experiment"),
    ({"protocol": {"tau": "10"}}, "protocol.tau"),
    ({"extra": 1}, "extra"),
])
def test_validate_errors(tmp_path, capsys, patch, needle):
    cfg = dict(BATTERY, **patch)
    assert cli.main(["validate", write_cfg(tmp_path, cfg)]) == 1
    err = capsys.readouterr().err
    assert "error" in err and needle in err


def test_validate_ceilings(tmp_path, capsys):
    cfg = {"schema_version": 1, "experiment": "wigner", "sweep": {"N": [80]}}
    assert cli.main(["validate", write_cfg(tmp_path, cfg)]) == 1
    assert "ceiling" in capsys.readouterr().err


def test_validate_bad_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert cli.main(["validate", str(p)]) == 1


def test_quasiadiabatic_warning(tmp_path, capsys):
    cfg = {"schema_version": 1, "experiment": "lmg_squeeze",
           "protocol": {"exponent": 2.0, "tau": 16.0}, "sweep": {"N": [100]}}
    assert cli.main(["validate", write_cfg(tmp_path, cfg)]) == 0
    assert "outside quasiadiabatic window" in capsys.readouterr().err
    diag = config.validate(dict(cfg, protocol={"exponent": 2.0, "tau": 2.0}))
    assert diag.ok and not diag.warnings


def test_run_and_manifest(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", write_cfg(tmp_path, BATTERY), "--out", str(out)]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["config_hash"] == canonical_hash(BATTERY)
    assert man["code_version"] and man["wall_time_s"] >= 0
    assert [p["point"]["r"] for p in man["points"]] == [0.5, 1.0, 2.0, 4.0]
    assert all(p["status"] == "ok" for p in man["points"])
    lines = (out / "battery.csv").read_text().splitlines()
    assert lines[0].split(",") == list(experiments.BATTERY_HEADER)
    assert len(lines) == 5
    for p in man["points"]:
        for f in p["files"]:
            assert (out / f).exists()
    assert not [f for f in os.listdir(out) if f.startswith(".tmp")]


def test_determinism_across_jobs(tmp_path):
    cfg = {"schema_version": 1, "experiment": "multi_cycle",
           "protocol": {"exponent": 1.0}, "sweep": {"tau": [10.0, 11.0], "M": [3]}}
    path = write_cfg(tmp_path, cfg)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", path, "--out", str(a), "--jobs", "1"]) == 0
    assert cli.main(["run", path, "--out", str(b), "--jobs", "2"]) == 0
    assert (a / "multi_cycle.csv").read_bytes() == (b / "multi_cycle.csv").read_bytes()


def test_env_jobs(monkeypatch):
    monkeypatch.setenv("CRIT_CYCLE_JOBS", "3")
    assert cli.default_jobs() == 3
    monkeypatch.setenv("CRIT_CYCLE_JOBS", "many")
    assert cli.default_jobs() == 1
    monkeypatch.delenv("CRIT_CYCLE_JOBS")
    assert cli.default_jobs() == 1


def test_partial_failure_exit_code(tmp_path, monkeypatch, capsys):
    real = experiments.RUNNERS["cycle"]

    def flaky(cfg, point):
        if point["r"] == 2.0:
            raise IntegrityError("synthetic failure")
        return real[0](cfg, point)

    monkeypatch.setitem(experiments.RUNNERS, "cycle", (flaky, real[1]))
    cfg = {"schema_version": 1, "experiment": "cycle", "protocol": {"tau": 5.0},
           "sweep": {"r": [1.0, 2.0, 4.0]}}
    out = tmp_path / "o"
    assert cli.main(["run", write_cfg(tmp_path, cfg), "--out", str(out), "--jobs", "1"]) == 2
    man = json.loads((out / "manifest.json").read_text())
    assert [p["status"] for p in man["points"]] == ["ok", "failed", "ok"]
    assert "synthetic failure" in man["points"][1]["error"]
    assert man["n_failed"] == 1
    assert len((out / "cycle.csv").read_text().splitlines()) == 3


def test_run_invalid_config_exit(tmp_path):
    cfg = dict(BATTERY, sweep={"r": [-1.0]})
    assert cli.main(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "x")]) == 1
    assert not (tmp_path / "x").exists()


def test_sweep_order_fixed():
    cfg = config.parse({"schema_version": 1, "experiment": "lmg_noise",
                        "sweep": {"kappa": [0.0, 0.1], "N": [10, 20], "r": [2.0]}})
    pts = list(cfg.points())
    assert [(p["N"], p["kappa"]) for p in pts] == [(10, 0.0), (10, 0.1), (20, 0.0), (20, 0.1)]


@pytest.mark.parametrize("kind", sorted(config.EXPERIMENTS))
def test_every_kind_runs(tmp_path, kind):
    cfg = {"schema_version": 1, "experiment": kind,
           "protocol": {"exponent": 2.0, "tau": 2.0, "cycles": 2},
           "sweep": {"N": [8], "kappa": [0.01]}, "numerics": {"grid": [9, 17]}}
    out = tmp_path / kind
    assert cli.main(["run", write_cfg(tmp_path, cfg), "--out", str(out)]) == 0
    assert (out / f"{kind}.csv").exists()


def test_console_script(tmp_path):
    res = subprocess.run([sys.executable, "-m", "crit_cycle", "list-experiments"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "lmg_squeeze" in res.stdout
