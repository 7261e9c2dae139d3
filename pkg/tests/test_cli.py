import csv
import json
import subprocess
import sys

import pytest

from udn_sg import cli, sweep
from udn_sg.analytic import Scenario
from udn_sg.errors import DomainError
from udn_sg.geometry import Deployment
from udn_sg.pathloss import PathLossModel


def _config(tmp_path, **over):
    cfg = {
        "version": 1,
        "name": "t",
        "scenario": {"deployment": {"kind": "line", "dimension": 1},
                     "model": {"kind": "l1", "h": 0.5, "alpha": 2.0}},
        "axes": {"density": [0.5, 2.0], "T": [0.5, 1.0]},
        "quantities": ["coverage", "rate"],
        "methods": ["analytic", "closed_form", "mc"],
        "mc": {"trials": 1500, "seed": 3},
        "output_dir": str(tmp_path / "out"),
    }
    cfg.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_writes_csv_per_quantity(tmp_path):
    assert cli.main(["sweep", "--config", str(_config(tmp_path))]) == 0
    cov = _read(tmp_path / "out" / "t_coverage.csv")
    assert len(cov) == 4
    assert list(cov[0])[:9] == list(sweep.AXIS_COLUMNS)
    for row in cov:
        assert float(row["analytic"]) == pytest.approx(float(row["closed_form"]), rel=1e-9)
        assert abs(float(row["mc"]) - float(row["analytic"])) < 3 * float(row["mc_ci95"])
    rate = _read(tmp_path / "out" / "t_rate.csv")
    assert len(rate) == 2 and all(r["mc_ci95"] for r in rate)


def test_sweep_is_byte_identical_and_thread_independent(tmp_path):
    cfg = _config(tmp_path)
    assert cli.main(["sweep", "--config", str(cfg)]) == 0
    first = (tmp_path / "out" / "t_coverage.csv").read_bytes()
    assert cli.main(["sweep", "--config", str(cfg), "--threads", "2"]) == 0
    assert (tmp_path / "out" / "t_coverage.csv").read_bytes() == first


def test_seed_and_output_overrides(tmp_path, monkeypatch):
    cfg = _config(tmp_path, quantities=["coverage"], methods=["mc"])
    monkeypatch.setenv(sweep.ENV_OUTPUT_DIR, str(tmp_path / "env"))
    assert cli.main(["sweep", "--config", str(cfg), "--seed", "9"]) == 0
    a = _read(tmp_path / "env" / "t_coverage.csv")
    assert cli.main(["sweep", "--config", str(cfg), "--seed", "10", "--out", str(tmp_path / "flag")]) == 0
    b = _read(tmp_path / "flag" / "t_coverage.csv")
    assert [r["mc"] for r in a] != [r["mc"] for r in b]


def test_isd_axis(tmp_path):
    cfg = _config(tmp_path, axes={"isd": [2.0], "T": [1.0]}, quantities=["coverage"], methods=["analytic"])
    assert cli.main(["sweep", "--config", str(cfg)]) == 0
    row = _read(tmp_path / "out" / "t_coverage.csv")[0]
    assert float(row["density"]) == pytest.approx(0.5)
    assert float(row["isd"]) == pytest.approx(2.0)


def test_invalid_config_exit_code(tmp_path, capsys):
    cfg = _config(tmp_path, axes={"isd": [1.0], "density": [1.0], "T": [1.0]})
    assert cli.main(["sweep", "--config", str(cfg)]) == 1
    assert "mutually exclusive" in capsys.readouterr().err
    with pytest.raises(DomainError):
        sweep.SweepConfig(Scenario(Deployment("ppp", 2, 1.0), PathLossModel("l0", 0, 4.0)))


def test_partial_results_flushed_on_failure(tmp_path, capsys):
    cfg = _config(tmp_path,
                  scenario={"deployment": {"kind": "ppp", "dimension": 2},
                            "model": {"kind": "l2", "h": 0.5, "alpha": 4.0}},
                  quantities=["coverage"], methods=["analytic", "mc"])
    assert cli.main(["sweep", "--config", str(cfg)]) == 1
    assert "UnsupportedCaseError" in capsys.readouterr().err
    rows = _read(tmp_path / "out" / "t_coverage.csv")
    assert len(rows) == 4 and all(r["mc"] and not r["analytic"] for r in rows)


def test_unknown_figure():
    with pytest.raises(SystemExit):
        cli.main(["figure", "fig9"])
    with pytest.raises(DomainError):
        sweep.reproduce_figure("fig9", ".")


def test_check_subset(capsys):
    assert cli.main(["check", "--only", "2"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]  2" in out and "1/1 criteria passed" in out


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "udn_sg.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "figure" in res.stdout


def test_figure_outputs(tmp_path):
    assert cli.main(["figure", "fig6", "--out", str(tmp_path)]) == 0
    for ext in ("csv", "dat", "gp"):
        assert (tmp_path / f"fig6.{ext}").stat().st_size > 0
    gp = (tmp_path / "fig6.gp").read_text()
    assert "'fig6.dat' index 1" in gp and "limit" in gp
    rows = sweep.read_rows(tmp_path / "fig6.csv")
    line = sorted((r for r in rows if r["deployment"] == "line"), key=lambda r: r["density"])
    assert line[-1]["analytic"] == pytest.approx(0.4592, rel=1e-3)


def test_invariant_rate_cache_matches_direct():
    from udn_sg import rate
    s = Scenario(Deployment("hex", 2, 3.0), PathLossModel("l1", 0.2, 4.0))
    row = sweep.evaluate_task(("rate", s, "analytic", (), None, 0))[0]
    assert row["value"] == pytest.approx(rate.ergodic_rate(s, "quadrature").value, rel=1e-10)
