import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from bergmann2d import cli

GAUSS = {"mode": "TM", "ell": 1.0,
         "profile": {"kind": "gaussian_exp", "z_eps": 0.4, "z_mu": 0.4, "kappa": 1.0, "L": 5.0}}
VACUUM = {"mode": "TE", "ell": 1.0, "profile": {"kind": "slab"}}


@pytest.fixture
def write_json(tmp_path):
    def _w(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return _w


def read_csv(path):
    with open(path) as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


def test_vacuum_amplitude_is_zero(write_json, tmp_path):
    out = tmp_path / "amp.csv"
    assert cli.main(["amplitude", "--medium", write_json("v.json", VACUUM), "--theta-grid", "9", "--out", str(out)]) == 0
    head, rows = read_csv(out)
    assert head == ["theta_deg", "re_f", "im_f", "|f|^2"]
    assert len(rows) == 9
    assert all(float(v) == 0 for r in rows for v in r[1:])
    assert (tmp_path / "amp_dirac.csv").exists()


def test_amplitude_uses_twelve_significant_digits(write_json, tmp_path):
    out = tmp_path / "amp.csv"
    cli.main(["amplitude", "--medium", write_json("g.json", GAUSS), "--theta-grid", "5", "--out", str(out)])
    _, rows = read_csv(out)
    mant = rows[2][1].split("e")[0].lstrip("-")
    assert len(mant.replace(".", "")) == 12


def test_oracle_reports_small_discrepancy(write_json, tmp_path):
    out = tmp_path / "oracle.csv"
    rc = cli.main(["oracle", "--medium", write_json("g.json", GAUSS), "--k", "0.1", "--theta-grid", "7",
                   "--out", str(out)])
    assert rc == 0
    summary = [line for line in out.read_text().splitlines() if line.startswith("# max_discrepancy")]
    assert float(summary[0].split(",")[1]) < 1e-6


def test_grating_brewster_table(capsys):
    assert cli.main(["grating", "--brewster", "--k", "2.5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    head = lines[0].split(",")
    row = dict(zip(head, next(line.split(",") for line in lines[1:] if line.startswith("0,-1"))))
    assert abs(float(row["re_tau1"]) - 7.48) < 0.005
    assert abs(float(row["im_tau2"]) - 11.15) < 0.005


def test_figure4_contains_paper_point(tmp_path):
    assert cli.main(["figures", "--which", "4", "--outdir", str(tmp_path)]) == 0
    head, rows = read_csv(tmp_path / "fig4.csv")
    kl = np.array([float(r[0]) for r in rows])
    i = int(np.argmin(np.abs(kl - 0.1)))
    assert abs(kl[i] - 0.1) < 1e-12
    assert abs(float(rows[i][head.index("re_order1")]) - 0.748) < 5e-4
    assert (tmp_path / "fig4.svg").read_text().startswith("<")


def test_figures_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d, threads in ((a, "1"), (b, "3")):
        assert cli.main(["figures", "--which", "3", "5", "--outdir", str(d), "--threads", threads]) == 0
    for name in ("fig3.csv", "fig5.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cloak_default_design(tmp_path):
    out = tmp_path / "cloak.csv"
    assert cli.main(["cloak", "--out", str(out)]) == 0
    head, rows = read_csv(out)
    assert head[-1] == "feasible" and len(rows) == 21
    for r in rows:
        rec = dict(zip(head, r))
        assert abs(float(rec["re_eps_plus"]) - 0.87) < 0.005
        assert float(rec["im_eps_plus"]) < 0 < float(rec["im_eps_minus"])
        assert float(rec["residual_1"]) < 1e-8 and float(rec["residual_2"]) < 1e-8
        assert rec["feasible"] == "1"


def test_selftest_passes(capsys):
    assert cli.main(["selftest", "--trials", "5"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["grating_duality_max_rel"] < 1e-9


def test_config_round_trip(capsys, tmp_path):
    assert cli.main(["amplitude", "--k", "0.7", "--dump-config"]) == 0
    dumped = json.loads(capsys.readouterr().out)
    assert dumped["k"] == 0.7
    assert cli.RunConfig.from_dict(dumped).to_dict() == dumped
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(dumped))
    assert cli.main(["amplitude", "--config", str(cfg_path), "--order", "1", "--dump-config"]) == 0
    again = json.loads(capsys.readouterr().out)
    assert again["k"] == 0.7 and again["order"] == 1


def test_invalid_inputs_give_json_errors(capsys, tmp_path, write_json):
    assert cli.main(["amplitude", "--medium", str(tmp_path / "missing.json")]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigInvalid" and err["exit_code"] == 2
    bad = write_json("bad.json", {"mode": "TM", "ell": 1.0, "profile": {"kind": "torus"}})
    assert cli.main(["amplitude", "--medium", bad]) == 2
    cfg = write_json("cfg.json", {"k": 1.0, "bogus": 3})
    assert cli.main(["amplitude", "--config", cfg]) == 2
    json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bergmann2d", "grating", "--brewster", "--k", "2.5"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("j,sign,theta_deg")
