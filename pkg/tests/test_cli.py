import csv
import json

import pytest

from conoma import __version__
from conoma.cli import config_digest, load_config, main

SMALL = """\
seed: 5
trials: 4000
chunk: 1500
mop_curve:
  rho_db: [0, 12]
outage_capacity:
  rho_db: [15]
  rate_min: 0.2
  rate_max: 1.0
  rate_step: 0.2
table2:
  rates: [1]
  rho_db: [0, 9]
"""

REORDERED = """\
table2:
  rho_db: [0, 9]
  rates: [1]
outage_capacity:
  rate_step: 0.2
  rate_max: 1.0
  rate_min: 0.2
  rho_db: [15]
mop_curve:
  rho_db: [0, 12]
chunk: 1500
trials: 4000
seed: 5
"""


def run(tmp_path, name, *args, text=SMALL):
    cfg = tmp_path / f"{name}.yaml"
    cfg.write_text(text)
    out = tmp_path / f"{name}.csv"
    code = main([*args, "--config", str(cfg), "--out", str(out)])
    return code, out


def data_rows(path):
    lines = path.read_text().splitlines()
    return [line for line in lines if not line.startswith("#")]


def test_digest_stable_under_key_reordering(tmp_path):
    a, b = tmp_path / "a.yaml", tmp_path / "b.yaml"
    a.write_text(SMALL)
    b.write_text(REORDERED)
    assert config_digest(load_config(str(a))) == config_digest(load_config(str(b)))
    assert config_digest(load_config(str(a))) != config_digest(load_config(str(a), seed=6))


def test_mop_curve_csv(tmp_path):
    code, out = run(tmp_path, "m", "mop-curve")
    assert code == 0
    text = out.read_text()
    head = text.splitlines()[:4]
    assert head[0] == "# command=mop-curve"
    assert head[1].startswith("# config_digest=")
    assert head[2] == "# seed=5"
    assert head[3] == f"# version={__version__}"
    rows = list(csv.DictReader(data_rows(out)))
    assert [r["scheme"] for r in rows[:4]] == ["CN-PA", "CN-SA-opt", "CN-SA", "OMA"]
    assert len(rows) == 8
    for r in rows:
        if r["scheme"] == "CN-PA":
            assert abs(float(r["mop_analytic"]) - float(r["mop_mc"])) <= 3 * float(r["mop_se"]) + 1e-12
        else:
            assert r["mop_analytic"] == ""
    manifest = json.loads((tmp_path / "m.csv.manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["outputs"] == [str(out)]
    assert manifest["started"] <= manifest["finished"]


def test_rerun_is_byte_identical(tmp_path):
    _, a = run(tmp_path, "a", "table2")
    _, b = run(tmp_path, "b", "table2")
    assert a.read_bytes() == b.read_bytes()


def test_worker_count_is_invisible(tmp_path, monkeypatch):
    monkeypatch.setenv("CONOMA_WORKERS", "1")
    _, a = run(tmp_path, "a", "outage-capacity")
    monkeypatch.setenv("CONOMA_WORKERS", "4")
    _, b = run(tmp_path, "b", "outage-capacity")
    assert data_rows(a) == data_rows(b)


def test_outage_capacity_monotone(tmp_path):
    code, out = run(tmp_path, "c", "outage-capacity")
    assert code == 0
    rows = list(csv.DictReader(data_rows(out)))
    schemes = {r["scheme"] for r in rows}
    assert schemes == {"CN-PA-opt", "CN-SA-0.8", "CN-SA-0.51", "OMA"}
    for s in schemes:
        q = [float(r["non_outage"]) for r in rows if r["scheme"] == s]
        assert all(b <= a for a, b in zip(q, q[1:]))


def test_table2_rows(tmp_path):
    code, out = run(tmp_path, "t", "table2")
    assert code == 0
    rows = list(csv.DictReader(data_rows(out)))
    pa = {float(r["rho_db"]): float(r["optimal_coeff"]) for r in rows if r["scheme"] == "CN-PA"}
    assert pa == {0.0: 0.995, 9.0: 0.81}
    assert sum(r["scheme"] == "CN-SA" for r in rows) == 2


def test_seed_and_trials_override(tmp_path):
    cfg = tmp_path / "s.yaml"
    cfg.write_text(SMALL)
    out = tmp_path / "s.csv"
    assert main(["table2", "--config", str(cfg), "--out", str(out), "--seed", "11", "--trials", "2000"]) == 0
    assert "# seed=11" in out.read_text()


def test_empty_grid_is_usage_error(tmp_path, capsys):
    code, out = run(tmp_path, "e", "mop-curve", text=SMALL + "mop_curve:\n  rho_db: []\n")
    assert code == 2
    assert not out.exists()
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "usage"


def test_unreadable_config(tmp_path, capsys):
    assert main(["table2", "--config", str(tmp_path / "missing.yaml")]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "usage"


def test_validate_sabotaged_allocation(tmp_path, capsys):
    code, out = run(tmp_path, "v", "validate", text="validate:\n  p_strong: 1.0\n")
    assert code == 2
    assert not out.exists()
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValueError" and err["message"]


@pytest.mark.slow
def test_validate_default_passes(tmp_path):
    code, out = run(tmp_path, "v", "validate", text="validate:\n  trials: 200000\n")
    report = json.loads(out.read_text())
    assert code == 0, report
    assert report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert {"diversity_weak", "diversity_strong", "mop_bound_mc", "mop_bound_analytic"} <= names
    for c in report["checks"]:
        if c["name"].startswith("diversity"):
            assert abs(c["measured"] - 2) <= 0.3
