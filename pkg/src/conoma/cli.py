"""Command-line experiment runner.

    conoma mop-curve        --config cfg.yaml --out mop.csv
    conoma outage-capacity  --config cfg.yaml --out cap.csv
    conoma table2           --config cfg.yaml --out table2.csv
    conoma validate         --config cfg.yaml --out report.json

Every CSV starts with ``#`` comment lines carrying the command, config digest,
seed and tool version; timestamps go to a ``<out>.manifest.json`` sidecar so
the CSV itself is byte-identical across reruns.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .model import PowerAllocation, RateTargets, Scheme
from .optimize import optimize_cnpa_k2, optimize_cnsa_k2
from .simulate import ExperimentConfig, outage_capacity_curve, run_experiment

DEFAULTS = {
    "seed": 2021,
    "trials": 500_000,
    "chunk": 100_000,
    "grid_step": 0.005,
    "coeff_range": [0.5, 0.995],
    "mop_curve": {
        "rate": 1.0,
        "rho_db": [0, 3, 6, 9, 12, 15, 18, 21],
        "cnsa_fixed": 0.8,
    },
    "outage_capacity": {
        "rho_db": [8, 15],
        "rate_min": 0.1,
        "rate_max": 4.0,
        "rate_step": 0.05,
        "cnsa_fixed": [0.8, 0.51],
        "cnpa_reoptimize": True,
    },
    "table2": {
        "rates": [1, 2],
        "rho_db": [0, 3, 6, 9, 12, 15, 18, 21],
    },
    "validate": {
        "p_strong": 0.8,
        "rate": 1.0,
        "rho_db": [0, 12, 21],
        "trials": 1_000_000,
        "hypoexp_sets": 20,
        "symmetry_sets": 200,
        "diversity_rho_db": [18, 20, 22, 24, 26, 28, 30],
    },
}


class UsageError(ValueError):
    pass


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in (over or {}).items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: str | None, seed: int | None = None, trials: int | None = None) -> dict:
    user = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        user = yaml.safe_load(text) or {}
        if not isinstance(user, dict):
            raise UsageError("config must be a mapping")
    cfg = _merge(DEFAULTS, user)
    if seed is not None:
        cfg["seed"] = int(seed)
    if trials is not None:
        cfg["trials"] = int(trials)
    return cfg


def config_digest(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config_digest: str
    seed: int
    version: str
    started: str
    finished: str = ""
    outputs: list[str] = field(default_factory=list)


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _grid(values, name) -> list[float]:
    vals = [float(v) for v in np.atleast_1d(values)] if values is not None else []
    if not vals:
        raise UsageError(f"{name} must not be empty")
    return vals


def _rows_to_csv(header: list[str], rows: list[list], manifest: RunManifest) -> str:
    buf = io.StringIO()
    buf.write(f"# command={manifest.command}\n")
    buf.write(f"# config_digest={manifest.config_digest}\n")
    buf.write(f"# seed={manifest.seed}\n")
    buf.write(f"# version={manifest.version}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands return (header, rows, failures)


def cmd_mop_curve(cfg: dict):
    sec = cfg["mop_curve"]
    grid = _grid(sec["rho_db"], "mop_curve.rho_db")
    rates = RateTargets.uniform(sec["rate"], 2)
    step, rng = cfg["grid_step"], tuple(cfg["coeff_range"])
    seed, trials, chunk = cfg["seed"], cfg["trials"], cfg["chunk"]
    rows, failures = [], []
    for idx, db in enumerate(grid):
        def mc(scheme, alloc):
            conf = ExperimentConfig(scheme, alloc, (db,), rates, trials, seed + idx, chunk)
            return run_experiment(conf)[0][1]

        try:
            pa = optimize_cnpa_k2(db, rates, step, rng)
            st = mc(Scheme.CNPA, PowerAllocation.two_user(1 - pa.best_coeff, pa.best_coeff))
            flag = "" if pa.feasible else "infeasible"
            rows.append([db, "CN-PA", pa.best_coeff, pa.best_mop, st.mop, st.mop_se, flag])

            sa = optimize_cnsa_k2(db, rates, trials, step, rng, seed=seed + idx, chunk=chunk)
            # evaluate on a fresh stream so the reported MOP is not the noisy minimum
            conf = ExperimentConfig(
                Scheme.CNSA, PowerAllocation.two_user(1 - sa.best_coeff, sa.best_coeff, scheme=Scheme.CNSA),
                (db,), rates, trials, seed + idx + 7919, chunk,
            )
            st = run_experiment(conf)[0][1]
            rows.append([db, "CN-SA-opt", sa.best_coeff, "", st.mop, st.mop_se, "" if sa.feasible else "infeasible"])

            fx = float(sec["cnsa_fixed"])
            st = mc(Scheme.CNSA, PowerAllocation.two_user(1 - fx, fx, scheme=Scheme.CNSA))
            rows.append([db, "CN-SA", fx, "", st.mop, st.mop_se, ""])

            st = mc(Scheme.OMA, None)
            rows.append([db, "OMA", "", "", st.mop, st.mop_se, ""])
        except (ValueError, ArithmeticError) as exc:
            failures.append(f"rho_db={db}: {exc}")
    header = ["rho_db", "scheme", "coeff", "mop_analytic", "mop_mc", "mop_se", "flag"]
    return header, rows, failures


def _rate_grid(sec) -> np.ndarray:
    lo, hi, step = float(sec["rate_min"]), float(sec["rate_max"]), float(sec["rate_step"])
    if step <= 0 or hi < lo or lo <= 0:
        raise UsageError("rate grid needs 0 < rate_min <= rate_max and rate_step > 0")
    n = int(np.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 10)


def cmd_outage_capacity(cfg: dict):
    sec = cfg["outage_capacity"]
    grid = _grid(sec["rho_db"], "outage_capacity.rho_db")
    rates_grid = _rate_grid(sec)
    seed, trials, chunk = cfg["seed"], cfg["trials"], cfg["chunk"]
    dummy = RateTargets.uniform(1.0, 2)
    rows, failures = [], []
    for idx, db in enumerate(grid):
        try:
            runs = []
            conf = ExperimentConfig(Scheme.CNPA, PowerAllocation.two_user(0.2), (db,), dummy, trials, seed + idx, chunk)
            runs.append(("CN-PA-opt" if sec["cnpa_reoptimize"] else "CN-PA",
                         outage_capacity_curve(conf, rates_grid, reoptimize=bool(sec["cnpa_reoptimize"]))))
            for fx in np.atleast_1d(sec["cnsa_fixed"]):
                fx = float(fx)
                alloc = PowerAllocation.two_user(1 - fx, fx, scheme=Scheme.CNSA)
                conf = ExperimentConfig(Scheme.CNSA, alloc, (db,), dummy, trials, seed + idx, chunk)
                runs.append((f"CN-SA-{_fmt(fx)}", outage_capacity_curve(conf, rates_grid)))
            conf = ExperimentConfig(Scheme.OMA, None, (db,), dummy, trials, seed + idx, chunk)
            runs.append(("OMA", outage_capacity_curve(conf, rates_grid)))
            for name, curve in runs:
                rows.extend([db, name, r, q] for r, q in curve)
        except (ValueError, ArithmeticError) as exc:
            failures.append(f"rho_db={db}: {exc}")
    return ["rho_db", "scheme", "rate", "non_outage"], rows, failures


def cmd_table2(cfg: dict):
    sec = cfg["table2"]
    grid = _grid(sec["rho_db"], "table2.rho_db")
    step, rng = cfg["grid_step"], tuple(cfg["coeff_range"])
    rows, failures = [], []
    for r in sec["rates"]:
        rates = RateTargets.uniform(r, 2)
        for db in grid:
            try:
                pa = optimize_cnpa_k2(db, rates, step, rng)
                rows.append([r, "CN-PA", db, pa.best_coeff, pa.best_mop])
            except (ValueError, ArithmeticError) as exc:
                failures.append(f"R={r} CN-PA rho_db={db}: {exc}")
        for i, db in enumerate(grid):
            try:
                sa = optimize_cnsa_k2(db, rates, cfg["trials"], step, rng, seed=cfg["seed"] + i, chunk=cfg["chunk"])
                rows.append([r, "CN-SA", db, sa.best_coeff, sa.best_mop])
            except (ValueError, ArithmeticError) as exc:
                failures.append(f"R={r} CN-SA rho_db={db}: {exc}")
    return ["rate", "scheme", "rho_db", "optimal_coeff", "mop_at_optimum"], rows, failures


def cmd_validate(cfg: dict) -> dict:
    from .validation import run_checks

    return run_checks(cfg)


COMMANDS = {
    "mop-curve": cmd_mop_curve,
    "outage-capacity": cmd_outage_capacity,
    "table2": cmd_table2,
    "validate": cmd_validate,
}


def _error(kind: str, msg: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": msg}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="conoma", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML or JSON config file (defaults built in)")
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--trials", type=int, help="override trials per grid point")
    args = parser.parse_args(argv)

    started = datetime.now(timezone.utc).isoformat()
    try:
        cfg = load_config(args.config, args.seed, args.trials)
        manifest = RunManifest(args.command, config_digest(cfg), int(cfg["seed"]), __version__, started)
        result = COMMANDS[args.command](cfg)
    except UsageError as exc:
        return _error("usage", str(exc), 2)
    except (ValueError, ArithmeticError, KeyError, TypeError, yaml.YAMLError) as exc:
        return _error(type(exc).__name__, str(exc), 2)

    if args.command == "validate":
        text = json.dumps(result, indent=2, sort_keys=True) + "\n"
        failures = [c["name"] for c in result["checks"] if not c["passed"]]
    else:
        header, rows, failures = result
        text = _rows_to_csv(header, rows, manifest)

    if args.out:
        Path(args.out).write_text(text)
        manifest.outputs.append(str(args.out))
        manifest.finished = datetime.now(timezone.utc).isoformat()
        Path(str(args.out) + ".manifest.json").write_text(json.dumps(asdict(manifest), indent=2) + "\n")
    else:
        sys.stdout.write(text)
    for f in failures:
        print(f"FAILED: {f}", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
