"""Grid search for MOP-minimising two-user power coefficients."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .analytic import MopK2Params, mop_closed_form_k2
from .model import RateTargets, Scheme
from .simulate import DEFAULT_CHUNK, DEFAULT_TRIALS, db_to_linear, mop_grid_k2

DEFAULT_STEP = 0.005
DEFAULT_RANGE = (0.5, 0.995)
# MOP values equal up to rounding are ties, resolved toward the
# larger dominant coefficient (wider power gap eases SIC).
TIE_TOL = 1e-12


@dataclass(frozen=True)
class OptimizationResult:
    scheme: Scheme
    rho_db: float
    rates: RateTargets
    best_coeff: float
    best_mop: float
    grid_step: float
    evaluations: int
    wall_time: float
    feasible: bool = True


def coeff_grid(step: float = DEFAULT_STEP, lo: float = DEFAULT_RANGE[0], hi: float = DEFAULT_RANGE[1]) -> np.ndarray:
    if step <= 0:
        raise ValueError("grid step must be positive")
    n = int(np.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 10)


def _pick(grid: np.ndarray, mops: np.ndarray, tie_tol: float) -> int:
    ok = np.flatnonzero(mops <= mops.min() + tie_tol)
    return int(ok[-1])


def optimize_cnpa_k2(
    rho_db: float,
    rates: RateTargets,
    grid_step: float = DEFAULT_STEP,
    coeff_range: tuple[float, float] = DEFAULT_RANGE,
    tie_tol: float = TIE_TOL,
) -> OptimizationResult:
    """Strong-user coefficient p_2^2 minimising the closed-form MOP."""
    t0 = time.perf_counter()
    grid = coeff_grid(grid_step, *coeff_range)
    rho = float(db_to_linear(rho_db))
    phi1, phi2 = rates.phi
    mops = np.array([mop_closed_form_k2(MopK2Params(c, 1 - c, rho, phi1, phi2)) for c in grid])
    i = _pick(grid, mops, tie_tol)
    return OptimizationResult(
        Scheme.CNPA, float(rho_db), rates, float(grid[i]), float(mops[i]), grid_step,
        grid.size, time.perf_counter() - t0, feasible=bool(mops.min() < 1.0),
    )


def optimize_cnsa_k2(
    rho_db: float,
    rates: RateTargets,
    trials: int = DEFAULT_TRIALS,
    grid_step: float = DEFAULT_STEP,
    coeff_range: tuple[float, float] = DEFAULT_RANGE,
    seed: int = 0,
    chunk: int = DEFAULT_CHUNK,
    workers: int | None = None,
) -> OptimizationResult:
    """Weak-user coefficient p_1^2 minimising the simulated conventional MOP.

    All grid points see the same realizations. Equal counts resolve toward
    the larger coefficient.
    """
    t0 = time.perf_counter()
    grid = coeff_grid(grid_step, *coeff_range)
    r = rates.r
    if not np.allclose(r, r[0]):
        raise ValueError("the simulated optimizer supports equal rates only")
    counts = mop_grid_k2(Scheme.CNSA, grid, rho_db, [r[0]], trials, seed, 0, chunk, workers)[:, 0]
    mops = counts / trials
    i = _pick(grid, counts.astype(float), 0.0)
    return OptimizationResult(
        Scheme.CNSA, float(rho_db), rates, float(grid[i]), float(mops[i]), grid_step,
        grid.size * trials, time.perf_counter() - t0, feasible=bool(mops.min() < 1.0),
    )


def runtime_comparison(rho_db: float, rates: RateTargets, trials: int = DEFAULT_TRIALS, **kw) -> tuple[float, float]:
    """Wall-clock seconds of the closed-form and simulated optimizers."""
    cf = optimize_cnpa_k2(rho_db, rates)
    mc = optimize_cnsa_k2(rho_db, rates, trials=trials, **kw)
    return cf.wall_time, mc.wall_time
