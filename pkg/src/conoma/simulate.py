"""Seeded Monte-Carlo estimation of per-user outage and mutual outage.

Each (seed, grid index, chunk index) triple owns an independent counter-based
Philox stream, so results do not depend on how chunks are spread over
workers. Every trial takes its K direct gains and all inter-user gains from
one row of a single draw; a shorter run therefore sees exactly the first
trials of a longer one.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import (
    NetworkRealization,
    PowerAllocation,
    RateTargets,
    Scheme,
    relay_pairs,
    sinr,
    thresholds,
)

DEFAULT_TRIALS = 500_000
DEFAULT_CHUNK = 100_000
WORKERS_ENV = "CONOMA_WORKERS"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer")
        return n
    return max(1, min(8, os.cpu_count() or 1))


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def draw_realization(rng: np.random.Generator, k: int, size: int | None = None) -> NetworkRealization:
    """Rayleigh block-fading draw: sorted direct gains plus one gain per relay link."""
    pairs = relay_pairs(k)
    n = 1 if size is None else int(size)
    raw = rng.standard_exponential((n, k + len(pairs)))
    h = np.sort(raw[:, :k], axis=1)
    g = {pair: raw[:, k + i] for i, pair in enumerate(pairs)}
    if size is None:
        h = h[0]
        g = {pair: v[0] for pair, v in g.items()}
    return NetworkRealization(h, g)


def chunk_sizes(trials: int, chunk: int) -> list[int]:
    full, rest = divmod(int(trials), int(chunk))
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(fn, seed: int, key: int, trials: int, chunk: int, k: int, workers: int | None = None) -> list:
    """Apply ``fn(realization)`` to every chunk of stream ``key``; results in chunk order."""
    sizes = chunk_sizes(trials, chunk)

    def task(idx):
        return fn(draw_realization(stream(seed, key, idx), k, sizes[idx]))

    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(sizes) == 1:
        return [task(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(len(sizes))))


@dataclass(frozen=True)
class ExperimentConfig:
    """One scheme and allocation swept over a grid of transmit SNRs (dB)."""

    scheme: Scheme
    alloc: PowerAllocation | None
    rho_db: tuple[float, ...]
    rates: RateTargets
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    chunk: int = DEFAULT_CHUNK
    k: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        object.__setattr__(self, "rho_db", tuple(float(r) for r in np.atleast_1d(self.rho_db)))
        k = self.k or (self.alloc.k if self.alloc is not None else self.rates.k)
        object.__setattr__(self, "k", int(k))
        if not self.rho_db:
            raise ValueError("rho grid must not be empty")
        if self.trials < 1000:
            raise ValueError("need at least 1000 trials per grid point")
        if self.chunk < 1:
            raise ValueError("chunk must be positive")
        if self.rates.k != self.k:
            raise ValueError("one target rate per user required")
        if self.scheme is not Scheme.OMA:
            if self.alloc is None or self.alloc.k != self.k:
                raise ValueError(f"{self.scheme.value} needs a {self.k}-user power allocation")
            self.alloc.check_order(descending=self.scheme is Scheme.CNSA)

    @property
    def rho_linear(self) -> np.ndarray:
        return db_to_linear(np.array(self.rho_db))


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class OutageStats:
    """Outage counts over ``trials`` realizations at one SNR."""

    user_counts: tuple[int, ...]
    mop_count: int
    trials: int

    @property
    def per_user_outage(self) -> np.ndarray:
        return np.array(self.user_counts) / self.trials

    @property
    def per_user_se(self) -> np.ndarray:
        p = self.per_user_outage
        return np.sqrt(p * (1 - p) / self.trials)

    @property
    def mop(self) -> float:
        return self.mop_count / self.trials

    @property
    def mop_se(self) -> float:
        p = self.mop
        return float(np.sqrt(p * (1 - p) / self.trials))

    def bound_violations(self, nsigma: float = 3.0) -> list[int]:
        """Users whose outage exceeds the MOP by more than ``nsigma`` errors."""
        # MOP counts the union, so this is exact for counts; the slack covers
        # comparisons between independently estimated quantities.
        slack = nsigma * (self.mop_se + self.per_user_se)
        return [i + 1 for i, p in enumerate(self.per_user_outage) if p > self.mop + slack[i]]


def outage_indicators(config: ExperimentConfig, net: NetworkRealization, rho: float) -> np.ndarray:
    """Boolean (trials, K) outage indicators for one batch of realizations."""
    return sinr(config.scheme, config.alloc, net, rho).outage(thresholds(config.scheme, config.rates))


def trial_indicators(config: ExperimentConfig, rho_index: int = 0) -> np.ndarray:
    """All per-trial outage indicators at one grid point, in trial order."""
    rho = float(config.rho_linear[rho_index])
    parts = map_chunks(
        lambda net: outage_indicators(config, net, rho),
        config.seed, rho_index, config.trials, config.chunk, config.k, workers=1,
    )
    return np.concatenate(parts, axis=0)


def _counts(ind: np.ndarray) -> np.ndarray:
    return np.concatenate([ind.sum(axis=0), [ind.any(axis=1).sum()]]).astype(np.int64)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list[tuple[float, OutageStats]]:
    """Outage statistics at every SNR of the grid."""
    out = []
    for idx, (db, rho) in enumerate(zip(config.rho_db, config.rho_linear)):
        parts = map_chunks(
            lambda net, rho=rho: _counts(outage_indicators(config, net, rho)),
            config.seed, idx, config.trials, config.chunk, config.k, workers,
        )
        tot = np.sum(parts, axis=0)
        out.append((db, OutageStats(tuple(int(c) for c in tot[:-1]), int(tot[-1]), config.trials)))
    return out


def mop_grid_k2(
    scheme: Scheme,
    coeffs,
    rho_db: float,
    rates_grid,
    trials: int,
    seed: int = 0,
    key: int = 0,
    chunk: int = DEFAULT_CHUNK,
    workers: int | None = None,
) -> np.ndarray:
    """MOP counts for every (coefficient, rate) pair from one set of draws.

    ``coeffs`` are the dominant squared coefficients (p_2^2 for CN-PA, p_1^2
    for CN-SA; ignored for OMA). All pairs share the same realizations, which
    keeps comparisons across the grid free of independent sampling noise.
    Returns an integer array of shape (len(coeffs), len(rates_grid)).
    """
    scheme = Scheme.parse(scheme)
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    rates_grid = np.atleast_1d(np.asarray(rates_grid, dtype=float))
    rho = float(db_to_linear(rho_db))
    # equal rates give equal thresholds, so mutual outage is min_k gamma_k <= phi
    phis = np.array([thresholds(scheme, RateTargets.uniform(r, 2))[0] for r in rates_grid])
    allocs = [None if scheme is Scheme.OMA else PowerAllocation.two_user(1 - c, c, scheme=scheme) for c in coeffs]

    def fn(net):
        res = np.empty((coeffs.size, rates_grid.size), dtype=np.int64)
        for i, alloc in enumerate(allocs):
            worst = sinr(scheme, alloc, net, rho).gamma.min(axis=-1)
            if phis.size > 8:
                res[i] = np.searchsorted(np.sort(worst), phis, side="right")
            else:
                res[i] = [np.count_nonzero(worst <= phi) for phi in phis]
        return res

    return np.sum(map_chunks(fn, seed, key, trials, chunk, 2, workers), axis=0)


def outage_capacity_curve(
    config: ExperimentConfig,
    rate_grid,
    reoptimize: bool = False,
    workers: int | None = None,
) -> list[tuple[float, float]]:
    """Non-outage probability 1 - MOP against a common target rate R_1 = R_2 = R.

    Uses the first SNR of the config. With ``reoptimize`` (CN-PA only) the
    strong-user coefficient is re-chosen at every rate by the closed-form
    optimizer before simulating.
    """
    rate_grid = np.asarray(rate_grid, dtype=float)
    if np.any(np.diff(rate_grid) <= 0):
        raise ValueError("rate grid must be strictly increasing")
    if config.k != 2:
        raise ValueError("outage-capacity curves are defined for two users")
    rho_db = config.rho_db[0]
    scheme = config.scheme
    if scheme is Scheme.OMA:
        coeffs = [0.0]
    elif scheme is Scheme.CNPA:
        coeffs = [float(config.alloc.p_sq[1])]
    else:
        coeffs = [float(config.alloc.p_sq[0])]
    if reoptimize:
        if scheme is not Scheme.CNPA:
            raise ValueError("per-rate re-optimization is only available for CN-PA")
        from .optimize import optimize_cnpa_k2

        best = [optimize_cnpa_k2(rho_db, RateTargets.uniform(r, 2)).best_coeff for r in rate_grid]
        uniq = sorted(set(best))
        counts = mop_grid_k2(scheme, uniq, rho_db, rate_grid, config.trials, config.seed, 0, config.chunk, workers)
        row = [counts[uniq.index(b), j] for j, b in enumerate(best)]
    else:
        row = mop_grid_k2(scheme, coeffs, rho_db, rate_grid, config.trials, config.seed, 0, config.chunk, workers)[0]
    return [(float(r), 1.0 - c / config.trials) for r, c in zip(rate_grid, row)]
