"""Oracle and property checks behind ``conoma validate``."""
from __future__ import annotations

import numpy as np

from .analytic import (
    HypoExpParams,
    MopK2Params,
    diversity_order_fit,
    mop_bound_check,
    mop_closed_form_k2,
    mop_k2_subterms,
    strong_user_outage,
    weak_user_outage,
)
from .model import PowerAllocation, RateTargets, Scheme
from .oracles import hypoexp_cdf_convolution
from .simulate import ExperimentConfig, db_to_linear, run_experiment, stream


def random_hypoexp_case(rng: np.random.Generator):
    """Random allocation-derived means and a threshold inside the bulk."""
    k = int(rng.integers(2, 4))
    rho = 10 ** rng.uniform(0, 2)
    p = np.sort(rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k)
    alloc_q = {j: np.sort(rng.dirichlet(np.ones(j - 1))) for j in range(3, k + 1)}
    alloc = PowerAllocation(p, alloc_q)
    params = HypoExpParams.from_allocation(alloc, rho)
    gamma = float(rng.uniform(0.05, 3.0) * np.median(params.lambdas))
    return params, gamma


def random_mop_params(rng: np.random.Generator) -> MopK2Params:
    """Feasible two-user parameters spanning both signs of c."""
    while True:
        ph = rng.uniform(0.5, 0.995)
        rho = 10 ** rng.uniform(-1, 3)
        r1, r2 = rng.uniform(0.1, 3.0, size=2)
        prm = MopK2Params.from_rates(ph, rho, r1, r2)
        if prm.feasible:
            return prm


def _check(name, passed, measured, tolerance):
    return {"name": name, "passed": bool(passed), "measured": measured, "tolerance": tolerance}


def run_checks(cfg: dict) -> dict:
    sec = cfg["validate"]
    seed = int(cfg["seed"])
    ph = float(sec["p_strong"])
    rate = float(sec["rate"])
    trials = int(sec["trials"])
    grid = [float(x) for x in sec["rho_db"]]
    # fail fast on an unusable allocation before anything runs
    MopK2Params.from_rates(ph, 1.0, rate)
    alloc = PowerAllocation.two_user(1 - ph, ph)
    rates = RateTargets.uniform(rate, 2)
    phi = rates.phi
    checks = []

    rng = stream(seed, 900)
    errs = []
    for _ in range(int(sec["hypoexp_sets"])):
        params, gamma = random_hypoexp_case(rng)
        errs.append(abs(weak_user_outage(params, gamma) - hypoexp_cdf_convolution(params.lambdas, gamma)))
    checks.append(_check("hypoexp_vs_convolution", max(errs) < 1e-6, max(errs), 1e-6))

    rng = stream(seed, 901)
    worst = 0.0
    for _ in range(int(sec["symmetry_sets"])):
        t = mop_k2_subterms(random_mop_params(rng))
        worst = max(worst, abs(t.p1 - t.p2), abs(t.p3 - t.p4))
    checks.append(_check("subterm_symmetry", worst <= 1e-12, worst, 1e-12))

    conf = ExperimentConfig(Scheme.CNPA, alloc, tuple(grid), rates, trials, seed)
    runs = run_experiment(conf)
    z_mop, z_user, viol_mc, viol_an = [], [], 0, 0
    for db, st in runs:
        rho = float(db_to_linear(db))
        prm = MopK2Params.from_rates(ph, rho, rate)
        mop = mop_closed_form_k2(prm)
        weak = weak_user_outage(HypoExpParams.from_allocation(alloc, rho), phi[0])
        strong = strong_user_outage(alloc.p_sq, rho, 2, phi[1])
        z_mop.append(abs(st.mop - mop) / max(st.mop_se, 1e-300))
        for est, se, ref in zip(st.per_user_outage, st.per_user_se, (weak, strong)):
            z_user.append(abs(est - ref) / max(se, 1e-300))
        viol_mc += len(st.bound_violations())
        viol_an += not mop_bound_check(mop, (weak, strong), 1e-12)
    checks.append(_check("mop_closed_form_vs_mc", max(z_mop) <= 3, max(z_mop), "3 sigma"))
    checks.append(_check("user_outage_vs_mc", max(z_user) <= 3, max(z_user), "3 sigma"))
    checks.append(_check("mop_bound_mc", viol_mc == 0, viol_mc, 0))

    for db in np.linspace(-5, 30, 36):
        rho = float(db_to_linear(db))
        prm = MopK2Params.from_rates(ph, rho, rate)
        user = (weak_user_outage(HypoExpParams.from_allocation(alloc, rho), phi[0]),
                strong_user_outage(alloc.p_sq, rho, 2, phi[1]))
        viol_an += not mop_bound_check(mop_closed_form_k2(prm), user, 1e-12)
    checks.append(_check("mop_bound_analytic", viol_an == 0, viol_an, 0))

    div_grid = db_to_linear(sec["diversity_rho_db"])
    weak_curve = [(r, weak_user_outage(HypoExpParams.from_allocation(alloc, r), phi[0])) for r in div_grid]
    strong_curve = [(r, strong_user_outage(alloc.p_sq, r, 2, phi[1])) for r in div_grid]
    d1, d2 = diversity_order_fit(weak_curve), diversity_order_fit(strong_curve)
    checks.append(_check("diversity_weak", abs(d1 - 2) <= 0.3, d1, "2 +/- 0.3"))
    checks.append(_check("diversity_strong", abs(d2 - 2) <= 0.3, d2, "2 +/- 0.3"))

    return {"passed": all(c["passed"] for c in checks), "checks": checks}
