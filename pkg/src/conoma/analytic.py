"""Closed-form outage expressions for the proposed CO-NOMA allocation.

Contents: hypoexponential CDF of the weakest user's combined SNR, the
order-statistic CDFs of the direct and relayed SINR terms, their high-SNR
asymptotes, a log-log diversity fit, and the exact two-user mutual outage
probability (MOP).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PowerAllocation

PERTURB_REL = 1e-7
CLAMP_SLACK = 1e-9


class InsufficientTrialsError(ValueError):
    """An outage estimate of zero cannot enter a log-log fit."""


def _clamp_prob(x, name="probability"):
    x = np.asarray(x, dtype=float)
    if np.any(x < -CLAMP_SLACK) or np.any(x > 1 + CLAMP_SLACK):
        raise ArithmeticError(f"{name} left [0, 1] beyond rounding: {x}")
    out = np.clip(x, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# weakest user: sum of independent, non-identical exponentials


def _separate(lams: np.ndarray) -> np.ndarray:
    """Push apart means closer than PERTURB_REL relative, in ascending order."""
    lams = np.array(lams, dtype=float)
    order = np.argsort(lams)
    out = lams[order]
    for i in range(1, out.size):
        if out[i] - out[i - 1] < PERTURB_REL * out[i - 1]:
            out[i] = out[i - 1] * (1 + PERTURB_REL)
    res = np.empty_like(out)
    res[order] = out
    return res


@dataclass(frozen=True)
class HypoExpParams:
    """Means of the exponential summands and their partial-fraction weights."""

    lambdas: np.ndarray
    c: np.ndarray

    @classmethod
    def from_lambdas(cls, lambdas) -> HypoExpParams:
        lam = np.asarray(lambdas, dtype=float)
        if lam.ndim != 1 or lam.size < 1 or np.any(lam <= 0):
            raise ValueError("means must be a non-empty vector of positive values")
        lam = _separate(lam)
        rates = 1.0 / lam
        c = np.empty_like(lam)
        for i in range(lam.size):
            others = np.delete(rates, i)
            c[i] = np.prod(others / (others - rates[i]))
        if abs(c.sum() - 1.0) > 1e-9 * max(1.0, np.abs(c).max()):
            raise ArithmeticError(f"partial-fraction weights do not sum to one: {c.sum()!r}")
        return cls(lam, c)

    @classmethod
    def from_allocation(cls, alloc: PowerAllocation, rho: float) -> HypoExpParams:
        """Means rho p_1^2 / K (min of K gains) and rho q_{j,1}^2 for each relay j."""
        k = alloc.k
        lam = [rho * alloc.p_sq[0] / k]
        lam += [rho * alloc.q_sq[k - i + 1][0] for i in range(1, k)]
        return cls.from_lambdas(lam)


def weak_user_outage(params: HypoExpParams, gamma) -> float | np.ndarray:
    """CDF of the weakest user's SNR at ``gamma``."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("threshold must be non-negative")
    terms = -np.expm1(-g[..., None] / params.lambdas)
    return _clamp_prob(terms @ params.c, "weak-user CDF")


# --------------------------------------------------------------------------
# remaining users: ratio transforms of ordered / unordered exponentials


@dataclass(frozen=True)
class RatioCdfParams:
    """Coefficients of the SINR terms of user K-n.

    ``p_own``/``p_int`` are the direct-phase own and residual-interference
    squared coefficients. ``q_own[i-1]``/``q_int[i-1]`` are the same for the
    copy relayed by user K-i+1, i = 1..n. ``p_top``/``p_top_int`` are the
    strongest user's pair, used by the high-SNR bound.
    """

    k: int
    n: int
    p_own: float
    p_int: float
    q_own: tuple[float, ...]
    q_int: tuple[float, ...]
    p_top: float
    p_top_int: float

    @classmethod
    def from_allocation(cls, alloc: PowerAllocation, n: int) -> RatioCdfParams:
        k = alloc.k
        if not 0 <= n < k - 1:
            raise ValueError(f"user offset n must satisfy 0 <= n < {k - 1}")
        user = k - n
        p = alloc.p_sq
        q_own, q_int = [], []
        for i in range(1, n + 1):
            qr = alloc.q_sq[k - i + 1]
            q_own.append(float(qr[user - 1]))
            q_int.append(float(qr[: user - 1].sum()))
        return cls(
            k, n, float(p[user - 1]), float(p[: user - 1].sum()),
            tuple(q_own), tuple(q_int), float(p[-1]), float(p[:-1].sum()),
        )

    @property
    def zeta0(self) -> float:
        return self.p_own / self.p_int

    def zeta(self, i: int) -> float:
        return self.q_own[i - 1] / self.q_int[i - 1]

    def omega0(self, y):
        y = np.asarray(y, dtype=float)
        return y / (self.p_own - y * self.p_int)

    def omega(self, i: int, z):
        z = np.asarray(z, dtype=float)
        return z / (self.q_own[i - 1] - z * self.q_int[i - 1])


def _ordered_exp_cdf(x, k: int, n: int):
    """CDF of the (K-n)-th smallest of K unit exponentials (= (n+1)-th largest)."""
    f = -np.expm1(-x)
    s = 1.0 - f
    return sum(math.comb(k, i) * f ** (k - i) * s**i for i in range(n + 1))


def cdf_Yn(params: RatioCdfParams, rho: float, y):
    """CDF of the direct-phase SINR term of user K-n."""
    y = np.asarray(y, dtype=float)
    below = y < params.zeta0
    w = np.where(below, params.omega0(np.where(below, y, 0.0)), 0.0)
    val = np.where(below, _ordered_exp_cdf(w / rho, params.k, params.n), 1.0)
    return _clamp_prob(np.where(y <= 0, 0.0, val))


def cdf_Zi(params: RatioCdfParams, i: int, rho: float, z):
    """CDF of the copy relayed by user K-i+1 to user K-n."""
    if not 1 <= i <= params.n:
        raise ValueError(f"relay index i must lie in 1..{params.n}")
    z = np.asarray(z, dtype=float)
    below = z < params.zeta(i)
    w = np.where(below, params.omega(i, np.where(below, z, 0.0)), 0.0)
    val = np.where(below, -np.expm1(-w / rho), 1.0)
    return _clamp_prob(np.where(z <= 0, 0.0, val))


def strong_user_outage(p_sq, rho: float, k: int, phi: float) -> float:
    """Outage of the strongest user, (1 - exp(-omega/rho))^K below the ceiling."""
    p = np.asarray(p_sq, dtype=float)
    if phi < 0:
        raise ValueError("threshold must be non-negative")
    own, interf = p[k - 1], p[: k - 1].sum()
    if phi >= own / interf:
        return 1.0
    w = phi / (own - phi * interf)
    return _clamp_prob((-math.expm1(-w / rho)) ** k)


# --------------------------------------------------------------------------
# high-SNR asymptotes and diversity


def asymptotic_weak_cdf(k: int, rho: float, p1_sq: float, q_first, gamma):
    """Product of gamma/lambda_i over all summands; an upper bound on the CDF.

    ``q_first[i-1]`` is q_{K-i+1,1}^2 for i = 1..K-1.
    """
    q = np.asarray(q_first, dtype=float)
    if q.size != k - 1:
        raise ValueError(f"need {k - 1} relay coefficients")
    g = np.asarray(gamma, dtype=float)
    val = (g * k / (rho * p1_sq)) * np.prod(g[..., None] / (rho * q), axis=-1)
    return float(val) if val.ndim == 0 else val


def asymptotic_kn_cdf(params: RatioCdfParams, rho: float, gamma: float) -> float:
    """High-SNR bound C(K,n) (omega_00/rho)^(K-n) rho^-n prod_i omega_{i,n}.

    The direct term uses the strongest user's ratio transform omega_{0,0} for
    every n; for n=0 this is the exact leading term of the strong-user CDF.
    """
    k, n = params.k, params.n
    if gamma < 0:
        raise ValueError("threshold must be non-negative")
    ceilings = [params.p_top / params.p_top_int, params.zeta0] + [params.zeta(i) for i in range(1, n + 1)]
    if gamma >= min(ceilings):
        raise ValueError("asymptote undefined at or above an interference ceiling")
    w00 = gamma / (params.p_top - gamma * params.p_top_int)
    val = math.comb(k, n) * (w00 / rho) ** (k - n) * rho ** (-n)
    for i in range(1, n + 1):
        val *= float(params.omega(i, gamma))
    return val


def diversity_order_fit(curve, decades: float = 1.0) -> float:
    """Negative log-log slope of outage vs SNR over the top ``decades`` of rho.

    ``curve`` is a sequence of (rho_linear, outage) pairs.
    """
    pts = np.asarray(curve, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (rho, outage) points")
    rho, out = pts[:, 0], pts[:, 1]
    if np.any(np.diff(rho) <= 0):
        raise ValueError("rho must be strictly increasing")
    sel = rho >= rho[-1] / 10**decades
    if sel.sum() < 2:
        raise ValueError("fewer than two points in the fitted range")
    if np.any(out[sel] <= 0):
        raise InsufficientTrialsError(
            "zero outage in the fitted range: increase trials or use the analytic CDF"
        )
    slope = np.polyfit(np.log10(rho[sel]), np.log10(out[sel]), 1)[0]
    return float(-slope)


# --------------------------------------------------------------------------
# two-user mutual outage


@dataclass(frozen=True)
class MopK2Params:
    """Two-user CN-PA setting: strong-user share p_h, weak-user share p_l."""

    p_h: float
    p_l: float
    rho: float
    phi1: float
    phi2: float

    def __post_init__(self):
        if not self.p_l > 0:
            raise ValueError("weak-user coefficient p_l must be positive")
        if self.p_h < self.p_l:
            raise ValueError("proposed allocation needs p_h >= p_l")
        if abs(self.p_h + self.p_l - 1) > 1e-12:
            raise ValueError("p_h + p_l must equal one")
        if not self.rho > 0:
            raise ValueError("transmit SNR must be positive")
        if self.phi1 < 0 or self.phi2 < 0:
            raise ValueError("thresholds must be non-negative")

    @classmethod
    def from_rates(cls, p_h: float, rho: float, r1: float, r2: float | None = None) -> MopK2Params:
        r2 = r1 if r2 is None else r2
        return cls(p_h, 1.0 - p_h, rho, 2.0**r1 - 1, 2.0**r2 - 1)

    @property
    def feasible(self) -> bool:
        """Strong user can reach phi2 at all (phi2 below the SIR ceiling)."""
        return self.phi2 < self.p_h / self.p_l

    @property
    def u(self) -> float:
        return self.phi1 / self.rho

    @property
    def beta(self) -> float:
        """Strong-user gain threshold: gamma_2 > phi2 iff |h_2|^2 > beta."""
        return self.phi2 / (self.rho * (self.p_h - self.phi2 * self.p_l))

    @property
    def c(self) -> float:
        """Relay gain below which the weak user's threshold exceeds beta."""
        return self.u - self.p_l * self.beta

    @property
    def delta(self) -> float:
        return min(max(self.c, 0.0), self.u)


@dataclass(frozen=True)
class MopK2Terms:
    p1: float
    p2: float
    p3: float
    p4: float
    m_og: float


def mop_k2_subterms(prm: MopK2Params) -> MopK2Terms:
    """Intermediate probabilities of the two-user derivation.

    With delta = |g_21|^2 and unordered direct gains mu, kappa:
    P1/P2 cover delta < Delta, P3/P4 cover Delta < delta < phi1/rho, and
    M_OG is the strong user's outage when the relay alone satisfies user 1.
    Exponents are recombined so nothing overflows for small p_l.
    """
    if not prm.feasible:
        raise ValueError("phi2 >= p_h/p_l: strong user always in outage")
    pl, u, b, d = prm.p_l, prm.u, prm.beta, prm.delta
    a2 = 1.0 - 2.0 / pl
    a1 = 1.0 - 1.0 / pl
    # P1: int_0^D int_alpha^inf int_x^inf e^-(x+y+z)
    p1 = 0.5 * (math.exp(-2 * u / pl) - math.exp(-d - 2 * (u - d) / pl)) / a2
    # P2: int_0^D int_alpha^inf int_alpha^x e^-(x+y+z)
    p2 = 0.5 * (math.exp(-(2 / pl) * u) - math.exp(-(2 / pl) * (u - d) - d)) / a2
    tail = math.exp(-2 * b) / 2 * (math.exp(-d) - math.exp(-u))
    # P3: int_D^u int_alpha^inf int_beta^x
    p3 = (math.exp(-(b + d + (u - d) / pl)) - math.exp(-(b + u))) / a1 - tail
    # P4: int_D^u int_beta^inf int_alpha^x
    p4 = math.exp(-b) * (math.exp(-d - (u - d) / pl) - math.exp(-u)) / a1 - tail
    m_og = math.expm1(-b) ** 2  # Pr(|h_2|^2 <= beta), max of two unit exponentials
    return MopK2Terms(p1, p2, p3, p4, m_og)


def mop_closed_form_k2(prm: MopK2Params, form: str = "derived") -> float:
    """Exact mutual outage probability of the two-user proposed scheme.

    ``form="printed"`` evaluates a variant whose cooperative-term exponent is
    phi1/rho + (1 - p_l) beta instead of c (1 - 1/p_l) (a dropped factor).
    That variant disagrees with simulation and can go negative; it is kept
    as a comparison reference and returned unclamped.
    """
    if not prm.feasible:
        return 1.0
    if form == "derived":
        t = mop_k2_subterms(prm)
        success_g = math.exp(-prm.u) * (1.0 - t.m_og)
        return _clamp_prob(1.0 - success_g - (t.p1 + t.p2 + t.p3 + t.p4), "MOP")
    if form == "printed":
        return _mop_printed(prm)
    raise ValueError(f"unknown form {form!r}")


def _mop_printed(prm: MopK2Params) -> float:
    ph, pl, rho, f1, f2 = prm.p_h, prm.p_l, prm.rho, prm.phi1, prm.phi2
    b, c, d = prm.beta, prm.c, prm.delta
    with np.errstate(over="ignore", invalid="ignore"):
        first = np.exp(-f1 / rho) * (1 - (1 - np.exp(-b)) ** 2)
        t1 = np.exp(-(2 / pl) * (f1 / rho)) / (1 - 2 / pl) * (1 - np.exp(-(1 - 2 / pl) * d))
        lead = np.exp(-(1 / rho) * (f1 - f2 * (pl - 1) / (ph * (1 - (pl / ph) * f2))))
        t2 = 2 * np.exp(-b) * np.exp(-(1 / pl) * (f1 / rho)) / (1 - 1 / pl) * (
            lead - np.exp(-(f1 / rho) * (1 - 1 / pl))
        )
        t3 = np.exp(-2 * b) * (np.exp(-max(c, 0.0)) - np.exp(-f1 / rho))
    return float(1 - first - (t1 + t2 - t3))


def mop_bound_check(mop: float, user_outages, tol: float = 1e-12) -> bool:
    """True iff no user's outage exceeds the mutual outage (plus ``tol``)."""
    return bool(np.max(np.asarray(user_outages, dtype=float)) <= mop + tol)
