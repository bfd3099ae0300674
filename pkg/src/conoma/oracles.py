"""Reference computations that avoid the closed-form paths they check."""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, trapezoid
from scipy.signal import fftconvolve


def _trapezoid_sum_cdf(lambdas, gamma: float, n: int) -> float:
    t = np.linspace(0.0, gamma, n + 1)
    h = t[1]
    dens = np.exp(-t / lambdas[0]) / lambdas[0]
    for lam in lambdas[1:]:
        f = np.exp(-t / lam) / lam
        conv = fftconvolve(f, dens)[: n + 1] * h
        conv -= 0.5 * h * (f[0] * dens + f * dens[0])
        dens = conv
    return float(trapezoid(dens, t))


def hypoexp_cdf_convolution(lambdas, gamma: float, points_per_scale: int = 400) -> float:
    """CDF of a sum of independent exponentials (means ``lambdas``) at ``gamma``.

    Densities are convolved numerically on a uniform grid with the trapezoid
    rule, then integrated; two grid sizes are Richardson-combined.
    """
    lambdas = [float(x) for x in lambdas]
    if gamma <= 0:
        return 0.0
    h = min(lambdas) / points_per_scale
    n = int(min(max(math.ceil(gamma / h), 2000), 400_000))
    coarse = _trapezoid_sum_cdf(lambdas, gamma, n)
    fine = _trapezoid_sum_cdf(lambdas, gamma, 2 * n)
    return (4 * fine - coarse) / 3


def mop_k2_quadrature(p_h: float, rho: float, phi1: float, phi2: float) -> float:
    """Two-user CN-PA MOP by one-dimensional quadrature over the relay gain.

    Conditional on the relay gain, success needs min(|h|^2) > a and
    max(|h|^2) > b for a pair of unit exponentials.
    """
    p_l = 1.0 - p_h
    if phi2 >= p_h / p_l:
        return 1.0
    b = phi2 / (rho * (p_h - phi2 * p_l))
    u = phi1 / rho

    def succ(a):
        a = max(a, 0.0)
        if a >= b:
            return math.exp(-2 * a)
        return math.exp(-2 * a) - (math.exp(-a) - math.exp(-b)) ** 2

    c = u - p_l * b
    pts = [x for x in (c,) if 0 < x < u]
    inner = quad(lambda d: succ((u - d) / p_l) * math.exp(-d), 0.0, u, points=pts or None, limit=200)[0]
    return 1.0 - inner - math.exp(-u) * succ(0.0)


def mop_cnsa_k2_quadrature(p_h: float, rho: float, phi1: float, phi2: float) -> float:
    """Two-user conventional MOP by quadrature; ``p_h`` is the weak user's share."""
    p_l = 1.0 - p_h
    b = phi2 / (rho * p_l)
    u = phi1 / rho

    def succ(a):
        a = max(a, 0.0)
        b0 = max(b, 0.0)
        if a >= b0:
            return math.exp(-2 * a)
        return math.exp(-2 * a) - (math.exp(-a) - math.exp(-b0)) ** 2

    def integrand(d):
        t = phi1 - rho * d
        if t * p_l >= p_h:
            return 0.0
        return succ(t / (rho * (p_h - t * p_l))) * math.exp(-d)

    lo = max(0.0, (phi1 - p_h / p_l) / rho)
    inner = quad(integrand, lo, u, limit=200)[0] if lo < u else 0.0
    return 1.0 - inner - math.exp(-u) * succ(0.0)
