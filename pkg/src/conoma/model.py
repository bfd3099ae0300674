"""Domain types and SINR engines for cooperative NOMA downlinks.

Users are indexed 1..K in ascending order of direct channel power gain.
All engines are vectorised: gains may be scalars or arrays with any leading
batch shape, and the returned SINR array carries a trailing axis of length K.

Perfect SIC is assumed throughout.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

SUM_TOL = 1e-12


class Scheme(enum.Enum):
    """Transmission scheme under comparison."""

    CNPA = "CN-PA"  # proposed: strong user gets the largest power
    CNSA = "CN-SA"  # conventional: weak user gets the largest power
    OMA = "OMA"

    @classmethod
    def parse(cls, value: str | Scheme) -> Scheme:
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper().replace("_", "-")
        for s in cls:
            if key in (s.name, s.value):
                return s
        raise ValueError(f"unknown scheme {value!r}")


@dataclass(frozen=True)
class PowerAllocation:
    """Squared power coefficients for both phases.

    ``p_sq[m-1]`` is the direct-phase coefficient of user m. ``q_sq[j]`` holds
    the j-1 squared coefficients used by relaying user j (2 <= j <= K), with
    ``q_sq[j][m-1]`` the share given to user m's message.

    Ordering of the coefficients is scheme dependent and checked by the
    engines, not here.
    """

    p_sq: np.ndarray
    q_sq: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.p_sq, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("p_sq must be a vector of at least two coefficients")
        k = p.size
        q = dict(self.q_sq)
        if 2 not in q:
            q[2] = np.ones(1)
        q = {int(j): np.atleast_1d(np.asarray(v, dtype=float)) for j, v in q.items()}
        if sorted(q) != list(range(2, k + 1)):
            raise ValueError(f"q_sq needs one entry per relaying user 2..{k}, got {sorted(q)}")
        for j, v in q.items():
            if v.shape != (j - 1,):
                raise ValueError(f"q_sq[{j}] must have {j - 1} entries")
        for name, v in [("p_sq", p)] + [(f"q_sq[{j}]", v) for j, v in q.items()]:
            if not np.all((v > 0) & (v <= 1)):
                raise ValueError(f"{name} entries must lie in (0, 1]: {v}")
            if abs(v.sum() - 1.0) > SUM_TOL * max(1, v.size):
                raise ValueError(f"{name} must sum to one, sums to {v.sum()!r}")
        p.setflags(write=False)
        for v in q.values():
            v.setflags(write=False)
        object.__setattr__(self, "p_sq", p)
        object.__setattr__(self, "q_sq", q)

    @property
    def k(self) -> int:
        return self.p_sq.size

    @classmethod
    def two_user(cls, p_low: float, p_high: float | None = None, *, scheme=Scheme.CNPA) -> PowerAllocation:
        """K=2 allocation from the low (and optionally high) squared coefficient.

        For CN-PA the low coefficient goes to user 1; for CN-SA to user 2.
        """
        if p_high is None:
            p_high = 1.0 - p_low
        scheme = Scheme.parse(scheme)
        p = (p_low, p_high) if scheme is not Scheme.CNSA else (p_high, p_low)
        return cls(np.array(p))

    def check_order(self, descending: bool = False) -> None:
        """Raise if the direct or relay coefficients violate the scheme ordering."""
        seqs = [("p_sq", self.p_sq)] + [(f"q_sq[{j}]", v) for j, v in self.q_sq.items()]
        for name, v in seqs:
            d = np.diff(v)
            bad = np.any(d > 0) if descending else np.any(d < 0)
            if bad:
                order = "non-increasing" if descending else "non-decreasing"
                raise ValueError(f"{name} must be {order} for this scheme: {v}")


def relay_pairs(k: int) -> list[tuple[int, int]]:
    """(relay, receiver) links used by the cooperative phase, in slot order."""
    return [(j, m) for j in range(k, 1, -1) for m in range(1, j)]


@dataclass(frozen=True)
class NetworkRealization:
    """Sorted direct gains |h_k|^2 and inter-user gains |g_{i,j}|^2 (i > j).

    ``h_sq_sorted`` has trailing axis K; every ``g_sq`` entry broadcasts
    against ``h_sq_sorted[..., 0]``.
    """

    h_sq_sorted: np.ndarray
    g_sq: dict[tuple[int, int], np.ndarray]

    def __post_init__(self):
        h = np.asarray(self.h_sq_sorted, dtype=float)
        if h.ndim < 1 or h.shape[-1] < 2:
            raise ValueError("need at least two direct gains")
        if np.any(h < 0) or np.any(np.diff(h, axis=-1) < 0):
            raise ValueError("direct gains must be non-negative and ascending")
        g = {tuple(key): np.asarray(v, dtype=float) for key, v in self.g_sq.items()}
        missing = set(relay_pairs(h.shape[-1])) - set(g)
        if missing:
            raise ValueError(f"missing inter-user gains for links {sorted(missing)}")
        if any(np.any(v < 0) for v in g.values()):
            raise ValueError("inter-user gains must be non-negative")
        object.__setattr__(self, "h_sq_sorted", h)
        object.__setattr__(self, "g_sq", g)

    @property
    def k(self) -> int:
        return self.h_sq_sorted.shape[-1]

    def h(self, user: int) -> np.ndarray:
        return self.h_sq_sorted[..., user - 1]

    def g(self, relay: int, receiver: int) -> np.ndarray:
        return self.g_sq[(relay, receiver)]


@dataclass(frozen=True)
class SinrVector:
    """Per-user post-combining SINR; ``gamma[..., k-1]`` belongs to user k."""

    gamma: np.ndarray

    @property
    def k(self) -> int:
        return self.gamma.shape[-1]

    def outage(self, phi) -> np.ndarray:
        """Boolean outage indicators ``gamma_k <= phi_k``."""
        return self.gamma <= np.asarray(phi, dtype=float)


@dataclass(frozen=True)
class RateTargets:
    """Target rates R_k in bits per channel use and thresholds 2^R - 1."""

    r: np.ndarray

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.r, dtype=float))
        if np.any(r <= 0):
            raise ValueError("target rates must be positive")
        object.__setattr__(self, "r", r)

    @classmethod
    def uniform(cls, rate: float, k: int = 2) -> RateTargets:
        return cls(np.full(k, float(rate)))

    @property
    def k(self) -> int:
        return self.r.size

    @property
    def phi(self) -> np.ndarray:
        return np.exp2(self.r) - 1.0

    def phi_oma(self) -> np.ndarray:
        """Thresholds for K-slot time sharing, 2^(K R) - 1."""
        return np.exp2(self.k * self.r) - 1.0


def _check(alloc: PowerAllocation | None, net: NetworkRealization, rho: float) -> None:
    if not np.all(np.asarray(rho) > 0):
        raise ValueError("transmit SNR must be positive")
    if alloc is not None and alloc.k != net.k:
        raise ValueError(f"allocation is for K={alloc.k} but realization has K={net.k}")


def sinr_proposed(alloc: PowerAllocation, net: NetworkRealization, rho: float) -> SinrVector:
    """SINR of every user under the proposed (ascending power) allocation.

    User K-n (n < K-1) combines one direct copy with one copy from each of the
    n stronger relays, cancelling the messages of stronger users first. The
    weakest user sees no interference in any slot.
    """
    _check(alloc, net, rho)
    alloc.check_order(descending=False)
    k, p, q = net.k, alloc.p_sq, alloc.q_sq
    inv = 1.0 / rho
    out = []
    h1 = net.h(1)
    g1 = rho * p[0] * h1
    for j in range(2, k + 1):
        g1 = g1 + rho * q[j][0] * net.g(j, 1)
    out.append(g1)
    for user in range(2, k + 1):
        h = net.h(user)
        interf = p[: user - 1].sum()
        gam = h * p[user - 1] / (h * interf + inv)
        for relay in range(user + 1, k + 1):
            g = net.g(relay, user)
            qr = q[relay]
            gam = gam + g * qr[user - 1] / (g * qr[: user - 1].sum() + inv)
        out.append(gam)
    return SinrVector(np.stack(np.broadcast_arrays(*out), axis=-1))


def sinr_conventional(alloc: PowerAllocation, net: NetworkRealization, rho: float) -> SinrVector:
    """SINR under the conventional (descending power) allocation.

    User k decodes and cancels the weaker users' messages, so its own message
    sees interference from users k+1..K. For K=2 this reduces to

        gamma_1 = p_h h_1 / (p_l h_1 + 1/rho) + rho g_21,   gamma_2 = rho p_l h_2.

    For K > 2 the relay copies follow the same mirrored pattern; that case is
    provided for exploration only.
    """
    _check(alloc, net, rho)
    alloc.check_order(descending=True)
    k, p, q = net.k, alloc.p_sq, alloc.q_sq
    inv = 1.0 / rho
    out = []
    for user in range(1, k + 1):
        h = net.h(user)
        interf = p[user:].sum()
        if user == k:
            gam = rho * p[user - 1] * h
        else:
            gam = h * p[user - 1] / (h * interf + inv)
        for relay in range(user + 1, k + 1):
            g = net.g(relay, user)
            qr = q[relay]
            rest = qr[user:].sum()
            gam = gam + g * qr[user - 1] / (g * rest + inv)
        out.append(gam)
    return SinrVector(np.stack(np.broadcast_arrays(*out), axis=-1))


def sinr_oma(net: NetworkRealization, rho: float) -> SinrVector:
    """Per-slot SNR rho |h_k|^2 of orthogonal transmission.

    Compare against :meth:`RateTargets.phi_oma`, not ``phi``.
    """
    _check(None, net, rho)
    return SinrVector(rho * net.h_sq_sorted)


def sinr(scheme: Scheme, alloc: PowerAllocation | None, net: NetworkRealization, rho: float) -> SinrVector:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.CNPA:
        return sinr_proposed(alloc, net, rho)
    if scheme is Scheme.CNSA:
        return sinr_conventional(alloc, net, rho)
    return sinr_oma(net, rho)


def thresholds(scheme: Scheme, rates: RateTargets) -> np.ndarray:
    """Outage thresholds appropriate for ``scheme``."""
    return rates.phi_oma() if Scheme.parse(scheme) is Scheme.OMA else rates.phi


@dataclass(frozen=True)
class SlotAction:
    user: int
    action: str  # "decode-own", "sic-only", "mrc-combine", "relay"
    messages: tuple[int, ...]


@dataclass(frozen=True)
class TimeSlot:
    index: int
    transmitter: str | int  # "BS" or relaying user index
    messages: tuple[int, ...]
    actions: tuple[SlotAction, ...]


def decode_schedule(k: int) -> list[TimeSlot]:
    """Transmission and decoding schedule of the proposed scheme for K users.

    Slot 1 is the base-station broadcast; slot n+1 (1 <= n <= K-1) has user
    K-n+1 relay messages 1..K-n. User j decodes its own message in slot K-j+1.
    """
    if int(k) != k or k < 2:
        raise ValueError("schedule needs at least two users")
    k = int(k)
    slots = []
    for t in range(1, k + 1):
        if t == 1:
            tx, msgs = "BS", tuple(range(1, k + 1))
        else:
            tx, msgs = k - t + 2, tuple(range(1, k - t + 2))
        decoder = k - t + 1  # user whose own message completes in this slot
        acts = []
        for u in range(1, decoder + 1):
            if u == decoder:
                if t == 1:
                    acts.append(SlotAction(u, "decode-own", tuple(range(k, 0, -1))))
                else:
                    acts.append(SlotAction(u, "mrc-combine", tuple(range(u, 0, -1))))
            else:
                acts.append(SlotAction(u, "sic-only", (decoder,)))
        if t > 1:
            acts.insert(0, SlotAction(tx, "relay", msgs))
        slots.append(TimeSlot(t, tx, msgs, tuple(acts)))
    return slots
