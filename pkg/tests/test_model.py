from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conoma.model import (
    NetworkRealization,
    PowerAllocation,
    RateTargets,
    Scheme,
    decode_schedule,
    relay_pairs,
    sinr_conventional,
    sinr_oma,
    sinr_proposed,
)


def unit_net(k):
    return NetworkRealization(np.ones(k), {pair: 1.0 for pair in relay_pairs(k)})


def test_allocation_invariants():
    with pytest.raises(ValueError):
        PowerAllocation(np.array([0.3, 0.6]))
    with pytest.raises(ValueError):
        PowerAllocation(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        PowerAllocation(np.array([0.2, 0.3, 0.5]), {3: [0.5, 0.6]})
    with pytest.raises(ValueError):
        PowerAllocation(np.array([0.2, 0.3, 0.5]))  # q for relay 3 missing
    a = PowerAllocation(np.array([0.2, 0.8]))
    assert a.q_sq[2].tolist() == [1.0]
    with pytest.raises(ValueError):
        PowerAllocation(np.array([0.2, 0.8]), {2: [0.5]})


def test_two_user_helper_orders_by_scheme():
    assert PowerAllocation.two_user(0.2).p_sq.tolist() == [0.2, 0.8]
    assert PowerAllocation.two_user(0.2, scheme=Scheme.CNSA).p_sq.tolist() == [0.8, 0.2]


def test_rate_targets():
    r = RateTargets(np.array([1.0, 2.0]))
    assert r.phi.tolist() == [1.0, 3.0]
    assert r.phi_oma().tolist() == [3.0, 15.0]
    with pytest.raises(ValueError):
        RateTargets(np.array([1.0, 0.0]))


def test_realization_validation():
    with pytest.raises(ValueError):
        NetworkRealization(np.array([2.0, 1.0]), {(2, 1): 1.0})
    with pytest.raises(ValueError):
        NetworkRealization(np.array([1.0, 2.0]), {})


def test_proposed_k2_unit_gains():
    g = sinr_proposed(PowerAllocation.two_user(0.2), unit_net(2), 10.0).gamma
    # gamma_2 = 0.8 / (0.2 + 1/10), gamma_1 = 10*0.2 + 10*1
    assert g[1] == pytest.approx(0.8 / 0.3, rel=1e-14)
    assert g[0] == pytest.approx(12.0, rel=1e-14)


def test_proposed_k2_interference_ceiling():
    g = sinr_proposed(PowerAllocation.two_user(0.2), unit_net(2), 1e12).gamma
    assert g[1] == pytest.approx(4.0, rel=1e-9)


def test_proposed_k3_matches_exact_rational_evaluation():
    p = [F(1, 10), F(3, 10), F(6, 10)]
    q3 = [F(1, 4), F(3, 4)]
    rho = F(100)
    inv = 1 / rho
    g3 = p[2] / ((p[0] + p[1]) + inv)
    g2 = p[1] / (p[0] + inv) + q3[1] / (q3[0] + inv)
    g1 = rho * p[0] + rho * q3[0] + rho * 1
    alloc = PowerAllocation(np.array([0.1, 0.3, 0.6]), {3: [0.25, 0.75]})
    got = sinr_proposed(alloc, unit_net(3), 100.0).gamma
    assert got == pytest.approx([float(g1), float(g2), float(g3)], rel=1e-13)
    assert got[0] == pytest.approx(135.0)


def test_conventional_k2():
    alloc = PowerAllocation.two_user(0.2, scheme=Scheme.CNSA)
    g = sinr_conventional(alloc, unit_net(2), 10.0).gamma
    assert g[0] == pytest.approx(0.8 / 0.3 + 10.0, rel=1e-14)
    assert g[1] == pytest.approx(2.0, rel=1e-14)


def test_conventional_high_snr():
    alloc = PowerAllocation.two_user(0.2, scheme=Scheme.CNSA)
    lo = sinr_conventional(alloc, unit_net(2), 1e3).gamma
    hi = sinr_conventional(alloc, unit_net(2), 1e6).gamma
    assert hi[1] / lo[1] == pytest.approx(1e3)
    assert hi[0] > lo[0] > 4.0


def test_conventional_rejects_proposed_ordering():
    with pytest.raises(ValueError):
        sinr_conventional(PowerAllocation.two_user(0.2), unit_net(2), 10.0)
    with pytest.raises(ValueError):
        sinr_proposed(PowerAllocation.two_user(0.2, scheme=Scheme.CNSA), unit_net(2), 10.0)


def test_oma():
    assert sinr_oma(unit_net(2), 10.0).gamma.tolist() == [10.0, 10.0]
    assert sinr_oma(unit_net(2), 1e-3).outage(RateTargets.uniform(1.0).phi_oma()).all()


def test_input_errors():
    with pytest.raises(ValueError):
        sinr_proposed(PowerAllocation.two_user(0.2), unit_net(2), 0.0)
    with pytest.raises(ValueError):
        sinr_proposed(PowerAllocation.two_user(0.2), unit_net(3), 1.0)


def test_batched_evaluation_matches_scalar():
    rng = np.random.default_rng(0)
    alloc = PowerAllocation(np.array([0.1, 0.3, 0.6]), {3: [0.25, 0.75]})
    h = np.sort(rng.exponential(size=(50, 3)), axis=1)
    g = {pair: rng.exponential(size=50) for pair in relay_pairs(3)}
    batch = sinr_proposed(alloc, NetworkRealization(h, g), 5.0).gamma
    for t in range(0, 50, 7):
        one = sinr_proposed(alloc, NetworkRealization(h[t], {p: v[t] for p, v in g.items()}), 5.0).gamma
        np.testing.assert_allclose(batch[t], one, rtol=1e-15)


gains = st.floats(0.0, 50.0, allow_nan=False)


@st.composite
def k3_case(draw):
    h = sorted(draw(st.lists(gains, min_size=3, max_size=3)))
    g = {pair: draw(gains) for pair in relay_pairs(3)}
    return NetworkRealization(np.array(h), g)


ALLOC3 = PowerAllocation(np.array([0.1, 0.3, 0.6]), {3: [0.25, 0.75]})


@settings(max_examples=200, deadline=None)
@given(k3_case(), st.floats(1e-3, 1e4), st.floats(1.0, 10.0))
def test_sinr_monotone_and_weak_user_linear(net, rho, c):
    a = sinr_proposed(ALLOC3, net, rho).gamma
    b = sinr_proposed(ALLOC3, net, rho * c).gamma
    assert np.all(b >= a - 1e-12 * np.abs(a))
    assert b[0] == pytest.approx(c * a[0], rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(k3_case(), st.floats(1e-3, 1e8))
def test_interference_ceiling(net, rho):
    g = sinr_proposed(ALLOC3, net, rho).gamma
    zeta3 = 0.6 / 0.4
    zeta2 = 0.3 / 0.1 + 0.75 / 0.25
    assert g[2] < zeta3
    assert g[1] < zeta2


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0), st.floats(0.05, 0.45), st.floats(0.1, 1e4))
def test_scheme_symmetry_k2(h1, h2, p_l, rho):
    # the proposed strong-user term equals the conventional weak-user direct term
    # for the same (high, low) split, evaluated on the strong user's gain
    lo, hi = sorted((h1, h2))
    pa = sinr_proposed(PowerAllocation.two_user(p_l), NetworkRealization(np.array([lo, hi]), {(2, 1): 0.0}), rho)
    sa = sinr_conventional(
        PowerAllocation.two_user(p_l, scheme=Scheme.CNSA),
        NetworkRealization(np.array([hi, hi]), {(2, 1): 0.0}), rho,
    )
    assert pa.gamma[1] == pytest.approx(sa.gamma[0], rel=1e-12, abs=1e-300)


def test_schedule_k2():
    s = decode_schedule(2)
    assert len(s) == 2
    assert s[0].transmitter == "BS" and s[0].messages == (1, 2)
    acts = {a.user: a for a in s[0].actions}
    assert acts[2].action == "decode-own" and acts[2].messages == (2, 1)
    assert acts[1].action == "sic-only" and acts[1].messages == (2,)
    assert s[1].transmitter == 2 and s[1].messages == (1,)
    acts = {(a.user, a.action): a for a in s[1].actions}
    assert (1, "mrc-combine") in acts and (2, "relay") in acts


def test_schedule_k3_columns():
    s = decode_schedule(3)
    assert [t.transmitter for t in s] == ["BS", 3, 2]
    assert [t.messages for t in s] == [(1, 2, 3), (1, 2), (1,)]
    slot2 = {a.user: a for a in s[1].actions if a.action != "relay"}
    assert slot2[2].action == "mrc-combine" and slot2[2].messages == (2, 1)
    assert slot2[1].action == "sic-only" and slot2[1].messages == (2,)
    assert s[2].actions[-1].user == 1 and s[2].actions[-1].action == "mrc-combine"


@pytest.mark.parametrize("k", [2, 3, 4, 7])
def test_schedule_slot_counts(k):
    s = decode_schedule(k)
    assert len(s) == k
    for j in range(1, k + 1):
        own = [t.index for t in s for a in t.actions if a.user == j and a.action in ("decode-own", "mrc-combine")]
        assert own == [k - j + 1]


def test_schedule_rejects_single_user():
    with pytest.raises(ValueError):
        decode_schedule(1)
