import numpy as np
import pytest

from sideinfo.capacity import SolverConfig, blahut_arimoto
from sideinfo.channels import MacChannel, bsc, noiseless
from sideinfo.errors import HypothesisError, SizeError
from sideinfo.generators import make_random_access_mac, random_mac
from sideinfo.multiuser import (
    mac_noncausal_inner_sum,
    mac_oracle_grid,
    mac_region_rx_knows,
    mac_sum_capacity_causal,
    mac_sum_objective,
    pentagon_region,
    rx_knows_both,
)
from sideinfo.multiuser.mac import _input_bounds

FAST = SolverConfig(restarts=8)


def _no_state_mac(tr):
    return MacChannel(np.ones((1, 1, 1, 1)), tr[:, :, None, :], tx_states_independent=True)


def test_random_access_sum_is_c0():
    m = make_random_access_mac(noiseless(2), 0.5, rx_knows=True)
    rep = mac_sum_capacity_causal(m, allow_correlated=True)
    assert rep.value_bits == pytest.approx(1.0, abs=1e-6)
    assert rep.notes  # correlated states are flagged


def test_random_access_without_rx_state_within_one_bit():
    m = make_random_access_mac(noiseless(2), 0.5)
    v = mac_sum_capacity_causal(m, allow_correlated=True).value_bits
    assert 0.0 <= v <= 1.0 + 1e-9


def test_correlated_states_refused_by_default():
    with pytest.raises(HypothesisError):
        mac_sum_capacity_causal(make_random_access_mac(noiseless(2), 0.5))


def test_trivial_states_give_plain_mac():
    # binary adder MAC with erasure output: sum capacity 1.5 bits
    tr = np.zeros((2, 2, 3))
    for a in range(2):
        for b in range(2):
            tr[a, b, a + b] = 1.0
    m = _no_state_mac(tr)
    assert mac_sum_capacity_causal(m).value_bits == pytest.approx(1.5, abs=1e-6)
    assert mac_noncausal_inner_sum(m).value_bits == pytest.approx(1.5, abs=1e-6)


def test_one_silent_user_reduces_to_dmc():
    tr = np.stack([bsc(0.1)] * 2, axis=1)  # output ignores x2
    m = _no_state_mac(tr)
    assert mac_sum_capacity_causal(m).value_bits == pytest.approx(blahut_arimoto(bsc(0.1)).value_bits, abs=1e-8)


@pytest.mark.parametrize("seed", range(3))
def test_causal_matches_grid(seed):
    m = random_mac(seed, rx="both")
    rep = mac_sum_capacity_causal(m, FAST)
    orc = mac_oracle_grid(m, 12)
    assert rep.value_bits >= orc.value_bits - 1e-9
    assert rep.value_bits - orc.value_bits <= 5e-3
    assert mac_sum_objective(m, rep.achiever, causal=True) == pytest.approx(rep.value_bits, abs=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_noncausal_inner_contains_causal(seed):
    m = random_mac(seed, rx="none")
    cc = mac_sum_capacity_causal(m, FAST)
    nc = mac_noncausal_inner_sum(m, FAST, causal=cc)
    assert nc.value_bits >= cc.value_bits - 1e-9
    assert any("no converse" in n for n in nc.notes)
    assert mac_sum_objective(m, nc.achiever) == pytest.approx(nc.value_bits, abs=1e-9)


def test_noncausal_inner_vs_grid():
    m = random_mac(5, rx="none", nst1=2, nst2=1)
    nc = mac_noncausal_inner_sum(m, FAST)
    orc = mac_oracle_grid(m, 4, causal=False, budget=10**7)
    assert nc.value_bits >= orc.value_bits - 1e-9


def test_noncausal_equals_causal_when_rx_knows():
    m = random_mac(2, rx="both")
    cc = mac_sum_capacity_causal(m, FAST)
    assert mac_noncausal_inner_sum(m, FAST, causal=cc).value_bits - cc.value_bits <= 5e-3


def test_region_max_sum_matches_sum_solver():
    m = random_mac(1, rx="both")
    reg = mac_region_rx_knows(m, k=12)
    assert reg.max_sum == pytest.approx(mac_sum_capacity_causal(m, FAST).value_bits, abs=5e-3)


def test_region_points_satisfy_their_bounds():
    m = random_mac(4, rx="both")
    reg = mac_region_rx_knows(m, k=6)
    for p in reg.vertices:
        if p.source is None:
            continue
        a, b, c = reg.bounds[p.source]
        assert p.r1_bits <= a + 1e-9 and p.r2_bits <= b + 1e-9 and p.r1_bits + p.r2_bits <= c + 1e-9
        q1, q2 = reg.laws[p.source]
        assert np.allclose(_input_bounds(m, q1[None], q2[None])[0], reg.bounds[p.source], atol=1e-12)


def test_region_symmetry_under_user_swap():
    m = random_mac(3, rx="both")
    sw = MacChannel(m.state_law.transpose(0, 2, 1, 3), m.transition.transpose(1, 0, 2, 3),
                    tx_states_independent=True)
    # the receiver index mixes (a, b); relabel it as well
    sl = sw.state_law.reshape(4, 2, 2, 2, 2).transpose(0, 1, 2, 4, 3).reshape(4, 2, 2, 4)
    idx = np.array([0, 2, 1, 3])
    sw = MacChannel(sl[idx], sw.transition[:, :, idx], tx_states_independent=True)
    a = sorted((round(p.r1_bits, 9), round(p.r2_bits, 9)) for p in mac_region_rx_knows(m, k=6).vertices)
    b = sorted((round(p.r2_bits, 9), round(p.r1_bits, 9)) for p in mac_region_rx_knows(sw, k=6).vertices)
    assert a == b


def test_region_hypotheses():
    with pytest.raises(HypothesisError):
        mac_region_rx_knows(random_mac(0, rx="noisy"))
    with pytest.raises(HypothesisError):
        mac_region_rx_knows(make_random_access_mac(noiseless(2), 0.5, rx_knows=True))
    assert rx_knows_both(random_mac(0, rx="both"))


def test_random_access_region_sum():
    m = make_random_access_mac(noiseless(2), 1.0, rx_knows=True)
    reg = mac_region_rx_knows(m, k=4)
    assert reg.max_sum == pytest.approx(1.0, abs=1e-9)
    # p_on = 1: user 2 is never connected
    assert max(p.r2_bits for p in reg.vertices) == pytest.approx(0.0, abs=1e-12)


def test_oracle_budget():
    with pytest.raises(SizeError):
        mac_oracle_grid(random_mac(0), 12, budget=1000)


def test_pentagon_region_simple():
    reg = pentagon_region(np.array([[1.0, 1.0, 1.5]]))
    pts = sorted((p.r1_bits, p.r2_bits) for p in reg.vertices)
    assert pts == [(0.0, 0.0), (0.0, 1.0), (0.5, 1.0), (1.0, 0.0), (1.0, 0.5)]
    assert reg.max_sum == 1.5
    dom = sorted((p.r1_bits, p.r2_bits) for p in reg.dominant)
    assert dom == [(0.5, 1.0), (1.0, 0.5)]


def test_pentagon_region_hull_of_two():
    reg = pentagon_region(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]))
    assert reg.max_sum == pytest.approx(1.0)
    assert sorted((p.r1_bits, p.r2_bits) for p in reg.dominant) == [(0.0, 1.0), (1.0, 0.0)]
