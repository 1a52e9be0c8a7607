import math

import numpy as np
import pytest

from sideinfo.bounds import (
    GenieSpec,
    axis_genie,
    bound_passed,
    check_receiver_genie_bound,
    constant_genie,
    demonstrate_tx_unbounded,
    joint_genie,
    mac_nc_minus_c_bound,
    mac_sum_genie_bound,
    make_genie,
    nc_minus_c_bound,
)
from sideinfo.capacity import SolverConfig
from sideinfo.channels import block_static_expand, noiseless
from sideinfo.errors import HypothesisError
from sideinfo.generators import (
    make_random_access,
    make_random_access_mac,
    random_genie_table,
    random_mac,
    random_state_channel,
)
from sideinfo.prob import Dist, entropy

FAST = SolverConfig(restarts=8)


def test_genie_spec_entropy_matches_prob_core():
    c = random_state_channel(1, tx="random", rx="random")
    g = make_genie(c, random_genie_table(1, c, 3))
    pg = np.einsum("str,strg->g", c.state_law, g.table)
    assert g.entropy_bits == entropy(Dist(pg / pg.sum()))
    with pytest.raises(ValueError):
        GenieSpec("receiver", np.full(c.state_law.shape + (2,), 0.6), c.state_law)
    with pytest.raises(ValueError):
        GenieSpec("oracle", g.table, c.state_law)


def test_constant_genie_zero_gap():
    c = random_state_channel(2, tx="random", rx="random")
    rep = check_receiver_genie_bound(c, constant_genie(c))
    assert rep.lhs_bits == pytest.approx(0.0, abs=1e-9)
    assert rep.rhs_bits == 0.0
    assert rep.satisfied


def test_redundant_genie():
    c = random_state_channel(3, tx="S", rx="random")
    rep = check_receiver_genie_bound(c, axis_genie(c, 2))  # G = S_R
    assert rep.components["C_G"] == pytest.approx(rep.components["C"], abs=1e-9)
    assert rep.slack_bits == pytest.approx(rep.rhs_bits, abs=1e-9)


def test_random_access_genie():
    c = make_random_access(noiseless(2), 0.5)
    rep = check_receiver_genie_bound(c, axis_genie(c, 0))
    assert rep.lhs_bits <= 1.0
    assert rep.components["C_G"] == pytest.approx(0.5, abs=1e-6)


def test_transmitter_genie_refused():
    c = random_state_channel(0)
    g = GenieSpec("transmitter", np.ones(c.state_law.shape + (1,)), c.state_law)
    with pytest.raises(ValueError):
        check_receiver_genie_bound(c, g)


@pytest.mark.parametrize("seed", range(10))
def test_genie_bound_random(seed):
    c = random_state_channel(seed, tx="random", rx="random")
    g = make_genie(c, random_genie_table(seed, c))
    rep = check_receiver_genie_bound(c, g)
    assert rep.satisfied, rep


@pytest.mark.parametrize("seed", range(5))
def test_genie_refinement_monotone(seed):
    c = random_state_channel(seed, tx="random", rx="random")
    g1 = make_genie(c, random_genie_table(seed, c))
    g2 = make_genie(c, random_genie_table(seed + 1000, c))
    coarse = check_receiver_genie_bound(c, g1).components["C_G"]
    fine = check_receiver_genie_bound(c, joint_genie(c, g1, g2)).components["C_G"]
    assert fine >= coarse - 1e-6


def test_tx_unbounded_table():
    rows = demonstrate_tx_unbounded([1, 2, 4, 8])
    assert [r.n for r in rows] == [1, 2, 4, 8]
    for r in rows:
        assert r.c_bits == pytest.approx(0.5 * math.log2(r.n) + 0.5, abs=1e-5)
        assert r.c_g_bits == pytest.approx(math.log2(r.n + 1), abs=1e-5)
        assert r.satisfied
    assert rows[0].gap_bits == pytest.approx(0.5, abs=1e-5)
    assert rows[2].gap_bits == pytest.approx(math.log2(5) - 1.5, abs=1e-5)


def test_nc_minus_c_when_tx_is_function_of_rx():
    c = random_state_channel(9, tx="S", rx="S")
    rep = nc_minus_c_bound(c)
    assert rep.rhs_bits == 0.0
    assert rep.lhs_bits <= 2e-3 and rep.satisfied


def test_nc_minus_c_useless_state():
    c = random_state_channel(4, tx="random", rx="none", ns=2)
    tr = np.repeat(c.transition[:, :1], c.ns, axis=1)  # output ignores the state
    c = type(c)(c.state_law, tr)
    rep = nc_minus_c_bound(c)
    assert rep.lhs_bits == pytest.approx(0.0, abs=1e-6)
    assert rep.slack_bits == pytest.approx(rep.rhs_bits, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_nc_minus_c_random(seed):
    assert nc_minus_c_bound(random_state_channel(seed, tx="random", rx="random"), FAST).satisfied


def test_mac_genie_random_access():
    m = make_random_access_mac(noiseless(2), 0.5)
    rep = mac_sum_genie_bound(m, axis_genie(m, 0), allow_correlated=True)
    assert rep.rhs_bits == pytest.approx(1.0)
    assert rep.satisfied
    rep = mac_sum_genie_bound(m, constant_genie(m), allow_correlated=True)
    assert rep.lhs_bits == pytest.approx(0.0, abs=1e-9)


def test_mac_genie_block_static():
    m = block_static_expand(make_random_access_mac(noiseless(2), 0.5), 3)
    rep = mac_sum_genie_bound(m, axis_genie(m, 0), SolverConfig(restarts=2), block=3, allow_correlated=True)
    assert rep.rhs_bits == pytest.approx(1 / 3)
    assert rep.satisfied


def test_mac_nc_minus_c():
    rep = mac_nc_minus_c_bound(random_mac(1, rx="both"), FAST)
    assert rep.rhs_bits == pytest.approx(0.0, abs=1e-12)
    assert rep.lhs_bits <= 4e-3 and bound_passed(rep)
    rep = mac_nc_minus_c_bound(random_mac(2, rx="none", nst1=1, nst2=1), FAST)
    assert rep.lhs_bits == pytest.approx(0.0, abs=1e-9)
    for seed in range(3):
        assert bound_passed(mac_nc_minus_c_bound(random_mac(seed, rx="noisy"), FAST))


def test_mac_nc_minus_c_needs_independence():
    with pytest.raises(HypothesisError):
        mac_nc_minus_c_bound(make_random_access_mac(noiseless(2), 0.5))
