import numpy as np
import pytest

from sideinfo.capacity import blahut_arimoto, capacity_causal, capacity_no_si
from sideinfo.channels import (
    StateChannel,
    block_static_expand,
    bsc,
    drop_rx_info,
    noiseless,
    plain_channel,
    reveal_tx_to_rx,
    strategy_table,
    strategy_transform,
    tx_is_function_of_rx,
    validate,
    with_output_side_info,
)
from sideinfo.errors import SizeError
from sideinfo.generators import (
    make_erasure_parity,
    make_random_access,
    make_random_access_mac,
    random_state_channel,
)


def test_validate_clean_bsc():
    assert validate(plain_channel(bsc(0.1))) == []


def test_validate_names_bad_row():
    tr = bsc(0.1)[:, None, :].copy()
    tr[1, 0] = [0.5, 0.4]
    diags = validate(StateChannel(np.ones((1, 1, 1)), tr))
    assert len(diags) == 1
    assert diags[0].field == "transition[1, 0]"


def test_validate_negative_state_law():
    sl = np.array([1.2, -0.2]).reshape(2, 1, 1)
    diags = validate(StateChannel(sl, np.ones((2, 2, 1))))
    assert [d.field for d in diags] == ["state_law"]


def test_strategy_table_order_and_cap():
    t = strategy_table(2, 2)
    assert t.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    with pytest.raises(SizeError) as e:
        strategy_table(3, 9, cap=1000)
    assert e.value.count == 3 ** 9
    assert "3^9" in str(e.value)


def test_strategy_transform_trivial_state_is_original():
    c = random_state_channel(1, tx="none", rx="random")
    w = strategy_transform(c)
    assert np.allclose(w, with_output_side_info(c), atol=1e-15)
    assert capacity_causal(c).value_bits == pytest.approx(capacity_no_si(c).value_bits, abs=1e-9)


def test_strategy_transform_erasure_parity():
    w = strategy_transform(make_erasure_parity(2))
    assert w.shape[0] == 16
    assert blahut_arimoto(w).value_bits == pytest.approx(np.log2(3), abs=1e-6)


def test_strategy_transform_rows_sum_to_one():
    c = random_state_channel(3, ns=2)
    w = strategy_transform(c)
    assert np.allclose(w.sum(1), 1.0, atol=1e-12)


def test_block_static_identity_and_marginals():
    c = random_state_channel(4, nx=2, ny=2)
    assert block_static_expand(c, 1) is c
    c2 = block_static_expand(c, 2)
    assert c2.nx == c.nx ** 2 and c2.ny == c.ny ** 2
    assert np.array_equal(c2.state_law, c.state_law)
    # the first sub-output has the original per-use law
    first = c2.transition.reshape(c.nx, c.nx, c.ns, c.ny, c.ny).sum(-1)
    assert np.allclose(first, c.transition[:, None], atol=1e-14)
    with pytest.raises(SizeError):
        block_static_expand(c, 13, cap=4096)


def test_block_static_random_access_bound():
    c = block_static_expand(make_random_access(noiseless(2), 0.5), 2)
    from sideinfo.bounds import axis_genie, check_receiver_genie_bound

    rep = check_receiver_genie_bound(c, axis_genie(c, 0), block=2)
    assert rep.rhs_bits == pytest.approx(0.5, abs=1e-12)
    assert rep.satisfied


def test_erasure_parity_structure():
    c = make_erasure_parity(2)
    assert c.sizes() == {"x": 4, "y": 5, "s": 2, "s_t": 2, "s_r": 1}
    assert validate(c) == []


def test_random_access_limits():
    base = noiseless(2)
    assert capacity_causal(make_random_access(base, 1.0)).value_bits == pytest.approx(1.0, abs=1e-6)
    assert capacity_causal(make_random_access(base, 0.0)).value_bits == pytest.approx(0.0, abs=1e-6)


def test_random_access_mac_flags():
    m = make_random_access_mac(noiseless(2), 0.5)
    assert not m.tx_states_independent
    assert make_random_access_mac(noiseless(2), 1.0).tx_states_independent
    assert validate(m) == []


def test_reductions():
    c = random_state_channel(7, tx="random", rx="random")
    assert drop_rx_info(c).nsr == 1
    r = reveal_tx_to_rx(c)
    assert tx_is_function_of_rx(r)
    assert np.allclose(r.state_law.sum(2), c.state_law.sum(2))
