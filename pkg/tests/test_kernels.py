"""The compiled and numpy kernels must agree on every entry point."""
import numpy as np
import pytest

from sideinfo import kernels
from sideinfo.channels import strategy_by_state
from sideinfo.generators import random_mac, random_state_channel
from sideinfo.multiuser.mac import mac_strategy_channel

BACKENDS = kernels.backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS


@needs_both
@pytest.mark.parametrize("seed", range(5))
def test_ba_equivalence(seed):
    rng = np.random.default_rng(seed)
    W = rng.dirichlet(np.ones(5), size=7)
    W[0, :2] = 0
    W[0] /= W[0].sum()
    p0 = np.full(7, 1 / 7)
    a = BACKENDS["python"].ba(W, p0, 1e-12, 5000)
    b = BACKENDS["cython"].ba(W, p0, 1e-12, 5000)
    assert a[3] == b[3]
    np.testing.assert_allclose(a[0], b[0], atol=1e-12)
    assert a[1] == pytest.approx(b[1], abs=1e-13)
    assert a[2] == pytest.approx(b[2], abs=1e-13)


@needs_both
@pytest.mark.parametrize("causal", [True, False])
@pytest.mark.parametrize("seed", range(3))
def test_gp_equivalence(seed, causal):
    c = random_state_channel(seed, tx="random", rx="random")
    W = strategy_by_state(c)
    ps = c.state_law.sum(axis=(0, 2))
    q0 = np.random.default_rng(seed).dirichlet(np.ones(W.shape[1]), size=W.shape[0])
    if causal:
        q0 = np.tile(q0[0], (W.shape[0], 1))
    a = BACKENDS["python"].gp(W, ps, q0, 1e-12, 300, causal)
    b = BACKENDS["cython"].gp(W, ps, q0, 1e-12, 300, causal)
    np.testing.assert_allclose(a[0], b[0], atol=1e-10)
    assert a[1] == pytest.approx(b[1], abs=1e-12)
    assert a[2] == b[2]


@needs_both
@pytest.mark.parametrize("causal", [True, False])
def test_mac_equivalence(causal):
    m = random_mac(3, rx="noisy")
    W, p12, t1, t2 = mac_strategy_channel(m, 4096)
    rng = np.random.default_rng(0)
    q1 = rng.dirichlet(np.ones(len(t1)), size=m.nst1)
    q2 = rng.dirichlet(np.ones(len(t2)), size=m.nst2)
    if causal:
        W = np.einsum("ab,abijz->ijz", p12, W)[None, None]
        p12 = np.ones((1, 1))
        q1, q2 = q1[:1], q2[:1]
    a = BACKENDS["python"].mac(W, p12, q1, q2, 1e-12, 200, causal)
    b = BACKENDS["cython"].mac(W, p12, q1, q2, 1e-12, 200, causal)
    np.testing.assert_allclose(a[0], b[0], atol=1e-10)
    np.testing.assert_allclose(a[1], b[1], atol=1e-10)
    assert a[2] == pytest.approx(b[2], abs=1e-12)


def test_pure_python_fallback_selected():
    import os
    import subprocess
    import sys

    env = dict(os.environ, SIDEINFO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from sideinfo import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
