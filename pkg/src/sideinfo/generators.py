"""Example channels and seeded random instances."""
from __future__ import annotations

import numpy as np

from .channels import BcChannel, MacChannel, RelayChannel, StateChannel
from .prob import random_rows


def _diag_state(p: np.ndarray, rx_knows: bool) -> np.ndarray:
    """State law with S_T = S and S_R either trivial or equal to S."""
    n = p.size
    sl = np.zeros((n, n, n if rx_knows else 1))
    for s in range(n):
        sl[s, s, s if rx_knows else 0] = p[s]
    return sl


def make_erasure_parity(n_half: int) -> StateChannel:
    """Inputs 0..2N-1 pass unchanged when x + s is even and are erased otherwise.

    S is a fair bit known to the transmitter; the erasure symbol is the last
    output index.
    """
    if n_half < 1:
        raise ValueError("N must be >= 1")
    nx = 2 * n_half
    tr = np.zeros((nx, 2, nx + 1))
    for x in range(nx):
        for s in range(2):
            tr[x, s, x if (x + s) % 2 == 0 else nx] = 1.0
    return StateChannel(_diag_state(np.array([0.5, 0.5]), False), tr, name=f"erasure_parity_{n_half}")


def make_random_access(base, p_on: float, rx_knows: bool = False) -> StateChannel:
    """Switch channel: the user drives ``base`` when S = 1, a uniform random input otherwise.

    S is known to the transmitter (S_T = S); the receiver sees S only with
    ``rx_knows``.
    """
    base = np.asarray(base, dtype=float)
    if not 0.0 <= p_on <= 1.0:
        raise ValueError("p_on must lie in [0, 1]")
    nx, ny = base.shape
    tr = np.empty((nx, 2, ny))
    tr[:, 0, :] = base.mean(axis=0)
    tr[:, 1, :] = base
    sl = _diag_state(np.array([1.0 - p_on, p_on]), rx_knows)
    return StateChannel(sl, tr, name="random_access" + ("_rx" if rx_knows else ""))


def make_random_access_mac(base, p_on: float, rx_knows: bool = False) -> MacChannel:
    """Two users share ``base``; user 1 is connected when S = 1, user 2 when S = 0.

    Both transmitters see S, so their states are identical and the
    independence flag is left unset.
    """
    base = np.asarray(base, dtype=float)
    if not 0.0 <= p_on <= 1.0:
        raise ValueError("p_on must lie in [0, 1]")
    nx, ny = base.shape
    tr = np.empty((nx, nx, 2, ny))
    tr[:, :, 0, :] = base[None, :, :]
    tr[:, :, 1, :] = base[:, None, :]
    p = np.array([1.0 - p_on, p_on])
    sl = np.zeros((2, 2, 2, 2 if rx_knows else 1))
    for s in range(2):
        sl[s, s, s, s if rx_knows else 0] = p[s]
    # identical states are independent only when S is deterministic
    indep = p_on in (0.0, 1.0)
    return MacChannel(sl, tr, tx_states_independent=indep, name="random_access_mac" + ("_rx" if rx_knows else ""))


def make_stuck_at(p: float) -> StateChannel:
    """Memory cell with stuck-at defects: S in {stuck-0, stuck-1, free}, S_T = S."""
    tr = np.zeros((2, 3, 2))
    tr[:, 0, 0] = 1.0
    tr[:, 1, 1] = 1.0
    tr[0, 2, 0] = tr[1, 2, 1] = 1.0
    return StateChannel(_diag_state(np.array([p / 2, p / 2, 1 - p]), False), tr, name=f"stuck_at_{p}")


# --- random instances --------------------------------------------------------

def _sizes(rng, spec):
    return int(spec) if np.isscalar(spec) else int(rng.integers(spec[0], spec[1] + 1))


def random_state_channel(seed: int, nx=(2, 3), ny=(2, 3), ns=(2, 3), tx: str = "S", rx: str = "S",
                         nst=(2, 3), nsr=(2, 3)) -> StateChannel:
    """Seeded random single-user channel.

    ``tx`` / ``rx`` choose the side information: ``"S"`` (exact state),
    ``"none"`` (trivial) or ``"random"`` (a random noisy function of S).
    Size arguments are an int or an inclusive ``(lo, hi)`` range.
    """
    rng = np.random.default_rng(seed)
    nx, ny, ns = _sizes(rng, nx), _sizes(rng, ny), _sizes(rng, ns)
    ps = random_rows(rng, (), ns)

    def side(mode, nrange):
        if mode == "S":
            return np.eye(ns)
        if mode == "none":
            return np.ones((ns, 1))
        if mode == "random":
            return random_rows(rng, (ns,), _sizes(rng, nrange))
        raise ValueError(f"unknown side-information mode {mode!r}")

    pt, pr = side(tx, nst), side(rx, nsr)
    sl = np.einsum("s,st,sr->str", ps, pt, pr)
    tr = random_rows(rng, (nx, ns), ny)
    return StateChannel(sl / sl.sum(), tr, name=f"random_{seed}")


def random_genie_table(seed: int, c: StateChannel, ng: int = 2) -> np.ndarray:
    """Random stochastic genie ``P(g | s, s_T, s_R)``."""
    rng = np.random.default_rng(seed)
    return random_rows(rng, c.state_law.shape, ng)


def random_mac(seed: int, nx1: int = 2, nx2: int = 2, ny: int = 2, nst1: int = 2, nst2: int = 2,
               rx: str = "both") -> MacChannel:
    """Seeded random MAC with independent transmitter states.

    The channel state is the pair ``S = (S_T1, S_T2)``. ``rx`` selects the
    receiver side information: ``"both"`` (S_R = S), ``"none"`` or ``"noisy"``
    (a random binary observation of S).
    """
    rng = np.random.default_rng(seed)
    p1, p2 = random_rows(rng, (), nst1), random_rows(rng, (), nst2)
    ns = nst1 * nst2
    if rx == "both":
        nsr = ns
        obs = np.eye(ns)
    elif rx == "none":
        nsr = 1
        obs = np.ones((ns, 1))
    elif rx == "noisy":
        nsr = 2
        obs = random_rows(rng, (ns,), 2)
    else:
        raise ValueError(f"unknown receiver mode {rx!r}")
    sl = np.zeros((ns, nst1, nst2, nsr))
    for a in range(nst1):
        for b in range(nst2):
            s = a * nst2 + b
            sl[s, a, b, :] = p1[a] * p2[b] * obs[s]
    tr = random_rows(rng, (nx1, nx2, ns), ny)
    return MacChannel(sl, tr, tx_states_independent=True, name=f"random_mac_{seed}")


def random_bc(seed: int, nx: int = 2, ny1: int = 2, ny2: int = 2, nst: int = 2, rx: str = "both") -> BcChannel:
    """Seeded random broadcast channel; ``rx="both"`` gives S_R1 = S_R2 = S_T."""
    rng = np.random.default_rng(seed)
    pst = random_rows(rng, (), nst)
    if rx == "both":
        sl = np.zeros((nst, nst, nst))
        for s in range(nst):
            sl[s, s, s] = pst[s]
    elif rx == "none":
        sl = pst.reshape(nst, 1, 1)
    else:
        raise ValueError(f"unknown receiver mode {rx!r}")
    tr = random_rows(rng, (nx, nst), ny1 * ny2).reshape(nx, nst, ny1, ny2)
    return BcChannel(sl, tr, name=f"random_bc_{seed}")


def compose_relay(first, second, state_law=None) -> RelayChannel:
    """Physically degraded relay from two stages.

    ``first[x_s, x_r, s, y_r]`` is the source-to-relay stage and
    ``second[y_r, x_r, s_d, y_d]`` the relay-to-destination stage. Stages
    without state axes may be passed as ``[x_s, x_r, y_r]`` and
    ``[y_r, x_r, y_d]``.
    """
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    if first.ndim == 3:
        first = first[:, :, None, :]
    if second.ndim == 3:
        second = second[:, :, None, :]
    ns, nsd = first.shape[2], second.shape[2]
    if state_law is None:
        state_law = np.full((ns, nsd), 1.0 / (ns * nsd))
    tr = np.einsum("abse,ebdf->absdef", first, second)
    return RelayChannel(state_law, tr)


def random_degraded_relay(seed: int, nxs: int = 2, nxr: int = 2, nyr: int = 2, nyd: int = 2,
                          ns: int = 1) -> RelayChannel:
    """Random degraded relay with S = S_D (so the state is known everywhere)."""
    rng = np.random.default_rng(seed)
    first = random_rows(rng, (nxs, nxr, ns), nyr)
    second = random_rows(rng, (nyr, nxr, ns), nyd)
    sl = np.diag(random_rows(rng, (), ns)) if ns > 1 else np.ones((1, 1))
    return compose_relay(first, second, sl)
