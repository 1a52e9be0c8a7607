"""Channel objects for the single-user, MAC, broadcast and relay settings.

Array layouts (all row-major, output axis last):

========  =========================  ===============================
kind      state_law axes             transition axes
========  =========================  ===============================
single    (S, S_T, S_R)              (X, S, Y)
mac       (S, S_T1, S_T2, S_R)       (X1, X2, S, Y)
bc        (S_T, S_R1, S_R2)          (X, S_T, Y1, Y2)
relay     (S, S_D)                   (X_S, X_R, S, S_D, Y_R, Y_D)
========  =========================  ===============================

Channels are immutable. Construction checks array ranks and extents only;
value-level invariants (non-negativity, normalization) are reported by
:func:`validate` so that malformed inputs can be diagnosed instead of
rejected outright.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import SizeError
from .prob import JointTable

ROW_TOL = 1e-12
INDEP_TOL = 1e-9
DEFAULT_STRATEGY_CAP = 4096


def _ro(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Diagnostic:
    field: str
    message: str

    def __str__(self):
        return f"{self.field}: {self.message}"


class _Channel:
    state_law: np.ndarray
    transition: np.ndarray

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and np.array_equal(self.state_law, other.state_law)
            and np.array_equal(self.transition, other.transition)
            and getattr(self, "tx_states_independent", None) == getattr(other, "tx_states_independent", None)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.state_law.tobytes(), self.transition.tobytes()))

    @property
    def state_table(self) -> JointTable:
        return JointTable(self.state_law)


@dataclass(frozen=True, eq=False)
class StateChannel(_Channel):
    """Single-user DMC with state S, transmitter SI S_T and receiver SI S_R."""

    state_law: np.ndarray
    transition: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        sl, tr = _ro(self.state_law), _ro(self.transition)
        if sl.ndim != 3:
            raise ValueError(f"state_law must have axes (S, S_T, S_R), got rank {sl.ndim}")
        if tr.ndim != 3:
            raise ValueError(f"transition must have axes (X, S, Y), got rank {tr.ndim}")
        if tr.shape[1] != sl.shape[0]:
            raise ValueError(f"transition has {tr.shape[1]} states but state_law has {sl.shape[0]}")
        object.__setattr__(self, "state_law", sl)
        object.__setattr__(self, "transition", tr)

    nx = property(lambda self: self.transition.shape[0])
    ny = property(lambda self: self.transition.shape[2])
    ns = property(lambda self: self.state_law.shape[0])
    nst = property(lambda self: self.state_law.shape[1])
    nsr = property(lambda self: self.state_law.shape[2])

    def sizes(self) -> dict:
        return {"x": self.nx, "y": self.ny, "s": self.ns, "s_t": self.nst, "s_r": self.nsr}


@dataclass(frozen=True, eq=False)
class MacChannel(_Channel):
    """Two-transmitter MAC; ``tx_states_independent`` asserts P(S_T1,S_T2)=P(S_T1)P(S_T2)."""

    state_law: np.ndarray
    transition: np.ndarray
    tx_states_independent: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        sl, tr = _ro(self.state_law), _ro(self.transition)
        if sl.ndim != 4:
            raise ValueError(f"state_law must have axes (S, S_T1, S_T2, S_R), got rank {sl.ndim}")
        if tr.ndim != 4:
            raise ValueError(f"transition must have axes (X1, X2, S, Y), got rank {tr.ndim}")
        if tr.shape[2] != sl.shape[0]:
            raise ValueError(f"transition has {tr.shape[2]} states but state_law has {sl.shape[0]}")
        object.__setattr__(self, "state_law", sl)
        object.__setattr__(self, "transition", tr)

    nx1 = property(lambda self: self.transition.shape[0])
    nx2 = property(lambda self: self.transition.shape[1])
    ny = property(lambda self: self.transition.shape[3])
    ns = property(lambda self: self.state_law.shape[0])
    nst1 = property(lambda self: self.state_law.shape[1])
    nst2 = property(lambda self: self.state_law.shape[2])
    nsr = property(lambda self: self.state_law.shape[3])

    def sizes(self) -> dict:
        return {"x1": self.nx1, "x2": self.nx2, "y": self.ny, "s": self.ns,
                "s_t1": self.nst1, "s_t2": self.nst2, "s_r": self.nsr}


@dataclass(frozen=True, eq=False)
class BcChannel(_Channel):
    """Two-receiver broadcast channel; the transmitter state is S_T."""

    state_law: np.ndarray
    transition: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        sl, tr = _ro(self.state_law), _ro(self.transition)
        if sl.ndim != 3:
            raise ValueError(f"state_law must have axes (S_T, S_R1, S_R2), got rank {sl.ndim}")
        if tr.ndim != 4:
            raise ValueError(f"transition must have axes (X, S_T, Y1, Y2), got rank {tr.ndim}")
        if tr.shape[1] != sl.shape[0]:
            raise ValueError(f"transition has {tr.shape[1]} states but state_law has {sl.shape[0]}")
        object.__setattr__(self, "state_law", sl)
        object.__setattr__(self, "transition", tr)

    nx = property(lambda self: self.transition.shape[0])
    ny1 = property(lambda self: self.transition.shape[2])
    ny2 = property(lambda self: self.transition.shape[3])
    nst = property(lambda self: self.state_law.shape[0])
    nsr1 = property(lambda self: self.state_law.shape[1])
    nsr2 = property(lambda self: self.state_law.shape[2])

    def sizes(self) -> dict:
        return {"x": self.nx, "y1": self.ny1, "y2": self.ny2, "s_t": self.nst,
                "s_r1": self.nsr1, "s_r2": self.nsr2}


@dataclass(frozen=True, eq=False)
class RelayChannel(_Channel):
    """Relay channel; source and relay share state S, destination sees S_D."""

    state_law: np.ndarray
    transition: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        sl, tr = _ro(self.state_law), _ro(self.transition)
        if sl.ndim != 2:
            raise ValueError(f"state_law must have axes (S, S_D), got rank {sl.ndim}")
        if tr.ndim != 6:
            raise ValueError(f"transition must have axes (X_S, X_R, S, S_D, Y_R, Y_D), got rank {tr.ndim}")
        if tr.shape[2:4] != sl.shape:
            raise ValueError(f"transition state axes {tr.shape[2:4]} do not match state_law {sl.shape}")
        object.__setattr__(self, "state_law", sl)
        object.__setattr__(self, "transition", tr)

    nxs = property(lambda self: self.transition.shape[0])
    nxr = property(lambda self: self.transition.shape[1])
    nyr = property(lambda self: self.transition.shape[4])
    nyd = property(lambda self: self.transition.shape[5])
    ns = property(lambda self: self.state_law.shape[0])
    nsd = property(lambda self: self.state_law.shape[1])

    def sizes(self) -> dict:
        return {"x_s": self.nxs, "x_r": self.nxr, "y_r": self.nyr, "y_d": self.nyd,
                "s": self.ns, "s_d": self.nsd}


AnyChannel = Union[StateChannel, MacChannel, BcChannel, RelayChannel]

# number of trailing transition axes that make up one output row
_OUT_AXES = {StateChannel: 1, MacChannel: 1, BcChannel: 2, RelayChannel: 2}


def validate(c: AnyChannel) -> list[Diagnostic]:
    """Check value-level invariants; an empty list means the channel is well formed."""
    out: list[Diagnostic] = []
    sl = c.state_law
    if np.any(sl < 0):
        bad = np.argwhere(sl < 0)
        out.append(Diagnostic("state_law", f"{len(bad)} negative entr{'y' if len(bad) == 1 else 'ies'}, first at {tuple(int(i) for i in bad[0])}"))
    if not np.all(np.isfinite(sl)):
        out.append(Diagnostic("state_law", "non-finite entries"))
    elif not out and abs(sl.sum() - 1.0) > ROW_TOL:
        out.append(Diagnostic("state_law", f"total mass {sl.sum():.17g} differs from 1"))

    k = _OUT_AXES[type(c)]
    tr = c.transition
    rows = tr.reshape(tr.shape[: tr.ndim - k] + (-1,))
    neg = np.argwhere(np.any(rows < 0, axis=-1))
    for idx in neg:
        out.append(Diagnostic(f"transition{list(int(i) for i in idx)}", "negative probability"))
    sums = rows.sum(-1)
    badsum = np.argwhere(~(np.abs(sums - 1.0) <= ROW_TOL))
    for idx in badsum:
        out.append(Diagnostic(f"transition{list(int(i) for i in idx)}", f"row sums to {sums[tuple(idx)]:.17g}, not 1"))

    if isinstance(c, MacChannel) and c.tx_states_independent and not out:
        p12 = sl.sum(axis=(0, 3))
        resid = np.abs(p12 - np.outer(p12.sum(1), p12.sum(0))).max()
        if resid > INDEP_TOL:
            out.append(Diagnostic("tx_states_independent", f"flag set but P(S_T1,S_T2) deviates from product by {resid:.3g}"))
    return out


def require_valid(c: AnyChannel) -> None:
    diags = validate(c)
    if diags:
        raise ValueError("invalid channel: " + "; ".join(str(d) for d in diags))


def zero_probability_states(c: StateChannel) -> list[int]:
    """Indices of S values with zero marginal probability (allowed, but worth noting)."""
    ps = c.state_law.sum(axis=(1, 2))
    return [int(i) for i in np.flatnonzero(ps <= 0)]


# --- plain DMCs -------------------------------------------------------------

def noiseless(n: int = 2) -> np.ndarray:
    return np.eye(n)


def bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def bec(eps: float) -> np.ndarray:
    return np.array([[1 - eps, 0.0, eps], [0.0, 1 - eps, eps]])


def plain_channel(w, name: str = "") -> StateChannel:
    """A DMC ``w[x, y]`` with a single trivial state."""
    w = np.asarray(w, dtype=float)
    return StateChannel(np.ones((1, 1, 1)), w[:, None, :], name=name)


# --- Shannon strategies ------------------------------------------------------

@dataclass(frozen=True)
class Strategy:
    """A map from transmitter-state index to input index; ``map[s_t] = x``."""

    map: tuple

    def __call__(self, s_t: int) -> int:
        return self.map[s_t]


def strategy_count(nx: int, nst: int) -> int:
    return nx ** nst


def strategy_table(nx: int, nst: int, cap: int = DEFAULT_STRATEGY_CAP) -> np.ndarray:
    """All strategies as rows ``t -> (t(0), ..., t(nst-1))`` in lexicographic order."""
    n = strategy_count(nx, nst)
    if n > cap:
        raise SizeError(f"strategy alphabet |X|^|S_T| = {nx}^{nst} = {n} exceeds cap {cap}", count=n)
    return np.array(list(itertools.product(range(nx), repeat=nst)), dtype=np.intp).reshape(n, nst)


def strategies(nx: int, nst: int, cap: int = DEFAULT_STRATEGY_CAP) -> list[Strategy]:
    return [Strategy(tuple(int(v) for v in row)) for row in strategy_table(nx, nst, cap)]


def conditional_output(c: StateChannel) -> np.ndarray:
    """``P(y, s_R | x, s_T)`` as an array ``[s_T, x, y*|S_R| + s_R]``.

    Rows of zero-probability transmitter states are filled with the
    unconditional law so that every row stays a distribution.
    """
    sl, tr = c.state_law, c.transition
    joint = np.einsum("abc,xay->bxyc", sl, tr)  # [s_T, x, y, s_R]
    pst = sl.sum(axis=(0, 2))
    out = np.empty_like(joint)
    for st in range(c.nst):
        if pst[st] > 0:
            out[st] = joint[st] / pst[st]
        else:
            out[st] = joint.sum(0)
    return out.reshape(c.nst, c.nx, c.ny * c.nsr)


def strategy_by_state(c: StateChannel, cap: int = DEFAULT_STRATEGY_CAP) -> np.ndarray:
    """``P(y, s_R | t, s_T)`` as ``[s_T, t, z]`` with ``z = y*|S_R| + s_R``."""
    table = strategy_table(c.nx, c.nst, cap)
    cond = conditional_output(c)
    return np.stack([cond[st, table[:, st], :] for st in range(c.nst)])


def strategy_transform(c: StateChannel, cap: int = DEFAULT_STRATEGY_CAP) -> np.ndarray:
    """Plain DMC ``W[t, z]`` on the strategy alphabet with output ``z = (y, s_R)``."""
    table = strategy_table(c.nx, c.nst, cap)
    sl, tr = c.state_law, c.transition
    w = np.zeros((table.shape[0], c.ny, c.nsr))
    for st in range(c.nst):
        # sum over s of P(s, st, s_R) P(y | t(st), s)
        w += np.einsum("sr,tsy->tyr", sl[:, st, :], tr[table[:, st]])
    return w.reshape(table.shape[0], c.ny * c.nsr)


def with_output_side_info(c: StateChannel) -> np.ndarray:
    """Plain DMC ``x -> (y, s_R)`` seen without transmitter state knowledge."""
    sl, tr = c.state_law, c.transition
    w = np.einsum("sr,xsy->xyr", sl.sum(axis=1), tr)
    return w.reshape(c.nx, c.ny * c.nsr)


# --- reductions --------------------------------------------------------------

def drop_tx_info(c: StateChannel) -> StateChannel:
    return StateChannel(c.state_law.sum(axis=1, keepdims=True), c.transition, name=c.name)


def drop_rx_info(c: StateChannel) -> StateChannel:
    return StateChannel(c.state_law.sum(axis=2, keepdims=True), c.transition, name=c.name)


def reveal_tx_to_rx(c: StateChannel) -> StateChannel:
    """Receiver SI becomes (S_R, S_T) with index ``s_r*|S_T| + s_t``."""
    sl = c.state_law
    new = np.zeros((c.ns, c.nst, c.nsr, c.nst))
    for st in range(c.nst):
        new[:, st, :, st] = sl[:, st, :]
    return StateChannel(new.reshape(c.ns, c.nst, c.nsr * c.nst), c.transition, name=c.name)


def tx_is_function_of_rx(c: StateChannel, tol: float = 1e-12) -> bool:
    """True when P(s_T | s_R) is 0 or 1 for every s_R of positive probability."""
    p = c.state_law.sum(axis=0)  # [s_T, s_R]
    return _is_function(p, tol)


def _is_function(p_ab: np.ndarray, tol: float) -> bool:
    """Whether axis 0 is a deterministic function of axis 1 under ``p_ab``."""
    pb = p_ab.sum(axis=0)
    for b in range(p_ab.shape[1]):
        if pb[b] <= 0:
            continue
        cond = p_ab[:, b] / pb[b]
        if np.any((cond > tol) & (cond < 1 - tol)):
            return False
    return True


# --- block-static expansion --------------------------------------------------

def _power_rows(tr: np.ndarray, n: int, n_in: int) -> np.ndarray:
    """n-fold product of a transition with ``n_in`` leading input axes.

    ``tr`` has axes (inputs..., S, Y); the result has each input and the
    output replaced by its n-fold product alphabet, state held fixed.
    """
    out = tr
    for _ in range(n - 1):
        if n_in == 1:
            out = np.einsum("asb,xsy->axsby", out, tr)
            a, x, s, b, y = out.shape
            out = out.reshape(a * x, s, b * y)
        else:
            out = np.einsum("acsb,xzsy->axczsby", out, tr)
            a, x, c_, z, s, b, y = out.shape
            out = out.reshape(a * x, c_ * z, s, b * y)
    return out


def block_static_expand(c, n: int, cap: int = DEFAULT_STRATEGY_CAP):
    """Super-symbol channel for a state held constant over ``n`` uses.

    Works for :class:`StateChannel` and :class:`MacChannel`. ``n = 1``
    returns ``c`` itself.
    """
    if n < 1:
        raise ValueError("block length must be >= 1")
    if n == 1:
        return c
    if isinstance(c, StateChannel):
        ins, ny = [c.nx], c.ny
    elif isinstance(c, MacChannel):
        ins, ny = [c.nx1, c.nx2], c.ny
    else:
        raise TypeError(f"block_static_expand does not support {type(c).__name__}")
    for size in ins + [ny]:
        if size ** n > cap:
            raise SizeError(f"alphabet {size}^{n} = {size ** n} exceeds cap {cap}", count=size ** n)
    tr = _power_rows(c.transition, n, len(ins))
    if isinstance(c, StateChannel):
        return StateChannel(c.state_law, tr, name=f"{c.name}^{n}" if c.name else "")
    return MacChannel(c.state_law, tr, c.tx_states_independent, name=f"{c.name}^{n}" if c.name else "")
