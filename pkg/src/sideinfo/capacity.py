"""Single-user capacity with transmitter and receiver side information.

Causal capacity is computed exactly by Blahut-Arimoto over Shannon's
strategy alphabet. Non-causal (Gel'fand-Pinsker) capacity is a non-concave
problem and is attacked by multi-restart alternating ascent; the grid
oracle in :func:`gp_oracle_grid` gives an independent lower bound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from . import kernels
from .channels import (
    DEFAULT_STRATEGY_CAP,
    StateChannel,
    conditional_output,
    drop_rx_info,
    drop_tx_info,
    require_valid,
    strategy_by_state,
    strategy_table,
    strategy_transform,
    tx_is_function_of_rx,
    with_output_side_info,
)
from .errors import HypothesisError, SizeError
from .prob import entropy_rows, simplex_grid_array

LN2 = np.log(2.0)


@dataclass(frozen=True)
class SolverConfig:
    tol_bits: float = 1e-9
    max_iter: int = 5000
    ba_max_iter: int = 200_000
    restarts: int = 32
    seed: int = 0
    strategy_cap: int = DEFAULT_STRATEGY_CAP
    fmap_enum_cap: int = 100_000
    fmap_samples: int = 512
    grid_budget: int = 10**7
    u_cardinality: Optional[int] = None
    method: str = "strategies"

    def __post_init__(self):
        if self.tol_bits <= 0 or self.max_iter <= 0 or self.restarts < 0:
            raise ValueError("tolerance and iteration limits must be positive")
        if self.method not in ("strategies", "fmaps"):
            raise ValueError(f"unknown non-causal method {self.method!r}")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True, eq=False)
class AuxCode:
    """Auxiliary code: ``u_law[s_t, u] = P(u | s_t)`` and ``x = f_map[u, s_t]``."""

    u_law: np.ndarray
    f_map: np.ndarray
    causal: bool = False

    def __post_init__(self):
        law = np.asarray(self.u_law, dtype=float)
        f = np.asarray(self.f_map, dtype=np.intp)
        if law.ndim != 2 or f.shape != (law.shape[1], law.shape[0]):
            raise ValueError(f"u_law {law.shape} and f_map {f.shape} disagree")
        if np.any(law < 0) or np.any(np.abs(law.sum(1) - 1) > 1e-9):
            raise ValueError("u_law rows must be distributions")
        if self.causal and np.any(np.abs(law - law[0]) > 1e-12):
            raise ValueError("causal AuxCode needs identical rows (U independent of S_T)")
        object.__setattr__(self, "u_law", law)
        object.__setattr__(self, "f_map", f)

    @property
    def u_size(self) -> int:
        return self.u_law.shape[1]


@dataclass
class CapacityReport:
    value_bits: float
    achiever: Any = None
    iterations: int = 0
    restarts_used: int = 0
    converged: bool = True
    oracle_gap_bits: Optional[float] = None
    upper_bits: Optional[float] = None
    exhaustive: bool = True
    notes: tuple = ()
    trace: Optional[np.ndarray] = field(default=None, repr=False)


# --- Blahut-Arimoto ---------------------------------------------------------

def blahut_arimoto(dmc, tol: float = 1e-9, max_iter: int = 200_000, p0=None) -> CapacityReport:
    """Capacity of the DMC ``dmc[x, y]`` in bits.

    Iterates until the duality gap ``max_x D(W_x||pW) - I(p)`` drops below
    ``tol`` bits, so the returned value is within ``tol`` of capacity when
    ``converged`` is set.
    """
    W = np.asarray(dmc, dtype=float)
    if W.ndim != 2:
        raise ValueError("dmc must be a 2-D transition matrix")
    n = W.shape[0]
    p = np.full(n, 1.0 / n) if p0 is None else np.asarray(p0, dtype=float)
    p, lo, up, it, hist = kernels.ba(W, p, tol * LN2, max_iter)
    return CapacityReport(
        value_bits=max(lo / LN2, 0.0),
        achiever=p,
        iterations=int(it),
        converged=bool(up - lo <= tol * LN2),
        upper_bits=up / LN2,
        trace=hist / LN2,
    )


def capacity_no_si(c: StateChannel, cfg: SolverConfig = DEFAULT_CONFIG) -> CapacityReport:
    """max_{P(X)} I(X; Y, S_R): transmitter ignores its side information."""
    require_valid(c)
    rep = blahut_arimoto(with_output_side_info(c), cfg.tol_bits, cfg.ba_max_iter)
    return rep


def capacity_causal(c: StateChannel, cfg: SolverConfig = DEFAULT_CONFIG) -> CapacityReport:
    """Causal-SI capacity as BA over the strategy alphabet."""
    require_valid(c)
    table = strategy_table(c.nx, c.nst, cfg.strategy_cap)
    rep = blahut_arimoto(strategy_transform(c, cfg.strategy_cap), cfg.tol_bits, cfg.ba_max_iter)
    rep.achiever = AuxCode(np.tile(rep.achiever, (c.nst, 1)), table, causal=True)
    return rep


# --- receiver knows transmitter state ---------------------------------------

def capacity_rx_knows_tx(c: StateChannel, cfg: SolverConfig = DEFAULT_CONFIG) -> CapacityReport:
    """max_{P(X|S_T)} I(X; Y | S_R), valid when S_T is a function of S_R.

    The problem splits over transmitter states: for each ``s_T`` a BA run on
    the channel ``x -> (y, s_R)`` conditioned on ``s_T``.
    """
    require_valid(c)
    if not tx_is_function_of_rx(c):
        raise HypothesisError(
            "S_T is not a deterministic function of S_R; causal and non-causal "
            "capacities need not coincide and max I(X;Y|S_R) is not the capacity"
        )
    cond = conditional_output(c)
    pst = c.state_law.sum(axis=(0, 2))
    law = np.full((c.nst, c.nx), 1.0 / c.nx)
    value = upper = 0.0
    iters, ok = 0, True
    for st in range(c.nst):
        if pst[st] <= 0:
            continue
        rep = blahut_arimoto(cond[st], cfg.tol_bits, cfg.ba_max_iter)
        law[st] = rep.achiever
        value += pst[st] * rep.value_bits
        upper += pst[st] * rep.upper_bits
        iters += rep.iterations
        ok &= rep.converged
    return CapacityReport(value, achiever=law, iterations=iters, converged=ok, upper_bits=upper)


# --- non-causal -------------------------------------------------------------

def _starts(rng: np.random.Generator, ns: int, nt: int, n: int) -> list[np.ndarray]:
    out = [np.full((ns, nt), 1.0 / nt)]
    for _ in range(n):
        out.append(rng.dirichlet(np.ones(nt), size=ns))
    return out


def _ascend(W, ps, starts, cfg: SolverConfig):
    """Best run of the GP kernel over ``starts``; ties go to the earliest start."""
    best = None
    iters = 0
    for k, q0 in enumerate(starts):
        q, v, it, _ = kernels.gp(W, ps, q0, cfg.tol_bits * LN2, cfg.max_iter, False)
        iters += it
        if best is None or v > best[1]:
            best = (q, v, it, k)
    q, v, it, _ = best
    return q, v / LN2, iters, it < cfg.max_iter


def _fmap_tables(nx: int, nu: int, nst: int, cfg: SolverConfig, rng: np.random.Generator):
    n = nx ** (nu * nst)
    if n <= cfg.fmap_enum_cap:
        return (np.array(f, dtype=np.intp).reshape(nu, nst)
                for f in itertools.product(range(nx), repeat=nu * nst)), True, n
    picks = rng.integers(0, nx, size=(cfg.fmap_samples, nu, nst))
    # lexicographic order keeps tie-breaking reproducible
    order = np.lexsort(picks.reshape(cfg.fmap_samples, -1).T[::-1])
    return iter(picks[order]), False, cfg.fmap_samples


def capacity_noncausal(c: StateChannel, cfg: SolverConfig = DEFAULT_CONFIG) -> CapacityReport:
    """Gel'fand-Pinsker capacity max I(U; Y, S_R) - I(U; S_T).

    With ``cfg.method == "strategies"`` the auxiliary is the strategy
    alphabet itself (``u = t``, ``x = t(s_T)``), which loses nothing.
    ``"fmaps"`` searches deterministic maps ``x = f(u, s_T)`` for a fixed
    ``|U|`` instead. Both restart from the causal achiever, the uniform law
    and ``cfg.restarts`` Dirichlet draws.
    """
    require_valid(c)
    pst = c.state_law.sum(axis=(0, 2))
    rng = np.random.default_rng(cfg.seed)
    causal = capacity_causal(c, cfg)
    notes = []

    if cfg.method == "strategies" or c.nst == 1:
        W = strategy_by_state(c, cfg.strategy_cap)
        table = strategy_table(c.nx, c.nst, cfg.strategy_cap)
        if c.nst == 1:
            # no transmitter state: the objective is concave, one run suffices
            starts = [causal.achiever.u_law]
            notes.append("|S_T| = 1: concave problem, single start")
        else:
            starts = [causal.achiever.u_law] + _starts(rng, c.nst, W.shape[1], cfg.restarts)
        q, v, iters, ok = _ascend(W, pst, starts, cfg)
        return CapacityReport(
            max(v, 0.0), AuxCode(q, table), iters, len(starts), ok, exhaustive=True, notes=tuple(notes)
        )

    nu = cfg.u_cardinality or c.nx * c.nst
    cond = conditional_output(c)
    maps, exhaustive, nmaps = _fmap_tables(c.nx, nu, c.nst, cfg, rng)
    if not exhaustive:
        notes.append(f"{c.nx}^({nu}*{c.nst}) maps exceed the enumeration cap; sampled {nmaps}")
    best = None
    total = 0
    for f in maps:
        W = np.stack([cond[st, f[:, st], :] for st in range(c.nst)])
        starts = _starts(rng, c.nst, nu, cfg.restarts)
        q, v, iters, ok = _ascend(W, pst, starts, cfg)
        total += iters
        if best is None or v > best[1]:
            best = (q, v, f, ok)
    q, v, f, ok = best
    return CapacityReport(
        max(v, 0.0), AuxCode(q, f), total, nmaps * (cfg.restarts + 1), ok,
        exhaustive=exhaustive, notes=tuple(notes),
    )


def gp_objective(c: StateChannel, code: AuxCode) -> float:
    """I(U; Y, S_R) - I(U; S_T) in bits for an explicit auxiliary code."""
    cond = conditional_output(c)
    pst = c.state_law.sum(axis=(0, 2))
    W = np.stack([cond[st, code.f_map[:, st], :] for st in range(c.nst)])
    return float(_gp_batch(W, pst, code.u_law[None])[0])


def _gp_batch(W: np.ndarray, ps: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Objective for a batch ``Q[b, s, u]`` of auxiliary laws, in bits.

    I(U;Z) - I(U;S) = H(Z) - H(U,Z) + H(U|S).
    """
    j = np.einsum("s,bsu,suz->buz", ps, Q, W)
    hz = entropy_rows(j.sum(1), 1)
    huz = entropy_rows(j, (1, 2))
    hus = (entropy_rows(Q, 2) * ps[None, :]).sum(1)
    return hz - huz + hus


def gp_oracle_grid(c: StateChannel, k: int, u_size: int, budget: int = 10**7,
                   chunk: int = 20_000) -> CapacityReport:
    """Exhaustive search of the Gel'fand-Pinsker objective on a simplex grid.

    Every deterministic map ``f: U x S_T -> X`` is paired with every
    combination of grid rows ``P(U | s_T)`` of resolution ``1/k``. The
    maximum is a lower bound on the non-causal capacity.
    """
    require_valid(c)
    pst = c.state_law.sum(axis=(0, 2))
    live = np.flatnonzero(pst > 0)
    grid = simplex_grid_array(u_size, k, max_points=budget)
    nmaps = c.nx ** (u_size * c.nst)
    combos = len(grid) ** len(live)
    count = nmaps * combos
    if count > budget:
        raise SizeError(
            f"grid oracle needs {nmaps} maps x {combos} grid points = {count} evaluations "
            f"(budget {budget})", count=count)
    cond = conditional_output(c)
    best_v, best = -np.inf, None
    for f in itertools.product(range(c.nx), repeat=u_size * c.nst):
        f = np.array(f, dtype=np.intp).reshape(u_size, c.nst)
        W = np.stack([cond[st, f[:, st], :] for st in range(c.nst)])
        for start in range(0, combos, chunk):
            idx = np.arange(start, min(start + chunk, combos))
            digits = np.stack(np.unravel_index(idx, (len(grid),) * len(live)), axis=1) if live.size else np.zeros((len(idx), 0), int)
            Q = np.broadcast_to(grid[0], (len(idx), c.nst, u_size)).copy()
            for col, st in enumerate(live):
                Q[:, st, :] = grid[digits[:, col]]
            vals = _gp_batch(W, pst, Q)
            i = int(np.argmax(vals))
            if vals[i] > best_v + 1e-15:
                best_v, best = float(vals[i]), AuxCode(Q[i], f)
    return CapacityReport(max(best_v, 0.0), best, iterations=count, restarts_used=0,
                          converged=True, exhaustive=True)


def with_oracle_gap(rep: CapacityReport, oracle: CapacityReport) -> CapacityReport:
    return replace(rep, oracle_gap_bits=rep.value_bits - oracle.value_bits)


# --- the eight-case table ---------------------------------------------------

CASES = [
    ("non-causal", "S_T", "S_R"),
    ("non-causal", "-", "S_R"),
    ("non-causal", "S_T", "-"),
    ("non-causal", "-", "-"),
    ("causal", "S_T", "S_R"),
    ("causal", "-", "S_R"),
    ("causal", "S_T", "-"),
    ("causal", "-", "-"),
]


@dataclass
class CommonFormTable:
    values: dict
    checks: list

    @property
    def ok(self) -> bool:
        return all(passed for _, _, passed in self.checks)

    def __getitem__(self, key):
        return self.values[key]


def common_form_table(c: StateChannel, cfg: SolverConfig = DEFAULT_CONFIG, eq_tol: float = 2e-3) -> CommonFormTable:
    """All eight capacities (causal/non-causal x S_T kept/dropped x S_R kept/dropped).

    ``checks`` holds ``(label, slack, passed)`` for the equalities forced by
    the common form and the dominance relations between rows.
    """
    variants = {
        ("S_T", "S_R"): c,
        ("-", "S_R"): drop_tx_info(c),
        ("S_T", "-"): drop_rx_info(c),
        ("-", "-"): drop_rx_info(drop_tx_info(c)),
    }
    values = {}
    for mode, st, sr in CASES:
        ch = variants[(st, sr)]
        rep = capacity_noncausal(ch, cfg) if mode == "non-causal" else capacity_causal(ch, cfg)
        values[(mode, st, sr)] = rep.value_bits

    checks = []
    for sr in ("S_R", "-"):
        a, b = values[("causal", "-", sr)], values[("non-causal", "-", sr)]
        checks.append((f"C^c(-,{sr}) = C^nc(-,{sr})", eq_tol - abs(a - b), abs(a - b) <= eq_tol))
    for sr in ("S_R", "-"):
        nc, ca, none = values[("non-causal", "S_T", sr)], values[("causal", "S_T", sr)], values[("causal", "-", sr)]
        checks.append((f"C^nc(S_T,{sr}) >= C^c(S_T,{sr})", nc - ca + 1e-9, nc >= ca - 1e-9))
        checks.append((f"C^c(S_T,{sr}) >= C(-,{sr})", ca - none + 1e-9, ca >= none - 1e-9))
    if tx_is_function_of_rx(c):
        a, b = values[("causal", "S_T", "S_R")], values[("non-causal", "S_T", "S_R")]
        checks.append(("S_T = f(S_R): C^c(S_T,S_R) = C^nc(S_T,S_R)", eq_tol - abs(a - b), abs(a - b) <= eq_tol))
    return CommonFormTable(values, checks)
