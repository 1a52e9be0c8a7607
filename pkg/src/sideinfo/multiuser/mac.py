"""Two-user multiple access channel with transmitter side information.

Each user's auxiliary is taken to be its strategy letter ``t_i`` (a map
S_Ti -> X_i), so that ``f_i(u, s) = table_i[u, s]``. For the causal sum
rate and for the non-causal inner bound this loses nothing: given
(T1, T2) the auxiliaries reach the output only through the states.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import kernels
from ..capacity import DEFAULT_CONFIG, LN2, CapacityReport, SolverConfig
from ..channels import MacChannel, _is_function, require_valid, strategy_table
from ..errors import HypothesisError, SizeError
from ..prob import entropy_rows, simplex_grid_array
from .region import RateRegion, pentagon_region


@dataclass(frozen=True, eq=False)
class MacAuxCode:
    """Product auxiliary code: ``u_i_law[s_ti, u]`` and ``x_i = f_i[u, s_ti]``.

    In the causal case the law rows are identical (U_i independent of S_Ti).
    """

    u1_law: np.ndarray
    u2_law: np.ndarray
    f1: np.ndarray
    f2: np.ndarray

    def __post_init__(self):
        for name in ("u1_law", "u2_law"):
            law = np.asarray(getattr(self, name), dtype=float)
            if law.ndim != 2 or np.any(law < 0) or np.any(np.abs(law.sum(1) - 1) > 1e-9):
                raise ValueError(f"{name} rows must be distributions")
            object.__setattr__(self, name, law)
        for name, law in (("f1", self.u1_law), ("f2", self.u2_law)):
            f = np.asarray(getattr(self, name), dtype=np.intp)
            if f.shape != (law.shape[1], law.shape[0]):
                raise ValueError(f"{name} has shape {f.shape}, expected {(law.shape[1], law.shape[0])}")
            object.__setattr__(self, name, f)


# --- channel transforms --------------------------------------------------------

def _tx_law(m: MacChannel) -> np.ndarray:
    return m.state_law.sum(axis=(0, 3))


def mac_strategy_channel(m: MacChannel, cap: int):
    """``W[a, b, t1, t2, z] = P(y, s_R | t1, t2, s_T1=a, s_T2=b)`` and the tables.

    Output index ``z = y*|S_R| + s_R``. Rows for zero-probability (a, b)
    pairs hold the unconditional law.
    """
    t1 = strategy_table(m.nx1, m.nst1, cap)
    t2 = strategy_table(m.nx2, m.nst2, cap)
    sl, tr = m.state_law, m.transition
    # P(s, s_R | a, b)
    p12 = _tx_law(m)
    W = np.empty((m.nst1, m.nst2, len(t1), len(t2), m.ny, m.nsr))
    for a in range(m.nst1):
        for b in range(m.nst2):
            cond = sl[:, a, b, :] / p12[a, b] if p12[a, b] > 0 else sl.sum(axis=(1, 2))
            sub = tr[t1[:, a]][:, t2[:, b]]  # [t1, t2, s, y]
            W[a, b] = np.einsum("sr,ijsy->ijyr", cond, sub)
    return W.reshape(m.nst1, m.nst2, len(t1), len(t2), m.ny * m.nsr), p12, t1, t2


def _check_independent(m: MacChannel, allow_correlated: bool) -> list:
    if m.tx_states_independent:
        return []
    if not allow_correlated:
        raise HypothesisError(
            "transmitter states are not flagged independent; the sum-capacity "
            "characterisation assumes P(S_T1,S_T2) = P(S_T1)P(S_T2)")
    return ["correlated transmitter states: value is achievable with independent "
            "strategy codebooks but is not shown to be the sum capacity"]


def _restart_laws(rng, n: int, size: int, count: int):
    out = [np.full((n, size), 1.0 / size)]
    for _ in range(count):
        out.append(rng.dirichlet(np.ones(size), size=n))
    return out


# --- sum rates ------------------------------------------------------------------

def mac_sum_capacity_causal(m: MacChannel, cfg: SolverConfig = DEFAULT_CONFIG,
                            allow_correlated: bool = False) -> CapacityReport:
    """max I(T1, T2; Y, S_R) over independent strategy laws P(T1)P(T2).

    The objective is not concave in the pair of laws, so coordinate ascent
    is restarted from the uniform pair and ``cfg.restarts`` random pairs.
    """
    require_valid(m)
    notes = _check_independent(m, allow_correlated)
    W, p12, t1, t2 = mac_strategy_channel(m, cfg.strategy_cap)
    Wc = np.einsum("ab,abijz->ijz", p12, W)[None, None]
    one = np.ones((1, 1))
    rng = np.random.default_rng(cfg.seed)
    starts = list(zip(_restart_laws(rng, 1, len(t1), cfg.restarts), _restart_laws(rng, 1, len(t2), cfg.restarts)))
    best, iters = None, 0
    for q1, q2 in starts:
        r1, r2, v, it, _ = kernels.mac(Wc, one, q1, q2, cfg.tol_bits * LN2, cfg.max_iter, True)
        iters += it
        if best is None or v > best[2]:
            best = (r1, r2, v, it)
    r1, r2, v, it = best
    code = MacAuxCode(np.tile(r1[0], (m.nst1, 1)), np.tile(r2[0], (m.nst2, 1)), t1, t2)
    return CapacityReport(max(v / LN2, 0.0), code, iters, len(starts), it < cfg.max_iter, notes=tuple(notes))


def mac_noncausal_inner_sum(m: MacChannel, cfg: SolverConfig = DEFAULT_CONFIG,
                            causal: Optional[CapacityReport] = None) -> CapacityReport:
    """max I(T1,T2; Y,S_R) - I(T1; S_T1) - I(T2; S_T2) over P(T1|S_T1)P(T2|S_T2).

    This is an achievable sum rate with non-causal side information; no
    converse is known. The search starts from the causal achiever, so the
    value never falls below the causal sum rate.
    """
    require_valid(m)
    _check_independent(m, False)
    if causal is None:
        causal = mac_sum_capacity_causal(m, cfg)
    W, p12, t1, t2 = mac_strategy_channel(m, cfg.strategy_cap)
    rng = np.random.default_rng(cfg.seed + 1)
    starts = [(causal.achiever.u1_law, causal.achiever.u2_law)]
    starts += list(zip(_restart_laws(rng, m.nst1, len(t1), cfg.restarts),
                       _restart_laws(rng, m.nst2, len(t2), cfg.restarts)))
    best, iters = None, 0
    for q1, q2 in starts:
        r1, r2, v, it, _ = kernels.mac(W, p12, q1, q2, cfg.tol_bits * LN2, cfg.max_iter, False)
        iters += it
        if best is None or v > best[2]:
            best = (r1, r2, v, it)
    r1, r2, v, it = best
    notes = ("achievable inner bound; no converse is known for non-causal MAC side information",)
    return CapacityReport(max(v / LN2, 0.0), MacAuxCode(r1, r2, t1, t2), iters, len(starts),
                          it < cfg.max_iter, notes=notes)


def mac_sum_objective(m: MacChannel, code: MacAuxCode, causal: bool = False) -> float:
    """Sum-rate objective in bits at an explicit code (subtractive terms unless ``causal``)."""
    W, p12, _, _ = _code_channel(m, code)
    return float(_nc_batch(W, p12, code.u1_law[None], code.u2_law[None], causal)[0])


def _code_channel(m: MacChannel, code: MacAuxCode):
    sl, tr = m.state_law, m.transition
    p12 = _tx_law(m)
    n1, n2 = code.u1_law.shape[1], code.u2_law.shape[1]
    W = np.empty((m.nst1, m.nst2, n1, n2, m.ny, m.nsr))
    for a in range(m.nst1):
        for b in range(m.nst2):
            cond = sl[:, a, b, :] / p12[a, b] if p12[a, b] > 0 else sl.sum(axis=(1, 2))
            sub = tr[code.f1[:, a]][:, code.f2[:, b]]
            W[a, b] = np.einsum("sr,ijsy->ijyr", cond, sub)
    return W.reshape(m.nst1, m.nst2, n1, n2, -1), p12, n1, n2


def _nc_batch(W, p12, Q1, Q2, causal: bool) -> np.ndarray:
    """Objective for batches ``Q1[B, a, t1]``, ``Q2[B, b, t2]``, in bits."""
    J = np.einsum("ab,Bai,Bbj,abijz->Bijz", p12, Q1, Q2, W, optimize=True)
    h_z = entropy_rows(J.sum((1, 2)), 1)
    h_t = entropy_rows(J.sum(3), (1, 2))
    h_tz = entropy_rows(J, (1, 2, 3))
    val = h_z + h_t - h_tz
    if not causal:
        p1, p2 = p12.sum(1), p12.sum(0)
        for Q, p in ((Q1, p1), (Q2, p2)):
            h_marg = entropy_rows(np.einsum("a,Bai->Bi", p, Q), 1)
            h_cond = (entropy_rows(Q, 2) * p[None, :]).sum(1)
            val = val - (h_marg - h_cond)
    return val


def _row_grid(n_rows: int, dim: int, k: int, budget: int) -> np.ndarray:
    """All combinations of ``n_rows`` grid rows: array ``[G, n_rows, dim]``."""
    g = simplex_grid_array(dim, k, max_points=budget)
    count = len(g) ** n_rows
    if count > budget:
        raise SizeError(f"{len(g)}^{n_rows} = {count} grid laws exceed budget {budget}", count=count)
    idx = np.array(list(itertools.product(range(len(g)), repeat=n_rows)), dtype=np.intp).reshape(count, n_rows)
    return g[idx]


def mac_oracle_grid(m: MacChannel, k: int, causal: bool = True, budget: int = 10**7,
                    chunk: int = 32768, allow_correlated: bool = False) -> CapacityReport:
    """Exhaustive simplex-grid search of the causal sum rate or the non-causal inner sum.

    Causal: grid over P(T1) x P(T2). Non-causal: grid over every row of
    P(T1|S_T1) and P(T2|S_T2). Returns the best grid value, a lower bound
    on the corresponding maximum.
    """
    require_valid(m)
    _check_independent(m, allow_correlated)
    W, p12, t1, t2 = mac_strategy_channel(m, 4096)
    if causal:
        W = np.einsum("ab,abijz->ijz", p12, W)[None, None]
        p12 = np.ones((1, 1))
    n1, n2 = W.shape[0], W.shape[1]
    G1 = _row_grid(n1, len(t1), k, budget)
    G2 = _row_grid(n2, len(t2), k, budget)
    count = len(G1) * len(G2)
    if count > budget:
        raise SizeError(f"MAC grid oracle needs {len(G1)} x {len(G2)} = {count} evaluations (budget {budget})",
                        count=count)
    best_v, best = -np.inf, None
    step = max(1, chunk // len(G2))
    for s in range(0, len(G1), step):
        blk = G1[s:s + step]
        Q1 = np.repeat(blk, len(G2), axis=0)
        Q2 = np.tile(G2, (len(blk), 1, 1))
        vals = _nc_batch(W, p12, Q1, Q2, causal)
        i = int(np.argmax(vals))
        if vals[i] > best_v + 1e-15:
            best_v = float(vals[i])
            q1, q2 = Q1[i], Q2[i]
            if causal:
                q1, q2 = np.tile(q1[0], (m.nst1, 1)), np.tile(q2[0], (m.nst2, 1))
            best = MacAuxCode(q1, q2, t1, t2)
    return CapacityReport(max(best_v, 0.0), best, iterations=count, converged=True)


# --- region when the receiver knows both transmitter states --------------------

def rx_knows_both(m: MacChannel, tol: float = 1e-12) -> bool:
    """Whether (S_T1, S_T2) is a deterministic function of S_R."""
    p = m.state_law.sum(axis=0).reshape(m.nst1 * m.nst2, m.nsr)
    return _is_function(p, tol)


def _input_bounds(m: MacChannel, P1: np.ndarray, P2: np.ndarray) -> np.ndarray:
    """Batches ``P1[B, a, x1]``, ``P2[B, b, x2]`` -> ``[B, 3]`` of
    I(X1;Y|X2,S_R), I(X2;Y|X1,S_R), I(X1,X2;Y|S_R) in bits."""
    J = np.einsum("sabr,Bai,Bbj,ijsy->Brijy", m.state_law, P1, P2, m.transition, optimize=True)

    def H(keep):
        drop = tuple(ax for ax in (1, 2, 3, 4) if ax not in keep)
        M = J.sum(axis=drop) if drop else J
        return entropy_rows(M, tuple(range(1, M.ndim)))

    h_r12y = H((1, 2, 3, 4))
    i1 = H((1, 2, 3)) + H((1, 3, 4)) - h_r12y - H((1, 3))
    i2 = H((1, 2, 3)) + H((1, 2, 4)) - h_r12y - H((1, 2))
    i12 = H((1, 2, 3)) + H((1, 4)) - h_r12y - H((1,))
    return np.maximum(np.stack([i1, i2, i12], axis=1), 0.0)


def mac_region_rx_knows(m: MacChannel, k: int = 12, budget: int = 10**6) -> RateRegion:
    """Capacity region when (S_T1, S_T2) = f(S_R), from a grid of P(X1|S_T1)P(X2|S_T2).

    Each sampled input law contributes the pentagon of its three bounds;
    the region is the convex hull of all pentagon corners.
    """
    require_valid(m)
    if not m.tx_states_independent:
        raise HypothesisError("the region characterisation needs independent transmitter states")
    if not rx_knows_both(m):
        raise HypothesisError("(S_T1, S_T2) is not a deterministic function of S_R; "
                              "the causal and non-causal regions need not coincide")
    G1 = _row_grid(m.nst1, m.nx1, k, budget)
    G2 = _row_grid(m.nst2, m.nx2, k, budget)
    if len(G1) * len(G2) > budget:
        raise SizeError(f"{len(G1)} x {len(G2)} input laws exceed budget {budget}", count=len(G1) * len(G2))
    step = max(1, 32768 // len(G2))
    bounds = np.concatenate([
        _input_bounds(m, np.repeat(G1[i:i + step], len(G2), axis=0), np.tile(G2, (len(G1[i:i + step]), 1, 1)))
        for i in range(0, len(G1), step)])
    return pentagon_region(bounds, _PairLaws(G1, G2))


class _PairLaws:
    """Lazy list of (P(X1|S_T1), P(X2|S_T2)) pairs in row-major order."""

    def __init__(self, G1, G2):
        self.G1, self.G2 = G1, G2

    def __len__(self):
        return len(self.G1) * len(self.G2)

    def __getitem__(self, n):
        i, j = divmod(int(n), len(self.G2))
        return self.G1[i], self.G2[j]
