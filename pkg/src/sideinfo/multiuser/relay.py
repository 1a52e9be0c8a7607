"""Physically degraded relay channel with state known at source, relay and destination.

The capacity is max over P(X_S, X_R | S) of

    min[ I(X_S, X_R; Y_D | S_D),  I(X_S; Y_R | X_R, S) ].

Both terms are concave in the input law, so the max-min is a concave
program. It is solved by projected supergradient ascent with restarts and
then polished on the epigraph form with SLSQP.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..capacity import DEFAULT_CONFIG, CapacityReport, SolverConfig, capacity_causal, capacity_rx_knows_tx
from ..channels import RelayChannel, StateChannel, _is_function, require_valid
from ..errors import HypothesisError, SizeError
from ..prob import simplex_grid_array

LN2 = np.log(2.0)
DEGRADED_TOL = 1e-9


@dataclass
class DegradednessReport:
    degraded: bool
    residual: float
    relay_stage: np.ndarray    # P(y_r | x_s, x_r, s)
    dest_stage: np.ndarray     # P(y_d | y_r, x_r, s_d)


def relay_check_degraded(r: RelayChannel, tol: float = DEGRADED_TOL) -> DegradednessReport:
    """Fit P(Y_R|X_S,X_R,S) P(Y_D|Y_R,X_R,S_D) and report the reassembly residual.

    Both stages are fitted by conditional averaging (X_S uniform, S drawn
    from P(S|S_D)); the residual is the largest absolute difference to the
    given transition over states of positive probability.
    """
    require_valid(r)
    tr, sl = r.transition, r.state_law
    live = sl > 0
    p_s = sl.sum(1)
    # relay stage: average over s_d given s
    w_sd = np.divide(sl, p_s[:, None], out=np.full_like(sl, 1.0 / r.nsd), where=p_s[:, None] > 0)
    first = np.einsum("sd,absdyz->absy", w_sd, tr)
    # destination stage: weights uniform over x_s and P(s|s_d)
    p_d = sl.sum(0)
    w_s = np.divide(sl, p_d[None, :], out=np.full_like(sl, 1.0 / r.ns), where=p_d[None, :] > 0)
    num = np.einsum("sd,absdyz->bdyz", w_s, tr) / r.nxs
    den = num.sum(-1, keepdims=True)
    second = np.divide(num, den, out=np.full_like(num, 1.0 / r.nyd), where=den > 0)
    recon = np.einsum("absy,bdyz->absdyz", first, second)
    diff = np.abs(recon - tr)[:, :, live]
    resid = float(diff.max()) if diff.size else 0.0
    return DegradednessReport(resid <= tol, resid, first, second.transpose(2, 0, 1, 3))


# --- objective -----------------------------------------------------------------

class _Objective:
    """Both information terms and their supergradients for ``p[s, a]``, ``a = (x_s, x_r)``."""

    def __init__(self, r: RelayChannel):
        self.r = r
        self.na = r.nxs * r.nxr
        tr = r.transition.reshape(self.na, r.ns, r.nsd, r.nyr, r.nyd)
        self.sl = r.state_law
        self.ps = r.state_law.sum(1)
        # destination: P(y_d | a, s, s_d)
        self.Wd = tr.sum(3)                                   # [a, s, d, yd]
        # relay: P(y_r | a, s), averaging s_d given s
        w = np.divide(self.sl, self.ps[:, None], out=np.zeros_like(self.sl), where=self.ps[:, None] > 0)
        self.Wr = np.einsum("sd,asdy->asy", w, tr.sum(4))     # [a, s, yr]

    @staticmethod
    def _cmi_and_grad(J):
        """I(A;B|C) in nats and dI/dJ for a batch ``J[n, c, a, b]``."""
        jc = J.sum((2, 3), keepdims=True)
        jca = J.sum(3, keepdims=True)
        jcb = J.sum(2, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.log(J) + np.log(jc) - np.log(jca) - np.log(jcb)
        g = np.where(J > 0, g, 0.0)
        return (J * g).sum((1, 2, 3)), g

    def terms(self, p, grad: bool = False):
        """Both terms in bits for ``p[s, a]`` or a batch ``p[n, s, a]``."""
        r = self.r
        p = np.asarray(p, dtype=float)
        single = p.ndim == 2
        P = p[None] if single else p
        if grad:
            P = (1 - 1e-12) * P + 1e-12 / self.na
        # term 1: I(A; Y_D | S_D); joint [d, a, yd]
        J1 = np.einsum("sd,nsa,asdy->nday", self.sl, P, self.Wd, optimize=True)
        # term 2: I(X_S; Y_R | X_R, S); joint [(s, x_r), x_s, yr]
        pa = P.reshape(len(P), r.ns, r.nxs, r.nxr)
        Wr = self.Wr.reshape(r.nxs, r.nxr, r.ns, r.nyr)
        J2 = np.einsum("s,nsib,ibsy->nsbiy", self.ps, pa, Wr, optimize=True)
        J2 = J2.reshape(len(P), r.ns * r.nxr, r.nxs, r.nyr)
        f1, g1 = self._cmi_and_grad(J1)
        f2, g2 = self._cmi_and_grad(J2)
        f1, f2 = f1 / LN2, f2 / LN2
        if not grad:
            return (float(f1[0]), float(f2[0])) if single else (f1, f2)
        d1 = np.einsum("sd,asdy,nday->nsa", self.sl, self.Wd, g1, optimize=True) / LN2
        g2 = g2.reshape(len(P), r.ns, r.nxr, r.nxs, r.nyr)
        d2 = np.einsum("s,ibsy,nsbiy->nsib", self.ps, Wr, g2, optimize=True).reshape(len(P), r.ns, self.na) / LN2
        if single:
            return float(f1[0]), float(f2[0]), d1[0], d2[0]
        return f1, f2, d1, d2

    def value(self, p):
        f1, f2 = self.terms(p)
        return np.minimum(f1, f2) if np.ndim(f1) else min(f1, f2)


def _project_rows(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row (last axis) onto the probability simplex."""
    shape = v.shape
    v = v.reshape(-1, shape[-1])
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    idx = np.arange(1, n + 1)
    cond = u - css / idx > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(v)), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0).reshape(shape)


def _polish(obj: _Objective, p0: np.ndarray, live: np.ndarray):
    """SLSQP on max t s.t. t <= f1(p), t <= f2(p), rows of p on the simplex."""
    ns, na = p0.shape
    rows = np.flatnonzero(live)

    def unpack(z):
        p = p0.copy()
        p[rows] = z[:-1].reshape(len(rows), na)
        return p, z[-1]

    def cons_f(z):
        p, t = unpack(z)
        f1, f2 = obj.terms(np.clip(p, 0, 1))
        return np.array([f1 - t, f2 - t])

    def cons_j(z):
        p, _ = unpack(z)
        _, _, d1, d2 = obj.terms(np.clip(p, 0, 1), grad=True)
        out = np.zeros((2, z.size))
        out[0, :-1], out[1, :-1] = d1[rows].ravel(), d2[rows].ravel()
        out[:, -1] = -1.0
        return out

    eq = np.zeros((len(rows), len(rows) * na + 1))
    for i in range(len(rows)):
        eq[i, i * na:(i + 1) * na] = 1.0
    z0 = np.concatenate([p0[rows].ravel(), [obj.value(p0)]])
    res = minimize(
        lambda z: -z[-1], z0, jac=lambda z: np.concatenate([np.zeros(z.size - 1), [-1.0]]),
        method="SLSQP", bounds=[(0, 1)] * (z0.size - 1) + [(None, None)],
        constraints=[{"type": "ineq", "fun": cons_f, "jac": cons_j},
                     {"type": "eq", "fun": lambda z: eq @ z - 1.0, "jac": lambda z: eq}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    p, _ = unpack(res.x)
    p = np.clip(p, 0, None)
    p /= p.sum(1, keepdims=True)
    return p


@dataclass
class RelayAchiever:
    law: np.ndarray          # P(x_s, x_r | s) as [s, x_s, x_r]
    destination_bits: float  # I(X_S, X_R; Y_D | S_D)
    relay_bits: float        # I(X_S; Y_R | X_R, S)

    @property
    def binding(self) -> str:
        if abs(self.destination_bits - self.relay_bits) <= 1e-6:
            return "both"
        return "destination" if self.destination_bits < self.relay_bits else "relay"


def relay_objective(r: RelayChannel, law) -> RelayAchiever:
    """Both terms at an explicit ``law[s, x_s, x_r]``."""
    obj = _Objective(r)
    law = np.asarray(law, dtype=float)
    f1, f2 = obj.terms(law.reshape(r.ns, -1))
    return RelayAchiever(law, f1, f2)


def relay_degraded_capacity(r: RelayChannel, cfg: SolverConfig = DEFAULT_CONFIG, iters: int = 2000,
                            restarts: int = 8, polish: bool = True) -> CapacityReport:
    """Capacity of a physically degraded relay channel; causal and non-causal coincide.

    Refuses channels that fail :func:`relay_check_degraded`.
    """
    deg = relay_check_degraded(r)
    if not deg.degraded:
        raise HypothesisError(f"relay channel is not physically degraded (residual {deg.residual:.3g})")
    notes = []
    if not _is_function(r.state_law.T, 1e-12):
        notes.append("S is not a function of S_D: the value is the max-min expression, "
                     "which need not be the capacity")
    obj = _Objective(r)
    live = obj.ps > 0
    rng = np.random.default_rng(cfg.seed)
    starts = [np.full((r.ns, obj.na), 1.0 / obj.na)]
    starts += [rng.dirichlet(np.ones(obj.na), size=r.ns) for _ in range(restarts - 1)]
    # all restarts advance together; each keeps its own best iterate
    P = np.stack(starts)
    best_v = obj.value(P)
    best_P = P.copy()
    mask = live[None, :, None]
    for k in range(1, iters + 1):
        f1, f2, d1, d2 = obj.terms(P, grad=True)
        g = np.where((f1 <= f2)[:, None, None], d1, d2) * mask
        norm = np.sqrt((g ** 2).sum((1, 2)))[:, None, None]
        step = np.divide(g, norm, out=np.zeros_like(g), where=norm > 0)
        P = _project_rows(P + (0.5 / np.sqrt(k)) * step)
        v = obj.value(P)
        up = v > best_v
        best_v = np.where(up, v, best_v)
        best_P[up] = P[up]
    total = iters * len(starts)
    i = int(np.argmax(best_v))  # first maximum: earliest start wins ties
    best_p, best_v = best_P[i], float(best_v[i])
    if polish:
        cand = _polish(obj, best_p, live)
        if obj.value(cand) > best_v:
            best_p, best_v = cand, obj.value(cand)
            notes.append("polished with SLSQP on the epigraph form")
    ach = relay_objective(r, best_p.reshape(r.ns, r.nxs, r.nxr))
    return CapacityReport(max(min(ach.destination_bits, ach.relay_bits), 0.0), ach, total, len(starts),
                          True, notes=tuple(notes))


def relay_oracle_grid(r: RelayChannel, k: int = 24, budget: int = 10**6) -> CapacityReport:
    """Exhaustive max-min over a resolution-``k`` grid of P(x_s, x_r | s)."""
    obj = _Objective(r)
    live = np.flatnonzero(obj.ps > 0)
    g = simplex_grid_array(obj.na, k, max_points=budget)
    count = len(g) ** len(live)
    if count > budget:
        raise SizeError(f"relay grid needs {count} points (budget {budget})", count=count)
    base = np.full((r.ns, obj.na), 1.0 / obj.na)
    best_v, best = -np.inf, None
    combos = np.array(list(np.ndindex(*(len(g),) * len(live))), dtype=np.intp).reshape(count, len(live))
    for start in range(0, count, 20000):
        idx = combos[start:start + 20000]
        P = np.broadcast_to(base, (len(idx),) + base.shape).copy()
        for col, s in enumerate(live):
            P[:, s] = g[idx[:, col]]
        vals = obj.value(P)
        i = int(np.argmax(vals))
        if vals[i] > best_v + 1e-15:
            best_v, best = float(vals[i]), P[i]
    return CapacityReport(max(best_v, 0.0), relay_objective(r, best.reshape(r.ns, r.nxs, r.nxr)),
                          iterations=count, converged=True)


def direct_channel(r: RelayChannel, x_r: int) -> StateChannel:
    """Source-to-destination channel with the relay input frozen at ``x_r``.

    The channel state is the pair (S, S_D); the source sees S and the
    destination sees S_D.
    """
    # P(y_d | x_s, s, s_d) with the joint state index flattened
    tr = r.transition[:, x_r].sum(3)  # [x_s, s, d, yd]
    flat = np.zeros((r.ns * r.nsd, r.ns, r.nsd))
    for s in range(r.ns):
        for d in range(r.nsd):
            flat[s * r.nsd + d, s, d] = r.state_law[s, d]
    return StateChannel(flat, tr.reshape(r.nxs, r.ns * r.nsd, r.nyd))


def direct_capacity(r: RelayChannel, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Best capacity of the source-to-destination link over constant relay inputs."""
    best = 0.0
    for xr in range(r.nxr):
        c = direct_channel(r, xr)
        try:
            v = capacity_rx_knows_tx(c, cfg).value_bits
        except HypothesisError:
            v = capacity_causal(c, cfg).value_bits
        best = max(best, v)
    return best
