"""Broadcast-channel inner-bound evaluators with transmitter side information.

An auxiliary law is ``law[s_T, w, u, v, x] = P(w, u, v, x | s_T)``. Every
bound is computed from the explicitly assembled joint over

    (S_T, S_R1, S_R2, W, U, V, X, Y1, Y2)

so the evaluators share one code path and differ only in which
information terms they combine.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channels import BcChannel, require_valid
from ..prob import mi_groups
from .region import RateRegion, pentagon_region

ST, R1, R2, W, U, V, X, Y1, Y2 = range(9)
INDEP_TOL = 1e-12
OBS1_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BcAuxLaw:
    """``law[s_T, w, u, v, x]``; causal mode needs P(w, u, v | s_T) free of s_T."""

    law: np.ndarray
    mode: str = "noncausal"

    def __post_init__(self):
        law = np.array(self.law, dtype=float)
        if law.ndim != 5:
            raise ValueError(f"law must have axes (S_T, W, U, V, X), got rank {law.ndim}")
        if np.any(law < 0):
            raise ValueError("law has negative entries")
        tot = law.reshape(law.shape[0], -1).sum(1)
        if np.any(np.abs(tot - 1) > 1e-9):
            raise ValueError("each P(w, u, v, x | s_T) must sum to 1")
        if self.mode not in ("causal", "noncausal"):
            raise ValueError(f"mode must be 'causal' or 'noncausal', not {self.mode!r}")
        if self.mode == "causal":
            aux = law.sum(-1)
            if np.any(np.abs(aux - aux[0]) > INDEP_TOL):
                raise ValueError("causal mode needs the auxiliaries independent of S_T")
        law.setflags(write=False)
        object.__setattr__(self, "law", law)

    @classmethod
    def causal(cls, aux, x_map) -> "BcAuxLaw":
        """From ``aux[w, u, v]`` and ``x_map[w, u, v, s_T, x] = P(x | w, u, v, s_T)``."""
        aux = np.asarray(aux, dtype=float)
        x_map = np.asarray(x_map, dtype=float)
        law = np.einsum("wuv,wuvsx->swuvx", aux, x_map)
        return cls(law, "causal")

    @property
    def sizes(self) -> dict:
        s = self.law.shape
        return {"s_t": s[0], "w": s[1], "u": s[2], "v": s[3], "x": s[4]}


@dataclass
class BcBounds:
    """Rate bounds for one auxiliary law; ``terms`` holds the raw information quantities."""

    r1_bits: float
    r2_bits: float
    sum_bits: float
    terms: dict = field(default_factory=dict)
    alternatives: dict = field(default_factory=dict)

    def as_row(self) -> np.ndarray:
        return np.array([self.r1_bits, self.r2_bits, self.sum_bits])


def assemble_joint(bc: BcChannel, a: BcAuxLaw) -> np.ndarray:
    """Joint mass over (S_T, S_R1, S_R2, W, U, V, X, Y1, Y2)."""
    require_valid(bc)
    if a.law.shape[0] != bc.nst or a.law.shape[4] != bc.nx:
        raise ValueError(f"law sizes {a.sizes} do not fit channel {bc.sizes()}")
    return np.einsum("abc,awuvx,xayz->abcwuvxyz", bc.state_law, a.law, bc.transition)


def _mi(j, a, b, c=()):
    return mi_groups(j, list(a), list(b), list(c))


def bc_eval_causal(bc: BcChannel, a: BcAuxLaw) -> BcBounds:
    """Marton bounds with causal side information.

    The sum bound uses min{I(W;Y1|S_R1), I(W;Y2|S_R2)}; the literal
    two-term sum is kept in ``alternatives["sum_literal"]``.
    """
    if a.mode != "causal":
        raise ValueError("bc_eval_causal needs a causal-mode law")
    j = assemble_joint(bc, a)
    t = {
        "I(WU;Y1|SR1)": _mi(j, (W, U), (Y1,), (R1,)),
        "I(WV;Y2|SR2)": _mi(j, (W, V), (Y2,), (R2,)),
        "I(W;Y1|SR1)": _mi(j, (W,), (Y1,), (R1,)),
        "I(W;Y2|SR2)": _mi(j, (W,), (Y2,), (R2,)),
        "I(U;Y1|SR1,W)": _mi(j, (U,), (Y1,), (R1, W)),
        "I(V;Y2|SR2,W)": _mi(j, (V,), (Y2,), (R2, W)),
        "I(U;V|W)": _mi(j, (U,), (V,), (W,)),
    }
    rest = t["I(U;Y1|SR1,W)"] + t["I(V;Y2|SR2,W)"] - t["I(U;V|W)"]
    s_min = min(t["I(W;Y1|SR1)"], t["I(W;Y2|SR2)"]) + rest
    s_lit = t["I(W;Y1|SR1)"] + t["I(W;Y2|SR2)"] + rest
    return BcBounds(max(t["I(WU;Y1|SR1)"], 0.0), max(t["I(WV;Y2|SR2)"], 0.0), max(s_min, 0.0), t,
                    {"sum_min": s_min, "sum_literal": s_lit})


def bc_eval_evdm_noncausal(bc: BcChannel, a: BcAuxLaw) -> BcBounds:
    """El Gamal-van der Meulen bounds with non-causal side information (U, V only)."""
    j = assemble_joint(bc, a)
    t = {
        "I(U;Y1,SR1)": _mi(j, (U,), (Y1, R1)),
        "I(V;Y2,SR2)": _mi(j, (V,), (Y2, R2)),
        "I(U;ST)": _mi(j, (U,), (ST,)),
        "I(V;ST)": _mi(j, (V,), (ST,)),
        "I(U;V)": _mi(j, (U,), (V,)),
        "I(UV;ST)": _mi(j, (U, V), (ST,)),
    }
    r1 = t["I(U;Y1,SR1)"] - t["I(U;ST)"]
    r2 = t["I(V;Y2,SR2)"] - t["I(V;ST)"]
    s = t["I(U;Y1,SR1)"] + t["I(V;Y2,SR2)"] - t["I(U;V)"] - t["I(UV;ST)"]
    return BcBounds(max(r1, 0.0), max(r2, 0.0), max(s, 0.0), t, {"r1_raw": r1, "r2_raw": r2, "sum_raw": s})


def bc_eval_steinberg_shamai(bc: BcChannel, a: BcAuxLaw) -> BcBounds:
    """Full Marton extension with non-causal side information, including the [.]+ term."""
    j = assemble_joint(bc, a)
    t = {
        "I(WU;Y1,SR1)": _mi(j, (W, U), (Y1, R1)),
        "I(WV;Y2,SR2)": _mi(j, (W, V), (Y2, R2)),
        "I(WU;ST)": _mi(j, (W, U), (ST,)),
        "I(WV;ST)": _mi(j, (W, V), (ST,)),
        "I(W;Y1,SR1)": _mi(j, (W,), (Y1, R1)),
        "I(W;Y2,SR2)": _mi(j, (W,), (Y2, R2)),
        "I(W;ST)": _mi(j, (W,), (ST,)),
        "I(U;V|W,ST)": _mi(j, (U,), (V,), (W, ST)),
    }
    r1 = t["I(WU;Y1,SR1)"] - t["I(WU;ST)"]
    r2 = t["I(WV;Y2,SR2)"] - t["I(WV;ST)"]
    plus = max(max(t["I(W;Y1,SR1)"], t["I(W;Y2,SR2)"]) - t["I(W;ST)"], 0.0)
    t["[max-I(W;ST)]+"] = plus
    s = -plus + r1 + r2 - t["I(U;V|W,ST)"]
    return BcBounds(max(r1, 0.0), max(r2, 0.0), max(s, 0.0), t, {"r1_raw": r1, "r2_raw": r2, "sum_raw": s})


@dataclass
class Observation1:
    holds: bool
    delta_bits: float
    delta_identity_bits: float

    @property
    def forms_agree(self) -> bool:
        return abs(self.delta_bits - self.delta_identity_bits) <= OBS1_TOL


def observation1_predicate(a: BcAuxLaw, st_law) -> Observation1:
    """Test I(U;S_T|W) + I(V;S_T|W) = I(U,V;S_T|W).

    ``delta`` is I(U,V;S_T|W) - I(U;S_T|W) - I(V;S_T|W); the second form
    I(U;V|W,S_T) - I(U;V|W) follows from expanding both conditional
    mutual informations and must agree with it. ``st_law`` is P(S_T) or a
    :class:`BcChannel`.
    """
    if isinstance(st_law, BcChannel):
        st_law = st_law.state_law.sum(axis=(1, 2))
    p = np.asarray(st_law, dtype=float)
    j = np.einsum("s,swuvx->swuv", p, a.law)  # axes (S_T, W, U, V)
    s_, w_, u_, v_ = range(4)
    direct = _mi(j, (u_, v_), (s_,), (w_,)) - _mi(j, (u_,), (s_,), (w_,)) - _mi(j, (v_,), (s_,), (w_,))
    ident = _mi(j, (u_,), (v_,), (w_, s_)) - _mi(j, (u_,), (v_,), (w_,))
    return Observation1(abs(direct) <= OBS1_TOL, direct, ident)


# --- random laws and a small sampled region --------------------------------------

def random_bc_aux(seed: int, nst: int = 2, nw: int = 2, nu: int = 2, nv: int = 2, nx: int = 2,
                  mode: str = "noncausal") -> BcAuxLaw:
    """Seeded random auxiliary law (strictly positive)."""
    rng = np.random.default_rng(seed)
    if mode == "causal":
        aux = rng.dirichlet(np.ones(nw * nu * nv)).reshape(nw, nu, nv)
        xm = rng.dirichlet(np.ones(nx), size=(nw, nu, nv, nst))
        return BcAuxLaw.causal(aux, xm)
    law = rng.dirichlet(np.ones(nw * nu * nv * nx), size=nst).reshape(nst, nw, nu, nv, nx)
    return BcAuxLaw(law, mode)


def bc_region_sampled(bc: BcChannel, evaluator, samples: int = 2000, seed: int = 0, k: int = 8,
                      mode: str = "causal") -> RateRegion:
    """Hull of the pentagons of ``samples`` auxiliary laws, all alphabets binary.

    Auxiliary laws are drawn from the resolution-``k`` simplex grid and
    paired with random deterministic input maps; the result is an inner
    estimate of the region, not its optimum.
    """
    if k > 8:
        raise ValueError("BC region sampling is limited to grid resolution k <= 8")
    if any(n != 2 for n in (bc.nx, bc.ny1, bc.ny2, bc.nst)):
        raise ValueError("BC region sampling is limited to binary alphabets")
    rng = np.random.default_rng(seed)
    rows, laws = [], []
    for _ in range(samples):
        counts = rng.multinomial(k, np.full(8, 1 / 8))
        if mode == "causal":
            aux = (counts / k).reshape(2, 2, 2)
            f = rng.integers(0, 2, size=(2, 2, 2, 2))
            a = BcAuxLaw.causal(aux, np.eye(2)[f])
        else:
            per = np.stack([rng.multinomial(k, np.full(8, 1 / 8)) / k for _ in range(2)]).reshape(2, 2, 2, 2)
            f = rng.integers(0, 2, size=(2, 2, 2, 2))  # [s_T, w, u, v]
            a = BcAuxLaw(per[..., None] * np.eye(2)[f], "noncausal")
        rows.append(evaluator(bc, a).as_row())
        laws.append(a)
    return pentagon_region(np.array(rows), laws)
