"""Genie bounds and causal/non-causal gap bounds, returned as pass/fail reports.

A genie ``G`` is a per-use random variable drawn from a conditional table
``P(g | state)`` over the channel's full state tuple. Giving it to the
receiver appends it to S_R.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .capacity import DEFAULT_CONFIG, SolverConfig, capacity_causal, capacity_no_si, capacity_noncausal
from .channels import MacChannel, StateChannel, require_valid
from .errors import HypothesisError
from .generators import make_erasure_parity
from .multiuser.mac import mac_noncausal_inner_sum, mac_sum_capacity_causal
from .prob import Dist, entropy, normalize

GENIE_TOL = 1e-6
GAP_TOL = 2e-3


def _h_cond(p_ab: np.ndarray) -> float:
    """H(A|B) in bits for a joint ``p_ab[a, b]``."""
    return entropy(Dist(normalize(p_ab.ravel()))) - entropy(Dist(normalize(p_ab.sum(0))))


@dataclass(frozen=True, eq=False)
class GenieSpec:
    """``table[*state, g] = P(g | state)``; ``entropy_bits`` is H(G) of the induced marginal."""

    target: str
    table: np.ndarray
    state_law: np.ndarray = field(repr=False)
    entropy_bits: float = field(init=False)
    marginal: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.target not in ("receiver", "transmitter"):
            raise ValueError(f"genie target must be 'receiver' or 'transmitter', not {self.target!r}")
        t = np.array(self.table, dtype=float)
        if np.any(t < 0) or np.any(np.abs(t.sum(-1) - 1) > 1e-12):
            raise ValueError("genie table rows must be distributions over g")
        sl = np.asarray(self.state_law, dtype=float)
        if t.shape[:-1] != sl.shape:
            raise ValueError(f"genie table {t.shape} does not fit state law {sl.shape}")
        pg = (sl[..., None] * t).reshape(-1, t.shape[-1]).sum(0)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "marginal", pg)
        object.__setattr__(self, "entropy_bits", entropy(Dist(normalize(pg))) + 0.0)

    @property
    def size(self) -> int:
        return self.table.shape[-1]

    def conditional_entropy_bits(self) -> float:
        """H(G | S_R): the genie entropy given what the receiver already has."""
        j = self.state_law[..., None] * self.table
        nsr = j.shape[-2]
        j = j.reshape(-1, nsr, self.size).sum(0)  # [s_R, g]
        return _h_cond(j.T)


def make_genie(c, table, target: str = "receiver") -> GenieSpec:
    return GenieSpec(target, table, c.state_law)


def constant_genie(c) -> GenieSpec:
    return make_genie(c, np.ones(c.state_law.shape + (1,)))


def axis_genie(c, axis: int) -> GenieSpec:
    """G equal to one component of the state tuple (axis 0 is S)."""
    sl = c.state_law
    n = sl.shape[axis]
    idx = np.indices(sl.shape)[axis]
    return make_genie(c, np.eye(n)[idx])


def joint_genie(c, g1: GenieSpec, g2: GenieSpec) -> GenieSpec:
    """(G1, G2) with the two conditionally independent given the state; refines both."""
    t = g1.table[..., :, None] * g2.table[..., None, :]
    return make_genie(c, t.reshape(t.shape[:-2] + (-1,)), g1.target)


def reveal_genie(c, g: GenieSpec):
    """Channel whose receiver side information is (S_R, G), index ``s_r*|G| + g``."""
    j = c.state_law[..., None] * g.table
    sl = j.reshape(j.shape[:-2] + (-1,))
    if isinstance(c, MacChannel):
        return MacChannel(sl, c.transition, c.tx_states_independent, name=c.name)
    return StateChannel(sl, c.transition, name=c.name)


@dataclass
class BoundReport:
    """``satisfied`` holds exactly when ``slack_bits >= -tol_bits``."""

    lhs_bits: float
    rhs_bits: float
    tol_bits: float
    components: dict = field(default_factory=dict)
    notes: tuple = ()
    iterations: int = 0
    restarts: int = 0

    @property
    def slack_bits(self) -> float:
        return self.rhs_bits - self.lhs_bits

    @property
    def satisfied(self) -> bool:
        return self.slack_bits >= -self.tol_bits


def check_receiver_genie_bound(c: StateChannel, g: GenieSpec, cfg: SolverConfig = DEFAULT_CONFIG,
                               block: int = 1) -> BoundReport:
    """C_G - C <= H(G), both capacities with causal transmitter SI (exact BA).

    ``block`` > 1 reads ``c`` as a block-static super-symbol channel and
    reports both sides per channel use.
    """
    if g.target != "receiver":
        raise ValueError("check_receiver_genie_bound needs a receiver genie")
    require_valid(c)
    base = capacity_causal(c, cfg)
    gen = capacity_causal(reveal_genie(c, g), cfg)
    lhs = (gen.value_bits - base.value_bits) / block
    rhs = g.entropy_bits / block
    comps = {"C": base.value_bits / block, "C_G": gen.value_bits / block, "H(G)": rhs}
    return BoundReport(lhs, rhs, GENIE_TOL, comps, iterations=base.iterations + gen.iterations)


@dataclass
class TxGainRow:
    n: int
    c_bits: float
    c_g_bits: float
    gap_bits: float
    lower_bits: float
    satisfied: bool


def demonstrate_tx_unbounded(n_list=(1, 2, 4, 8), cfg: SolverConfig = DEFAULT_CONFIG,
                             tol: float = GENIE_TOL) -> list[TxGainRow]:
    """Capacity gain of causal transmitter SI on the erasure/parity channels.

    Each row checks gap >= log2(N)/2 - 1/2; a row also fails if its gap
    does not exceed the previous row's (the gain must grow with N).
    """
    rows: list[TxGainRow] = []
    for n in sorted(n_list):
        c = make_erasure_parity(n)
        c0 = capacity_no_si(c, cfg).value_bits
        cg = capacity_causal(c, cfg).value_bits
        gap = cg - c0
        lower = 0.5 * np.log2(n) - 0.5
        ok = gap >= lower - tol and (not rows or gap > rows[-1].gap_bits)
        rows.append(TxGainRow(n, c0, cg, gap, lower, bool(ok)))
    return rows


def nc_minus_c_bound(c: StateChannel, cfg: SolverConfig = DEFAULT_CONFIG, tol: float = GAP_TOL) -> BoundReport:
    """C_noncausal - C_causal <= H(S_T | S_R)."""
    require_valid(c)
    cc = capacity_causal(c, cfg)
    nc = capacity_noncausal(c, cfg)
    rhs = _h_cond(c.state_law.sum(0))
    comps = {"C_causal": cc.value_bits, "C_noncausal": nc.value_bits, "H(S_T|S_R)": rhs}
    return BoundReport(nc.value_bits - cc.value_bits, rhs, tol, comps, nc.notes,
                       cc.iterations + nc.iterations, nc.restarts_used)


def mac_sum_genie_bound(m: MacChannel, g: GenieSpec, cfg: SolverConfig = DEFAULT_CONFIG, block: int = 1,
                        allow_correlated: bool = False, tol: float = GAP_TOL) -> BoundReport:
    """Sum-rate version of the receiver genie bound.

    The causal sum-rate solver is a restarted local search, so the default
    tolerance is the non-concave one rather than the BA one.
    """
    if g.target != "receiver":
        raise ValueError("mac_sum_genie_bound needs a receiver genie")
    base = mac_sum_capacity_causal(m, cfg, allow_correlated)
    gen = mac_sum_capacity_causal(reveal_genie(m, g), cfg, allow_correlated)
    lhs = (gen.value_bits - base.value_bits) / block
    rhs = g.entropy_bits / block
    comps = {"C_sum": base.value_bits / block, "C_sum_G": gen.value_bits / block, "H(G)": rhs}
    return BoundReport(lhs, rhs, tol, comps, tuple(dict.fromkeys(base.notes + gen.notes)),
                       base.iterations + gen.iterations, base.restarts_used)


def mac_nc_minus_c_bound(m: MacChannel, cfg: SolverConfig = DEFAULT_CONFIG, tol: float = GAP_TOL) -> BoundReport:
    """Non-causal inner sum minus causal sum capacity <= H(S_T1, S_T2 | S_R).

    The chain through a receiver that also learns (S_T1, S_T2) is checked
    as well: that sum rate must exceed the non-causal one and exceed the
    causal one by at most the same entropy.
    """
    if not m.tx_states_independent:
        raise HypothesisError("the non-causal gap bound assumes independent transmitter states")
    cc = mac_sum_capacity_causal(m, cfg)
    nc = mac_noncausal_inner_sum(m, cfg, causal=cc)
    sl = m.state_law
    pair = np.einsum("sabr->abr", sl).reshape(m.nst1 * m.nst2, m.nsr)
    rhs = _h_cond(pair)
    # receiver additionally told (S_T1, S_T2)
    ab = np.indices(sl.shape)
    tab = np.eye(m.nst1 * m.nst2)[ab[1] * m.nst2 + ab[2]]
    told = mac_sum_capacity_causal(reveal_genie(m, make_genie(m, tab)), cfg)
    chain_ok = (nc.value_bits <= told.value_bits + tol
                and told.value_bits - cc.value_bits <= rhs + tol)
    comps = {"C_sum_causal": cc.value_bits, "C_sum_noncausal_inner": nc.value_bits,
             "C_sum_rx_told": told.value_bits, "H(S_T1,S_T2|S_R)": rhs, "chain_ok": chain_ok}
    rep = BoundReport(nc.value_bits - cc.value_bits, rhs, tol, comps, nc.notes,
                      cc.iterations + nc.iterations + told.iterations, nc.restarts_used)
    if not chain_ok:
        rep.notes = rep.notes + ("chain through the informed receiver violated",)
    return rep


def bound_passed(rep: BoundReport) -> bool:
    """Main inequality plus any auxiliary chain check the report carries."""
    return rep.satisfied and rep.components.get("chain_ok", True)
