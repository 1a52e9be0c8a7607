"""Command-line front end: ``sideinfo solve | verify | scenario``.

Reports are deterministic: the same input file, configuration and seed
give the same bytes. Text mode prints 6 decimals, CSV prints 17
significant digits. Exit codes: 0 ok, 1 verification violation, 2 input
error, 3 resource cap, 4 non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds, capacity, generators
from .capacity import SolverConfig
from .channels import StateChannel, block_static_expand, noiseless
from .errors import ChannelFormatError, HypothesisError, SizeError
from .io import atomic_write, content_hash, read_channel, write_channel
from .multiuser import bc as bcmod
from .multiuser import mac as macmod

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CAP, EXIT_NONCONV = 0, 1, 2, 3, 4
CSV_COLUMNS = ["suite", "instance_seed", "lhs_bits", "rhs_bits", "slack_bits", "satisfied",
               "iterations", "restarts", "wall_ms"]


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _f6(v) -> str:
    s = f"{float(v):.6f}"
    return "0.000000" if s == "-0.000000" else s


def _f17(v) -> str:
    return format(float(v), ".17g")


def _cfg(args) -> SolverConfig:
    try:
        kw = {}
        if args.max_iter is not None:
            # an explicit limit caps the ascent and Blahut-Arimoto loops alike
            kw = {"max_iter": args.max_iter, "ba_max_iter": args.max_iter}
        return SolverConfig(tol_bits=args.tol_bits, restarts=args.restarts, seed=args.seed,
                            strategy_cap=args.cap_strategies, grid_budget=args.cap_grid, **kw)
    except ValueError as e:
        raise CliError(str(e), EXIT_INPUT) from None


def _header(cmd: str, cfg: SolverConfig, digest: str) -> list[str]:
    return [
        f"# sideinfo {cmd}",
        f"# input_sha256: {digest}",
        f"# config: tol_bits={cfg.tol_bits!r} max_iter={cfg.max_iter} ba_max_iter={cfg.ba_max_iter} restarts={cfg.restarts} "
        f"cap_strategies={cfg.strategy_cap} cap_grid={cfg.grid_budget}",
        f"# seed: {cfg.seed}",
    ]


def _emit(args, text: str) -> None:
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _value_table(args, cfg, cmd, digest, rows: list[tuple], notes=()) -> str:
    """rows are (quantity, value_bits, iterations, restarts, converged)."""
    head = _header(cmd, cfg, digest)
    if args.format == "csv":
        body = _csv(["quantity", "value_bits", "iterations", "restarts", "converged"],
                    [[q, _f17(v), it, rs, str(bool(ok)).lower()] for q, v, it, rs, ok in rows])
        return "\n".join(head) + "\n" + body
    width = max(len(r[0]) for r in rows)
    lines = head + [f"{'quantity':<{width}}  value_bits  iterations  restarts  converged"]
    for q, v, it, rs, ok in rows:
        lines.append(f"{q:<{width}}  {_f6(v):>10}  {it:>10}  {rs:>8}  {str(bool(ok)).lower()}")
    lines += [f"note: {n}" for n in notes]
    return "\n".join(lines) + "\n"


# --- solve ------------------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = _cfg(args)
    try:
        c = read_channel(args.channel_file)
    except OSError as e:
        raise CliError(f"{args.channel_file}: {e.strerror}", EXIT_INPUT) from None
    if not isinstance(c, StateChannel):
        raise CliError(f"solve expects a single-user channel file, got {type(c).__name__}", EXIT_INPUT)
    digest = content_hash(c)
    label = f"solve {args.case}"
    if args.case == "common-form-table":
        tab = capacity.common_form_table(c, cfg, eq_tol=max(args.tol_gap, cfg.tol_bits))
        rows = [(f"C[{m},{st},{sr}]", v, 0, 0, True) for (m, st, sr), v in tab.values.items()]
        notes = [f"{lab}: slack {_f6(sl)} {'pass' if ok else 'FAIL'}" for lab, sl, ok in tab.checks]
        _emit(args, _value_table(args, cfg, label, digest, rows, notes))
        return EXIT_OK if tab.ok else EXIT_VIOLATION
    fn = {"causal": capacity.capacity_causal, "noncausal": capacity.capacity_noncausal,
          "no-si": capacity.capacity_no_si, "rx-knows-tx": capacity.capacity_rx_knows_tx}[args.case]
    rep = fn(c, cfg)
    rows = [(args.case, rep.value_bits, rep.iterations, rep.restarts_used, rep.converged)]
    if rep.upper_bits is not None:
        rows.append((f"{args.case} upper", rep.upper_bits, rep.iterations, rep.restarts_used, rep.converged))
    _emit(args, _value_table(args, cfg, label, digest, rows, rep.notes))
    return EXIT_OK if rep.converged else EXIT_NONCONV


# --- verify -----------------------------------------------------------------------

@dataclass
class Row:
    seed: int
    lhs: float
    rhs: float
    tol: float
    iterations: int = 0
    restarts: int = 0
    wall_ms: float = 0.0
    extra_ok: bool = True
    detail: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.slack >= -self.tol and self.extra_ok


def _from_bound(seed, rep: bounds.BoundReport) -> Row:
    return Row(seed, rep.lhs_bits, rep.rhs_bits, rep.tol_bits, rep.iterations, rep.restarts,
               extra_ok=bool(rep.components.get("chain_ok", True)),
               detail={k: v for k, v in rep.components.items() if k != "chain_ok"})


def _v_theorem1(seed, cfg, args):
    c = generators.random_state_channel(seed, tx="S", rx="S")
    cc = capacity.capacity_causal(c, cfg)
    nc = capacity.capacity_noncausal(c, cfg)
    rx = capacity.capacity_rx_knows_tx(c, cfg)
    lhs = max(abs(cc.value_bits - nc.value_bits), abs(cc.value_bits - rx.value_bits),
              abs(nc.value_bits - rx.value_bits))
    return Row(seed, lhs, 0.0, args.tol_gap, cc.iterations + nc.iterations + rx.iterations, nc.restarts_used,
               detail={"C_causal": cc.value_bits, "C_noncausal": nc.value_bits, "max I(X;Y|S_R)": rx.value_bits})


def _v_theorem2(seed, cfg, args):
    c = generators.random_state_channel(seed, tx="random", rx="random")
    g = bounds.make_genie(c, generators.random_genie_table(seed, c, 2))
    return _from_bound(seed, bounds.check_receiver_genie_bound(c, g, cfg))


def _v_theorem4(seed, cfg, args):
    c = generators.random_state_channel(seed, tx="random", rx="random")
    return _from_bound(seed, bounds.nc_minus_c_bound(c, cfg, args.tol_gap))


def _v_theorem5(seed, cfg, args):
    m = generators.random_mac(seed, rx="both")
    rep = macmod.mac_sum_capacity_causal(m, cfg)
    orc = macmod.mac_oracle_grid(m, args.grid_k, causal=True, budget=cfg.grid_budget)
    return Row(seed, abs(rep.value_bits - orc.value_bits), 0.0, args.tol_mac, rep.iterations, rep.restarts_used,
               detail={"C_sum": rep.value_bits, "grid": orc.value_bits})


def _v_theorem6(seed, cfg, args):
    m = generators.random_mac(seed, rx="both")
    rep = macmod.mac_sum_capacity_causal(m, cfg)
    reg = macmod.mac_region_rx_knows(m, k=args.grid_k, budget=cfg.grid_budget)
    return Row(seed, abs(rep.value_bits - reg.max_sum), 0.0, args.tol_mac, rep.iterations, rep.restarts_used,
               detail={"C_sum": rep.value_bits, "region_max_sum": reg.max_sum})


def _v_theorem7(seed, cfg, args):
    m = generators.random_mac(seed, rx="noisy")
    rng = np.random.default_rng(seed)
    g = bounds.make_genie(m, generators.random_rows(rng, m.state_law.shape, 2))
    return _from_bound(seed, bounds.mac_sum_genie_bound(m, g, cfg, tol=args.tol_gap))


def _v_theorem8(seed, cfg, args):
    m = generators.random_mac(seed, rx="noisy" if seed % 2 else "none")
    return _from_bound(seed, bounds.mac_nc_minus_c_bound(m, cfg, args.tol_mac))


def _v_observation1(seed, cfg, args):
    a = bcmod.random_bc_aux(seed, mode="noncausal")
    ob = bcmod.observation1_predicate(a, generators.random_rows(np.random.default_rng(seed), (), 2))
    return Row(seed, abs(ob.delta_bits - ob.delta_identity_bits), 0.0, bcmod.OBS1_TOL,
               detail={"delta": ob.delta_bits, "delta_identity": ob.delta_identity_bits, "holds": ob.holds})


SUITES = {
    "theorem1": (_v_theorem1, 200, "S_T = S_R = S: |C_causal - C_noncausal| and both vs max I(X;Y|S_R), lhs <= tol"),
    "theorem2": (_v_theorem2, 100, "receiver genie: C_G - C <= H(G)"),
    "theorem3": (None, 4, "erasure/parity: gap(N) >= log2(N)/2 - 1/2 and increasing in N"),
    "theorem4": (_v_theorem4, 50, "C_noncausal - C_causal <= H(S_T|S_R)"),
    "theorem5": (_v_theorem5, 20, "MAC causal sum capacity vs grid oracle, |difference| <= tol"),
    "theorem6": (_v_theorem6, 20, "MAC sum capacity vs max sum of the informed-receiver region, |difference| <= tol"),
    "theorem7": (_v_theorem7, 20, "MAC receiver genie: C_sum,G - C_sum <= H(G)"),
    "theorem8": (_v_theorem8, 20, "MAC non-causal inner sum - causal sum <= H(S_T1,S_T2|S_R)"),
    "observation1": (_v_observation1, 500, "|direct delta - identity delta| <= 1e-9"),
}


def _theorem3_rows(cfg, args) -> list[Row]:
    ns = [1, 2, 4, 8][: args.count] if args.count else [1, 2, 4, 8]
    out = []
    for r in bounds.demonstrate_tx_unbounded(ns, cfg):
        # instance_seed carries N; lhs is the lower bound, rhs the achieved gap
        out.append(Row(r.n, r.lower_bits, r.gap_bits, bounds.GENIE_TOL, extra_ok=r.satisfied,
                       detail={"C": r.c_bits, "C_G": r.c_g_bits}))
    return out


def cmd_verify(args) -> int:
    cfg = _cfg(args)
    fn, default_count, claim = SUITES[args.suite]
    count = args.count if args.count is not None else default_count
    if count < 1:
        raise CliError("--count must be positive", EXIT_INPUT)
    if args.suite == "theorem3":
        rows = _theorem3_rows(cfg, args)
    else:
        rows = []
        for i in range(count):
            seed = cfg.seed + i
            t0 = time.perf_counter()
            row = fn(seed, cfg, args)
            if args.timing:
                row.wall_ms = (time.perf_counter() - t0) * 1e3
            rows.append(row)
    rows.sort(key=lambda r: r.seed)
    passed = sum(r.satisfied for r in rows)
    head = _header(f"verify {args.suite}", cfg, "none (generated instances)")
    head.append(f"# check: {claim}")
    if args.format == "csv":
        body = _csv(CSV_COLUMNS, [[args.suite, r.seed, _f17(r.lhs), _f17(r.rhs), _f17(r.slack),
                                   str(r.satisfied).lower(), r.iterations, r.restarts, _f17(r.wall_ms)]
                                  for r in rows])
        text = "\n".join(head) + "\n" + body
    else:
        keys = list(rows[0].detail)
        first = "N" if args.suite == "theorem3" else "seed"
        lines = head + ["  ".join([first.rjust(6), "lhs_bits".rjust(10), "rhs_bits".rjust(10), "slack_bits".rjust(10),
                                   "ok".rjust(4)] + [k.rjust(max(10, len(k))) for k in keys])]
        for r in rows:
            cells = [str(r.seed).rjust(6), _f6(r.lhs).rjust(10), _f6(r.rhs).rjust(10), _f6(r.slack).rjust(10),
                     ("pass" if r.satisfied else "FAIL").rjust(4)]
            for k in keys:
                v = r.detail[k]
                s = str(bool(v)).lower() if isinstance(v, (bool, np.bool_)) else _f6(v)
                cells.append(s.rjust(max(10, len(k))))
            lines.append("  ".join(cells))
        lines.append(f"summary: {passed}/{len(rows)} satisfied")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_OK if passed == len(rows) else EXIT_VIOLATION


# --- scenarios --------------------------------------------------------------------

def _random_access_rows(c: StateChannel, cfg, p_on: float):
    cc = capacity.capacity_causal(c, cfg)
    c0 = capacity.capacity_no_si(c, cfg)
    g = bounds.check_receiver_genie_bound(c, bounds.axis_genie(c, 0), cfg)
    return [
        ("C causal", cc.value_bits, cc.iterations, 0, cc.converged),
        ("C no SI", c0.value_bits, c0.iterations, 0, c0.converged),
        ("p_on * C0", p_on * 1.0, 0, 0, True),
        ("C_G (G = S)", g.components["C_G"], 0, 0, True),
        ("C_G - C", g.lhs_bits, 0, 0, True),
        ("bound H(S)", g.rhs_bits, 0, 0, True),
    ]


def cmd_scenario(args) -> int:
    cfg = _cfg(args)
    name = args.name
    notes: list[str] = []
    if name == "erasure-parity":
        if args.n < 1:
            raise CliError("--n must be >= 1", EXIT_INPUT)
        c = generators.make_erasure_parity(args.n)
        row = bounds.demonstrate_tx_unbounded([args.n], cfg)[0]
        rows = [("C no SI", row.c_bits, 0, 0, True), ("C_G causal Tx SI", row.c_g_bits, 0, 0, True),
                ("gap", row.gap_bits, 0, 0, True), ("lower bound log2(N)/2 - 1/2", row.lower_bits, 0, 0, True)]
        ok = row.satisfied
    elif name in ("random-access", "random-access-mac", "block-static"):
        if not 0.0 <= args.p_on <= 1.0:
            raise CliError("--p-on must lie in [0, 1]", EXIT_INPUT)
        base = noiseless(2)
        if name == "random-access":
            c = generators.make_random_access(base, args.p_on, args.rx_knows)
            rows = _random_access_rows(c, cfg, args.p_on)
            ok = True
        elif name == "random-access-mac":
            c = generators.make_random_access_mac(base, args.p_on, args.rx_knows)
            rep = bounds.mac_sum_genie_bound(c, bounds.axis_genie(c, 0), cfg, allow_correlated=True)
            rows = [("C_sum causal", rep.components["C_sum"], rep.iterations, rep.restarts, True),
                    ("C_sum with G = S", rep.components["C_sum_G"], 0, 0, True),
                    ("gain", rep.lhs_bits, 0, 0, True), ("bound H(S)", rep.rhs_bits, 0, 0, True)]
            notes = list(rep.notes)
            ok = rep.satisfied
        else:
            if args.n < 1:
                raise CliError("--n must be >= 1", EXIT_INPUT)
            one = generators.make_random_access(base, args.p_on, False)
            c = block_static_expand(one, args.n, cfg.strategy_cap)
            rep = bounds.check_receiver_genie_bound(c, bounds.axis_genie(c, 0), cfg, block=args.n)
            rows = [("C per use", rep.components["C"], rep.iterations, 0, True),
                    ("C_G per use (G = S once per block)", rep.components["C_G"], 0, 0, True),
                    ("gain per use", rep.lhs_bits, 0, 0, True), ("bound H(S)/n", rep.rhs_bits, 0, 0, True)]
            ok = rep.satisfied
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown scenario {name!r}", EXIT_INPUT)
    path = args.channel_out or f"{name}.json"
    digest = write_channel(c, path)
    notes = [f"channel written to {path}"] + notes
    _emit(args, _value_table(args, cfg, f"scenario {name}", digest, rows, notes))
    return EXIT_OK if ok else EXIT_VIOLATION


# --- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-bits", type=float, default=1e-9, help="solver convergence tolerance")
    common.add_argument("--max-iter", type=int, default=None,
                        help="iteration limit for every solver loop (default: 5000 ascent, 200000 BA)")
    common.add_argument("--restarts", type=int, default=32)
    common.add_argument("--cap-strategies", type=int, default=4096)
    common.add_argument("--cap-grid", type=int, default=10**7)
    common.add_argument("--format", choices=("text", "csv"), default="text")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="fill wall_ms (output is then not reproducible)")

    p = argparse.ArgumentParser(prog="sideinfo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="capacity of a single-user channel file")
    s.add_argument("channel_file")
    s.add_argument("--case", required=True,
                   choices=("causal", "noncausal", "no-si", "rx-knows-tx", "common-form-table"))
    s.add_argument("--tol-gap", type=float, default=2e-3, help="equality tolerance for table checks")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="run a seeded check sweep")
    v.add_argument("suite", choices=list(SUITES))
    v.add_argument("--count", type=int, default=None)
    v.add_argument("--tol-gap", type=float, default=2e-3, help="tolerance for single-user gap checks")
    v.add_argument("--tol-mac", type=float, default=5e-3, help="tolerance for MAC comparisons")
    v.add_argument("--grid-k", type=int, default=12, help="simplex resolution of MAC oracles")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("scenario", parents=[common], help="build an example channel and tabulate it")
    c.add_argument("name", choices=("erasure-parity", "random-access", "random-access-mac", "block-static"))
    c.add_argument("--n", type=int, default=1, help="N for erasure-parity, block length for block-static")
    c.add_argument("--p-on", type=float, default=0.5)
    c.add_argument("--rx-knows", action="store_true", help="receiver also sees S")
    c.add_argument("--channel-out", default=None, help="channel file path (default <name>.json)")
    c.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"sideinfo: error: {e}", file=sys.stderr)
        return e.code
    except ChannelFormatError as e:
        print(f"sideinfo: invalid channel file: {e}", file=sys.stderr)
        return EXIT_INPUT
    except HypothesisError as e:
        print(f"sideinfo: hypothesis not met: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SizeError as e:
        print(f"sideinfo: resource cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
