"""Time the compiled and numpy kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from sideinfo import kernels
from sideinfo.channels import strategy_by_state, strategy_transform
from sideinfo.generators import make_erasure_parity, random_mac, random_state_channel
from sideinfo.multiuser.mac import mac_strategy_channel


def _cases():
    ep = strategy_transform(make_erasure_parity(8))
    yield "ba erasure-parity N=8 (256 letters)", "ba", (ep, np.full(len(ep), 1 / len(ep)), 1e-12, 100_000)
    c = random_state_channel(0, nx=3, ny=3, ns=3, tx="S", rx="none")
    W = strategy_by_state(c)
    ps = c.state_law.sum(axis=(0, 2))
    q0 = np.random.default_rng(0).dirichlet(np.ones(W.shape[1]), size=W.shape[0])
    yield "gp 3x3x3 non-causal (27 strategies)", "gp", (W, ps, q0, 1e-12, 2000, False)
    m = random_mac(0, rx="noisy")
    Wm, p12, t1, t2 = mac_strategy_channel(m, 4096)
    rng = np.random.default_rng(1)
    q1 = rng.dirichlet(np.ones(len(t1)), size=m.nst1)
    q2 = rng.dirichlet(np.ones(len(t2)), size=m.nst2)
    yield "mac binary non-causal", "mac", (Wm, p12, q1, q2, 1e-12, 2000, False)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.backends()
    print(f"selected backend: {kernels.BACKEND}; available: {', '.join(impls)}")
    print(f"{'case':<40}" + "".join(f"{name:>14}" for name in impls) + "   speedup")
    for label, fn, inputs in _cases():
        times = {}
        for name, mod in impls.items():
            best = np.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                getattr(mod, fn)(*inputs)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        cells = "".join(f"{times[n] * 1e3:>11.2f} ms" for n in impls)
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else "       -"
        print(f"{label:<40}{cells}  {speed}")


if __name__ == "__main__":
    main()
