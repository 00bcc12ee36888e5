#!/usr/bin/env python3
"""Benchmark the compiled integration kernel against the pure-Python twin.

Runs the same steady-state workload through every importable kernel and
prints per-cycle timings plus the speedup.  The two must agree bit for bit,
which is asserted on the fly.
"""

import argparse
import time

import numpy as np

from wiretail._backend import available_kernels
from wiretail.config import load_config, rotational_stiffness
from wiretail.dynamics import build_params


def bench_kernel(kernel, par, cycles: int, spc: int, f: float):
    dt = 1.0 / (f * spc)
    q2 = dq2 = 0.0
    t0 = time.perf_counter()
    n0 = 0
    for _ in range(cycles):
        q2, dq2, _ = kernel.run_cycle(par, n0, dt, spc, q2, dq2)
        n0 += spc
    t_cycle = (time.perf_counter() - t0) / cycles

    out = np.empty((kernel.N_RECORD, spc * 2))
    t0 = time.perf_counter()
    end = kernel.run_recorded(par, n0, dt, spc, 2, q2, dq2, out)
    t_rec = (time.perf_counter() - t0) / 2
    return t_cycle, t_rec, end, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cycles", type=int, default=20, help="cycles per timing run")
    ap.add_argument("--spc", type=int, default=2000, help="steps per cycle")
    ap.add_argument("--freq", type=float, default=4.0)
    args = ap.parse_args()

    cfg = load_config()
    par = build_params(cfg, args.freq, rotational_stiffness(cfg.pes))

    results = {}
    for name, kernel in sorted(available_kernels().items()):
        t_cycle, t_rec, end, out = bench_kernel(kernel, par, args.cycles, args.spc, args.freq)
        results[name] = (t_cycle, t_rec, end, out)
        print(f"{name:>9}: {1e3 * t_cycle:8.3f} ms/cycle integrate, "
              f"{1e3 * t_rec:8.3f} ms/cycle recorded")

    if len(results) == 2:
        (ec, oc), (ep, op) = [(r[2], r[3]) for r in results.values()]
        agree = ec == ep and np.array_equal(oc, op)
        print(f"backends agree bit for bit: {agree}")
        tc = results["compiled"][0]
        tp = results["python"][0]
        print(f"speedup (python/compiled): {tp / tc:.1f}x")


if __name__ == "__main__":
    main()
