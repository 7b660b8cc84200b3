"""Time the allocation search on both kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from pastfair import _backend
from pastfair.allocator import Item, build_problem
from pastfair.temporal import ParadigmConfig, commit, init
from pastfair.welfare import WelfareSpec

CASES = [(4, 3), (8, 3), (10, 3), (12, 2), (8, 4)]
WELFARES = [WelfareSpec("mmf"), WelfareSpec("nash"), WelfareSpec("gini", (0.5, 0.25, 0.15, 0.1))]


def problem(m, n, welfare, seed=0):
    rng = np.random.default_rng(seed)
    agents = [f"a{k}" for k in range(n)]
    items = [Item(f"i{k}", dict(zip(agents, rng.uniform(0, 1, n)))) for k in range(m)]
    s = commit(init(ParadigmConfig("discounted_averaged", 0.9), agents), rng.uniform(0, 1, n))
    if welfare.kind == "generalized_gini":
        welfare = WelfareSpec("gini", welfare.gini_weights[:n])
    return build_problem(s, items, welfare)


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = sorted(_backend.BACKENDS)
    print(f"backends: {', '.join(names)} (default: {_backend.NAME})")
    head = f"{'items':>5} {'agents':>6} {'allocs':>8} {'welfare':>8}" + "".join(f" {n + ' s':>12}" for n in names)
    if len(names) > 1:
        head += f" {'speedup':>9}"
    print(head)
    for m, n in CASES:
        for welfare in WELFARES:
            p = problem(m, n, welfare)
            times, results = [], []
            for name in names:
                kern = _backend.get(name)
                t, res = timeit(lambda: kern.best_allocation(*p.args()), args.repeat)
                times.append(t)
                results.append(res)
            assert all(r == results[0] for r in results), "backends disagree"
            line = f"{m:>5} {n:>6} {n**m:>8} {welfare.kind[:8]:>8}" + "".join(f" {t:>12.5f}" for t in times)
            if len(names) > 1:
                line += f" {times[names.index('python')] / times[names.index('cython')]:>8.0f}x"
            print(line)


if __name__ == "__main__":
    main()
