"""Compare the compiled kernel with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the SRTDIV_PURE_PYTHON switch does
not matter here. Results are checked for equality before timing.
"""
import argparse
import random
import timeit

from srtdiv import _pykernel
from srtdiv.fuzzy import DEFAULT_RULES

try:
    from srtdiv import _ckernel
except ImportError:
    _ckernel = None


def tables(mod):
    t = DEFAULT_RULES.tables
    return mod.FuzzyTables(t.keep_x, t.keep_mu, t.inc_x, t.inc_mu, t.ys,
                           t.out_keep, t.out_inc)


def workloads(mod):
    rng = random.Random(1)
    pairs = [(rng.randrange(1 << 52, 1 << 53), rng.randrange(1 << 52, 1 << 53))
             for _ in range(200)]
    ft = tables(mod)
    sel = [(rng.randrange(-(1 << 14), 1 << 14), rng.randrange(1 << 13, 1 << 14))
           for _ in range(2000)]
    return {
        "select x2000 (exact)": lambda: [mod.select(r, d, 14, 0) for r, d in sel],
        "divide x200 (exact)": lambda: [mod.divide(x, d, 53, 29, 0) for x, d in pairs],
        "divide x200 (constants)": lambda: [mod.divide(x, d, 53, 29, 1) for x, d in pairs],
        "divide x200 (fuzzy)": lambda: [mod.divide(x, d, 53, 29, 2, ft) for x, d in pairs],
        "centroid x200": lambda: [mod.fuzzy_centroid(ft, i / 199) for i in range(200)],
        "sweep d=2^-7 p=2^-10 (exact)": lambda: mod.sweep(7, 10, 0),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    py = workloads(_pykernel)
    c = workloads(_ckernel) if _ckernel else {}
    print(f"{'workload':32} {'python':>11} {'cython':>11} {'speedup':>8}")
    for name, fn in py.items():
        tp = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        if name in c:
            if repr(c[name]()) != repr(fn()):
                raise SystemExit(f"{name}: backends disagree")
            tc = min(timeit.repeat(c[name], number=1, repeat=args.repeat))
            print(f"{name:32} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms {tp / tc:7.1f}x")
        else:
            print(f"{name:32} {tp * 1e3:9.2f}ms {'n/a':>11}")


if __name__ == "__main__":
    main()
