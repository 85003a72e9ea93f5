"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N] [--points S]

Both backends are called explicitly, so the EXDIV_DISABLE_NUMBA flag does
not matter here.  The first numba call (JIT compilation) is excluded.
"""
import argparse
import timeit

import numpy as np

from exdiv import kernels
from exdiv._backend import HAVE_NUMBA
from exdiv.divisors import default_cap
from exdiv.lattice import build_lattice
from exdiv.propcheck import random_forest


def cases(points, seed):
    L = build_lattice(random_forest(points, seed))
    cap = min(default_cap(L), 3)
    caps = np.full(L.s, cap, dtype=np.int64)
    total = L.total_transforms()[0].as_array() + 1  # a non-reduced divisor with a big box
    rows, _, _ = kernels.box_forms(L.gram_e, L.k_degrees, caps, backend="numpy")
    rows = rows[rows.sum(axis=1) >= 3][:2000]  # no irreducibles, so an unreachable m scans them all
    return {
        "min_split": lambda b: kernels.min_split(L.gram_e, total, backend=b),
        "box_forms": lambda b: kernels.box_forms(L.gram_e, L.k_degrees, caps, backend=b),
        "first_m_connected": lambda b: kernels.first_m_connected(L.gram_e, rows, 10**6, backend=b),
    }, L.s, cap


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    table, s, cap = cases(args.points, args.seed)
    print(f"random forest: s = {s}, seed = {args.seed}, box cap = {cap}")
    print(f"{'kernel':<20}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in table.items():
        times = {}
        for b in backends:
            fn(b)  # warm-up, includes JIT compile for numba
            times[b] = min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat))
        cells = "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        speed = f"{times['numpy'] / times['numba']:>9.1f}x" if "numba" in times else ""
        print(f"{name:<20}{cells}{speed}")


if __name__ == "__main__":
    main()
