"""Compare the compiled and pure-Python kernels on KV boundary columns and elimination.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import random
import time
from fractions import Fraction

from kvhom import _kernels
from kvhom._kernels import _pykernels
from kvhom.poly import CotangentModel, JetLineAlgebroid


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def boundary_cases():
    jl = JetLineAlgebroid(3)
    ct = CotangentModel(1, 3)
    return [("jetline3", jl.G, jl.W), ("cotangent1_3", ct.G, ct.W)]


def echelon_rows(seed, nrows, ncols, density=0.3):
    rng = random.Random(seed)
    rows = []
    for _ in range(nrows):
        r = {j: rng.randint(-5, 5) for j in range(ncols) if rng.random() < density}
        rows.append({k: v for k, v in r.items() if v})
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = [("python", _pykernels)]
    if _kernels.compiled is not None:
        backends.append(("cython", _kernels.compiled))
    else:
        print("compiled kernels not built; timing the pure-Python kernels only")
    print(f"{'task':34s}" + "".join(f"{name:>12s}" for name, _ in backends) + "     speedup")
    rows_out = []
    for label, A, W in boundary_cases():
        n, w = A.dim, W.dim
        for q in (1, 2):
            cols = list(range(n ** q * w))
            a = (q, n, w, A.mul_into, W.left_sparse, W.right_sparse, cols, "A", True)
            times = [best_of(lambda k=k: k.boundary_columns(*a), args.repeat) for _, k in backends]
            rows_out.append((f"boundary {label} q={q}", times))
    for size in (40, 80):
        ints = echelon_rows(size, size, size)
        fracs = [{k: Fraction(v, 7) for k, v in r.items()} for r in ints]
        times = [best_of(lambda k=k: k.echelon_int([dict(r) for r in ints]), args.repeat)
                 for _, k in backends]
        rows_out.append((f"echelon_int {size}x{size}", times))
        times = [best_of(lambda k=k: k.echelon_field([dict(r) for r in fracs]), args.repeat)
                 for _, k in backends]
        rows_out.append((f"echelon_field {size}x{size}", times))
    for label, times in rows_out:
        speed = f"{times[0] / times[1]:10.1f}x" if len(times) > 1 and times[1] else ""
        print(f"{label:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
