"""Compare the numba and numpy paths of the two integer kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]

Both paths are timed in the same process (the env flag only picks the default
path). Outputs are checked for equality before anything is timed.
"""

import argparse
import json
import time

import numpy as np

from bldgzeta import _kernels as K
from bldgzeta.complex import complete_bipartite, load_quotient_graph
from bldgzeta.cusp import build_cuspidal, truncate


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def matmul_cases():
    rng = np.random.default_rng(0)
    for n in (64, 256):
        a = rng.integers(-100, 100, size=(n, n), dtype=np.int64)
        b = rng.integers(-100, 100, size=(n, n), dtype=np.int64)
        yield f"matmul_i64 random {n}x{n}", (a, b)
    # a deep truncation of a cuspidal quotient gives a sparse nonnegative operator
    cq = build_cuspidal({"core": complete_bipartite(4, 4).to_json(),
                         "rays": [{"attach": 0, "period": [3]}]})
    b = truncate(cq, 40).edge_operator().matrix
    yield f"matmul_i64 cusp edge operator {b.shape[0]}x{b.shape[0]}", (b, b)


def walk_cases():
    for name, g, length in [("K3,3", complete_bipartite(3, 3), 10),
                            ("K4,4", complete_bipartite(4, 4), 8)]:
        ptr, idx = g.successors()
        tail, head, rev = g.directed()
        yield f"closed_walks {name} length {length}", (ptr, idx, head, tail, rev, 0, length, True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 0
    rows = []
    for name, (a, b) in matmul_cases():
        assert np.array_equal(K.matmul_i64_numba(a, b), K.matmul_i64_numpy(a, b))
        rows.append((name, best_of(lambda: K.matmul_i64_numpy(a, b), args.repeat),
                     best_of(lambda: K.matmul_i64_numba(a, b), args.repeat)))
    for name, walk_args in walk_cases():
        x = K.closed_walks_numba(*walk_args)
        y = K.closed_walks_numpy(*walk_args)
        assert sorted(map(tuple, x.tolist())) == sorted(map(tuple, y.tolist()))
        rows.append((name, best_of(lambda: K.closed_walks_numpy(*walk_args), args.repeat),
                     best_of(lambda: K.closed_walks_numba(*walk_args), args.repeat)))
    if args.json:
        print(json.dumps([{"case": n, "numpy_s": a, "numba_s": b, "speedup": a / b}
                          for n, a, b in rows], indent=1))
    else:
        print(f"{'case':<48}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
        for n, a, b in rows:
            print(f"{n:<48}{a:>12.5f}{b:>12.5f}{a / b:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
