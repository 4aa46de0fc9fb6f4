"""Integer hot loops: numba kernels with a pure-numpy fallback.

Two kernels carry nearly all of the runtime:

* ``matmul_i64``: dense int64 matrix product (operator powers, traces,
  Faddeev-LeVerrier recursions).
* ``closed_walks``: enumeration of closed non-backtracking walks in an
  edge-successor graph (the brute-force geodesic oracle).

The numba path is used when numba imports and ``BLDGZETA_DISABLE_NUMBA`` is
unset or ``0``. Both paths are always importable as ``*_numba`` /
``*_numpy`` so tests and the benchmark can compare them directly.

Everything is exact. ``int_matmul`` checks a magnitude bound before using an
int64 kernel and falls back to Python-int object arrays when the bound could
overflow.
"""

import os
import warnings

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    # an old system TBB makes numba fall back to another threading layer; say nothing
    warnings.filterwarnings("ignore", message=".*TBB.*")
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("BLDGZETA_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag in ("", "0", "false", "no")

# products whose every partial sum stays below this cannot overflow int64
_INT64_SAFE = 2**62


def set_threads(n=None):
    """Cap numba's thread pool; reads ``BLDGZETA_THREADS`` when ``n`` is None."""
    if not HAVE_NUMBA:
        return None
    if n is None:
        raw = os.environ.get("BLDGZETA_THREADS", "").strip()
        if not raw:
            return numba.get_num_threads()
        n = int(raw)
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


# ----------------------------------------------------------------------------
# matrix product

def matmul_i64_numpy(a, b):
    return np.matmul(a, b)


if HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def matmul_i64_numba(a, b):
        n, m = a.shape
        p = b.shape[1]
        out = np.zeros((n, p), dtype=np.int64)
        # rows are independent, so the parallel loop is deterministic
        for i in prange(n):
            for k in range(m):
                aik = a[i, k]
                if aik != 0:
                    for j in range(p):
                        out[i, j] += aik * b[k, j]
        return out

else:  # pragma: no cover
    matmul_i64_numba = matmul_i64_numpy

matmul_i64 = matmul_i64_numba if USE_NUMBA else matmul_i64_numpy


def _absmax(a):
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def as_exact(a):
    """Return ``a`` as int64 when every entry fits, else as a Python-int object array."""
    a = np.asarray(a)
    if a.dtype == object:
        if a.size == 0 or _absmax(a) < _INT64_SAFE:
            return a.astype(np.int64)
        return a
    return a.astype(np.int64, copy=False)


def int_matmul(a, b):
    """Exact integer matrix product, int64 when provably safe."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype != object and b.dtype != object and a.size and b.size:
        # |(ab)_ij| <= max_i sum_k |a_ik| * max |b|; float estimate with a 2x margin
        rows = float(np.abs(a.astype(np.float64)).sum(axis=1).max())
        if rows * float(_absmax(b)) < _INT64_SAFE / 2:
            return matmul_i64(np.ascontiguousarray(a, dtype=np.int64),
                              np.ascontiguousarray(b, dtype=np.int64))
    out = np.matmul(a.astype(object), b.astype(object))
    return as_exact(out)


def int_matpow(a, k):
    """``a**k`` for a square integer matrix by repeated squaring."""
    a = as_exact(a)
    n = a.shape[0]
    result = np.eye(n, dtype=np.int64)
    base = a
    first = True
    while k > 0:
        if k & 1:
            result = base.copy() if first else int_matmul(result, base)
            first = False
        k >>= 1
        if k:
            base = int_matmul(base, base)
    return result


def exact_trace(a):
    return int(sum(int(a[i, i]) for i in range(a.shape[0])))


# ----------------------------------------------------------------------------
# closed non-backtracking walks
#
# The successor structure is CSR: successors of directed edge e are
# succ_idx[succ_ptr[e]:succ_ptr[e + 1]]. A walk of ``length`` edges
# e_0 = start, e_1, ..., e_{L-1} is closed when head(e_{L-1}) == tail(e_0);
# it is tailless when additionally e_{L-1} != rev(e_0).

def closed_walks_numpy(succ_ptr, succ_idx, head, tail, rev, start, length, tailless):
    succ_ptr = np.asarray(succ_ptr, dtype=np.int64)
    succ_idx = np.asarray(succ_idx, dtype=np.int64)
    head = np.asarray(head, dtype=np.int64)
    tail = np.asarray(tail, dtype=np.int64)
    rev = np.asarray(rev, dtype=np.int64)
    walks = np.array([[start]], dtype=np.int64)
    for _ in range(length - 1):
        last = walks[:, -1]
        counts = succ_ptr[last + 1] - succ_ptr[last]
        total = int(counts.sum())
        if total == 0:
            return np.empty((0, length), dtype=np.int64)
        rows = np.repeat(np.arange(len(walks)), counts)
        starts = np.repeat(succ_ptr[last], counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        nxt = succ_idx[starts + offsets]
        walks = np.concatenate([walks[rows], nxt[:, None]], axis=1)
    last = walks[:, -1]
    keep = head[last] == tail[start]
    if tailless:
        keep &= last != rev[start]
    return walks[keep]


if HAVE_NUMBA:

    @njit(cache=True)
    def _walk_dfs(succ_ptr, succ_idx, head, tail, rev, start, length, tailless, out, fill):
        path = np.empty(length, dtype=np.int64)
        cursor = np.empty(length, dtype=np.int64)
        path[0] = start
        cursor[0] = succ_ptr[start]
        depth = 0
        found = 0
        target = tail[start]
        back = rev[start]
        while depth >= 0:
            if depth == length - 1:
                e = path[depth]
                if head[e] == target and (not tailless or e != back):
                    if fill:
                        for t in range(length):
                            out[found, t] = path[t]
                    found += 1
                depth -= 1
                continue
            c = cursor[depth]
            if c < succ_ptr[path[depth] + 1]:
                cursor[depth] = c + 1
                nxt = succ_idx[c]
                depth += 1
                path[depth] = nxt
                cursor[depth] = succ_ptr[nxt]
            else:
                depth -= 1
        return found

    def closed_walks_numba(succ_ptr, succ_idx, head, tail, rev, start, length, tailless):
        args = (np.asarray(succ_ptr, dtype=np.int64), np.asarray(succ_idx, dtype=np.int64),
                np.asarray(head, dtype=np.int64), np.asarray(tail, dtype=np.int64),
                np.asarray(rev, dtype=np.int64), np.int64(start), np.int64(length),
                bool(tailless))
        empty = np.empty((0, length), dtype=np.int64)
        n = _walk_dfs(*args, empty, False)
        out = np.empty((n, length), dtype=np.int64)
        if n:
            _walk_dfs(*args, out, True)
        return out

else:  # pragma: no cover
    closed_walks_numba = closed_walks_numpy

closed_walks = closed_walks_numba if USE_NUMBA else closed_walks_numpy
