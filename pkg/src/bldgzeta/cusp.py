"""Rank-one cuspidal quotients: a finite core graph with periodic rays attached.

A ray attached at core vertex r_0 has vertices r_1, r_2, ... and edges
eps_j = (r_j, r_{j+1}). Each directed edge carries an index (number of lifts at
its tail in the universal cover):

* index(r_{j+1} -> r_j) = q_minus(j), read from ``prefix`` then ``period`` repeated;
* index(r_j -> r_{j+1}) = 1, since q_plus = 1 on every wall;
* core edges have index 1.

The weighted non-backtracking operator is ``B[e, f] = index(f) - [f = rev e]``
and T_k is B^(2k) on canonical (type 0 -> type 1) edges, exactly as for
uniform quotients. Core chambers have depth 0; eps_j has depth j + 1.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from collections import deque
import json

import numpy as np

from . import _kernels as K
from . import lattice as L
from .complex import QuotientGraph, load_quotient_graph, non_backtracking_operator
from .errors import (MalformedDocument, MalformedRay, SingularFit, TruncationTooShallow,
                     TypeMismatchAtAttachment)
from .poly import MultiPoly, RationalFunction, series_expand


@dataclass(frozen=True)
class Ray:
    attach: int  # position of the attachment vertex in the core
    prefix: tuple
    period: tuple

    def q_minus(self, j):
        if j < len(self.prefix):
            return self.prefix[j]
        return self.period[(j - len(self.prefix)) % len(self.period)]

    def to_json(self, core):
        return {"attach": core.vertices[self.attach], "prefix": list(self.prefix),
                "period": list(self.period)}


@dataclass(frozen=True)
class CuspidalQuotient:
    core: QuotientGraph
    rays: tuple

    def core_diameter(self):
        """Largest finite vertex distance in the core graph."""
        n = self.core.num_vertices
        adj = [[] for _ in range(n)]
        for a, b in self.core.edges:
            adj[a].append(b)
            adj[b].append(a)
        best = 0
        for s in range(n):
            dist = {s: 0}
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u in adj[v]:
                    if u not in dist:
                        dist[u] = dist[v] + 1
                        queue.append(u)
            best = max(best, max(dist.values()))
        return best

    def max_period(self):
        return max((len(r.period) for r in self.rays), default=1)

    def radius(self, k):
        """Truncation radius R(k) = k + core diameter + one full period."""
        return k + self.core_diameter() + self.max_period()

    def max_q(self):
        """Largest number of onward continuations anywhere in the universal cover."""
        deg = self.core.degrees()
        for r in self.rays:
            deg[r.attach] += 1
        q = max((d - 1 for d in deg), default=0)
        for r in self.rays:
            q = max(q, max(r.prefix + r.period))
        return max(q, 1)

    def to_json(self):
        return {"core": self.core.to_json(), "rays": [r.to_json(self.core) for r in self.rays]}


def build_cuspidal(document):
    """Validate ``{"core": graph, "rays": [{"attach", "prefix", "period"}]}``.

    A ray may also give ``"type"``, the type of its first vertex r_1, which
    must differ from the type of the attachment vertex.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict) or "core" not in document:
        raise MalformedDocument("cusp document needs a 'core' graph")
    core = load_quotient_graph(document["core"])
    rays = []
    for i, r in enumerate(document.get("rays", [])):
        if not isinstance(r, dict) or "attach" not in r:
            raise MalformedRay(f"ray {i} has no attachment vertex", ray=i)
        if r["attach"] not in core.vertices:
            raise MalformedRay(f"ray {i} attaches to unknown vertex {r['attach']!r}", ray=i)
        prefix = r.get("prefix", [])
        period = r.get("period", [])
        if not isinstance(prefix, list) or not isinstance(period, list) or not period:
            raise MalformedRay(f"ray {i} needs a nonempty period list", ray=i)
        for x in prefix + period:
            if not isinstance(x, int) or isinstance(x, bool) or x < 1:
                raise MalformedRay(f"ray {i} has multiplicity {x!r}; multiplicities are integers >= 1",
                                   ray=i)
        if "q_plus" in r and r["q_plus"] != 1:
            raise MalformedRay(f"ray {i}: q_plus must be 1 on every wall", ray=i)
        pos = core.vertices.index(r["attach"])
        if "type" in r and r["type"] == core.types[pos]:
            raise TypeMismatchAtAttachment(
                f"ray {i} starts with type {r['type']} at a vertex of the same type", ray=i)
        rays.append(Ray(pos, tuple(prefix), tuple(period)))
    return CuspidalQuotient(core, tuple(rays))


@dataclass
class TruncatedQuotient:
    """Finite weighted graph: the core plus every ray cut at a given depth."""

    depth: int
    graph: QuotientGraph
    index: np.ndarray  # per directed edge
    chamber_depth: list  # per undirected edge
    boundary: list  # positions of cut vertices (one per ray)

    def edge_operator(self):
        return non_backtracking_operator(self.graph, self.index)

    def restricted_to(self, radius):
        """Canonical directed edges of chambers at depth <= radius."""
        return [2 * i for i, d in enumerate(self.chamber_depth) if d <= radius]


def truncate(cq, depth):
    """Cut every ray after ``depth`` edges."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    core = cq.core
    vertices = list(core.vertices)
    types = list(core.types)
    edges = list(core.edges)
    idx_pairs = [(1, 1)] * len(edges)  # (index of canonical dir, index of reverse)
    chamber_depth = [0] * len(edges)
    boundary = []
    for ri, ray in enumerate(cq.rays):
        prev = ray.attach
        for j in range(depth):
            vertices.append(("ray", ri, j + 1))
            types.append(1 - types[prev])
            cur = len(vertices) - 1
            down = ray.q_minus(j)
            if types[prev] == 0:
                edges.append((prev, cur))
                idx_pairs.append((1, down))  # canonical is upward
            else:
                edges.append((cur, prev))
                idx_pairs.append((down, 1))  # canonical is downward
            chamber_depth.append(j + 1)
            prev = cur
        boundary.append(prev)
    graph = QuotientGraph(tuple(vertices), tuple(types), tuple(edges), "truncation")
    index = np.array([x for pair in idx_pairs for x in pair], dtype=np.int64)
    return TruncatedQuotient(depth, graph, index, chamber_depth, boundary)


def _restricted_power_traces(tq, radii, kmax):
    """tr of T_k restricted to chambers of depth <= radii[k], for k = 1..kmax."""
    b = tq.edge_operator().matrix
    canon = np.arange(0, 2 * tq.graph.num_chambers, 2)
    t1 = K.int_matmul(b, b)[np.ix_(canon, canon)]
    t1 = K.as_exact(t1)
    out = {}
    cur = None
    for k in range(1, kmax + 1):
        cur = t1 if cur is None else K.int_matmul(cur, t1)
        out[k] = {r: sum(int(cur[i, i]) for i, d in enumerate(tq.chamber_depth) if d <= r)
                  for r in radii(k)}
    return out


def truncated_trace(cq, k, radius, check=True, cycle_filter=None):
    """tr of T_k over chambers of depth <= radius, on a truncation deep enough to be exact.

    With ``check`` the value is recomputed at radius + 2 and
    TruncationTooShallow is raised if they differ or if radius < k + core
    diameter. ``cycle_filter`` is reserved for excluding non-compact closed
    geodesics in higher rank; in rank one nothing is excluded.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    bound = k + cq.core_diameter()
    if check and radius < bound:
        raise TruncationTooShallow(f"radius {radius} is below k + core diameter = {bound}",
                                   k=k, radius=radius)
    tq = truncate(cq, radius + 2 + k + 1)
    vals = _restricted_power_traces(tq, lambda kk: (radius, radius + 2) if kk == k else (), k)[k]
    value = vals[radius]
    if cycle_filter is not None:
        value = cycle_filter(cq, k, value)
    if check and vals[radius + 2] != value:
        raise TruncationTooShallow("truncated trace is not stationary", k=k, radius=radius,
                                   value=value, value_plus_2=vals[radius + 2])
    return value


def zeta_series(cq, n, check=True):
    """[c_1, ..., c_n] with c_k the truncated trace at radius R(k)."""
    if n < 1:
        raise ValueError("need at least one coefficient")
    top = cq.radius(n) + 2 + n + 1
    tq = truncate(cq, top)
    vals = _restricted_power_traces(tq, lambda k: (cq.radius(k), cq.radius(k) + 2), n)
    out = []
    for k in range(1, n + 1):
        r = cq.radius(k)
        if check and vals[k][r] != vals[k][r + 2]:
            raise TruncationTooShallow("truncated trace is not stationary", k=k, radius=r,
                                       value=vals[k][r], value_plus_2=vals[k][r + 2])
        out.append(vals[k][r])
    return out


def stationarity_report(cq, kmax):
    """Values at R(k) and R(k)+2 for k = 1..kmax, without raising."""
    top = cq.radius(kmax) + 2 + kmax + 1
    tq = truncate(cq, top)
    vals = _restricted_power_traces(tq, lambda k: (cq.radius(k), cq.radius(k) + 2), kmax)
    rows = [{"k": k, "R": cq.radius(k), "at_R": vals[k][cq.radius(k)],
             "at_R_plus_2": vals[k][cq.radius(k) + 2],
             "stationary": vals[k][cq.radius(k)] == vals[k][cq.radius(k) + 2]}
            for k in range(1, kmax + 1)]
    return {"rows": rows, "ok": all(r["stationary"] for r in rows)}


def weighted_walk_trace(cq, k, radius):
    """Brute-force oracle: weighted closed non-backtracking walks of length 2k.

    Enumerates walks edge by edge from every canonical chamber of depth <=
    radius, multiplying continuation weights index(f) - [f = rev e], including
    the closing step back onto the start.
    """
    tq = truncate(cq, radius + k + 1)
    tail, head, rev = tq.graph.directed()
    out_of = [[] for _ in range(tq.graph.num_vertices)]
    for f, t in enumerate(tail):
        out_of[t].append(f)
    index = tq.index
    total = 0
    for start in tq.restricted_to(radius):
        stack = [(start, 1, 1)]
        while stack:
            e, steps, w = stack.pop()
            if steps == 2 * k:
                if head[e] == tail[start]:
                    total += w * (int(index[start]) - int(start == rev[e]))
                continue
            for f in out_of[head[e]]:
                c = int(index[f]) - int(f == rev[e])
                if c:
                    stack.append((f, steps + 1, w * c))
    return total


def growth_report(coeffs, q):
    """Ratios c_k / q^(2k); a bounded sequence supports c_k = O(q^(2k))."""
    ratios = [Fraction(c, q ** (2 * k)) for k, c in enumerate(coeffs, start=1)]
    return {"q": q, "ratios": [str(r) for r in ratios], "max_ratio": str(max(ratios, default=0))}


# ----------------------------------------------------------------------------
# Pade fitting

@dataclass
class PadeFit:
    p: int
    q: int
    numerator: list  # Fractions, degree <= p
    denominator: list  # Fractions, degree <= q, constant term 1
    clean: bool
    first_mismatch: int = None
    checked: int = 0

    def function(self):
        return RationalFunction(MultiPoly.from_coeffs(self.numerator),
                                MultiPoly.from_coeffs(self.denominator))

    def to_json(self):
        from .poly import format_fraction

        fn = self.function()
        return {"p": self.p, "q": self.q,
                "num": [format_fraction(c) for c in self.numerator],
                "den": [format_fraction(c) for c in self.denominator],
                "reduced": fn.to_json(), "clean": self.clean,
                "first_mismatch": self.first_mismatch, "checked": self.checked}


def pade_fit(coeffs, p, q):
    """Exact [p/q] Pade approximant to the series sum coeffs[i] u^i.

    Denominator coefficients Q_1..Q_q solve the Hankel system
    sum_i Q_i c_{n-i} = -c_n for n = p+1..p+q (Q_0 = 1), by Gauss-Jordan
    elimination with first-nonzero pivoting; free unknowns are set to 0.
    The fit is clean when P/Q reproduces every supplied coefficient.
    """
    c = [Fraction(x) for x in coeffs]
    if p < 0 or q < 0:
        raise ValueError("degrees must be >= 0")
    if p + q + 1 > len(c):
        raise SingularFit(f"need at least {p + q + 1} coefficients, got {len(c)}", p=p, q=q)

    def coef(i):
        return c[i] if 0 <= i < len(c) else Fraction(0)

    qs = [Fraction(1)] + [Fraction(0)] * q
    if q:
        rows = [[coef(n - i) for i in range(1, q + 1)] + [-coef(n)] for n in range(p + 1, p + q + 1)]
        red, pivots = L._rref(rows)
        if q in pivots:
            raise SingularFit(f"Hankel system is inconsistent at degrees ({p}, {q})", p=p, q=q)
        for r, col in enumerate(pivots):
            qs[col + 1] = red[r][q]
    ps = [sum(qs[i] * coef(n - i) for i in range(0, min(n, q) + 1)) for n in range(p + 1)]
    approx = series_expand(RationalFunction(MultiPoly.from_coeffs(ps), MultiPoly.from_coeffs(qs),
                                            reduce=False), len(c) - 1).coeffs(len(c))
    first = next((i for i in range(len(c)) if approx[i] != c[i]), None)
    return PadeFit(p, q, ps, qs, first is None, first, len(c))


def pade_search(coeffs, max_degree=None, spare=2):
    """Smallest p + q giving a clean fit with at least ``spare`` unused coefficients."""
    n = len(coeffs)
    top = n - 1 - spare if max_degree is None else max_degree
    for total in range(0, top + 1):
        for q in range(0, total + 1):
            p = total - q
            if p + q + 1 + spare > n:
                continue
            try:
                fit = pade_fit(coeffs, p, q)
            except SingularFit:
                continue
            if fit.clean:
                return fit
    return None
