"""Typed chamber complexes and their translation operators.

Two kinds of finite quotient are supported.

* :class:`QuotientGraph`: a bipartite graph with vertex types 0/1, standing in
  for a quotient of a tree. Chambers are edges, each identified with its
  directed copy pointing from the type-0 to the type-1 end. ``T_k`` is the
  restriction of ``B^(2k)`` (B the non-backtracking edge operator) to those
  canonical directed edges.
* :class:`ThinQuotient`: alcoves of an affine Coxeter complex modulo a
  finite-index translation sublattice. Every ``T_k`` is a permutation.

Operators are dense exact integer matrices (int64, or Python ints when
entries could overflow).
"""

from dataclasses import dataclass, field
from fractions import Fraction
import json
from collections import deque

import numpy as np

from . import _kernels as K
from . import lattice as L
from .coxeter import build_system, parabolic_enumerate
from .errors import (InvalidPosition, IrregularGraph, MalformedDocument,
                     NotBipartiteWithTypes)


# ----------------------------------------------------------------------------
# operators

@dataclass(frozen=True)
class ChamberOperator:
    """Square nonnegative integer matrix indexed by chambers."""

    matrix: np.ndarray
    chambers: tuple = field(default=(), compare=False)

    @property
    def size(self):
        return self.matrix.shape[0]

    def __matmul__(self, other):
        return ChamberOperator(K.int_matmul(self.matrix, other.matrix), self.chambers)

    def __eq__(self, other):
        return self.matrix.shape == other.matrix.shape and bool(
            np.all(self.matrix.astype(object) == other.matrix.astype(object)))

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def power(self, k):
        return ChamberOperator(K.int_matpow(self.matrix, k), self.chambers)

    def trace(self):
        return K.exact_trace(self.matrix)

    def row_sums(self):
        return [int(sum(int(x) for x in row)) for row in self.matrix]

    def is_permutation(self):
        m = self.matrix
        return bool(np.all((m == 0) | (m == 1)) and np.all(m.sum(axis=0) == 1)
                    and np.all(m.sum(axis=1) == 1))

    def nonnegative(self):
        return all(int(x) >= 0 for x in self.matrix.flat)

    def to_triplets(self):
        n = self.size
        trip = [[i, j, int(self.matrix[i, j])] for i in range(n) for j in range(n)
                if self.matrix[i, j]]
        return {"size": n, "entries": trip}

    @classmethod
    def identity(cls, n, chambers=()):
        return cls(np.eye(n, dtype=np.int64), chambers)


# ----------------------------------------------------------------------------
# rank one: bipartite graphs

@dataclass(frozen=True)
class QuotientGraph:
    """Bipartite graph with types. Edge i is stored as (type-0 end, type-1 end).

    Directed edge 2i is edge i in canonical orientation (type 0 -> type 1),
    directed edge 2i+1 is its reverse.
    """

    vertices: tuple  # vertex ids, in document order
    types: tuple  # type of each vertex (parallel to vertices)
    edges: tuple  # pairs of vertex positions (type-0 end, type-1 end)
    name: str = ""

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_chambers(self):
        return len(self.edges)

    def degrees(self):
        deg = [0] * self.num_vertices
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def regularity(self):
        """q if the graph is (q+1)-regular with q >= 1, else None."""
        deg = set(self.degrees())
        if len(deg) == 1:
            d = deg.pop()
            return d - 1 if d >= 2 else None
        return None

    def require_regular(self):
        q = self.regularity()
        if q is None:
            raise IrregularGraph("graph is not (q+1)-regular for a single q >= 1",
                                 degrees=sorted(set(self.degrees())))
        return q

    def diagnostics(self):
        deg = self.degrees()
        return {"vertices": self.num_vertices, "chambers": self.num_chambers,
                "bipartite": True, "degrees": sorted(set(deg)), "q": self.regularity()}

    # directed edges
    def directed(self):
        """Arrays (tail, head, rev) over the 2|E| directed edges."""
        tail, head = [], []
        for a, b in self.edges:
            tail += [a, b]
            head += [b, a]
        rev = [i ^ 1 for i in range(len(tail))]
        return np.array(tail, dtype=np.int64), np.array(head, dtype=np.int64), \
            np.array(rev, dtype=np.int64)

    def successors(self):
        """CSR successor lists of the non-backtracking walk."""
        tail, head, rev = self.directed()
        out_of = [[] for _ in range(self.num_vertices)]
        for e, t in enumerate(tail):
            out_of[t].append(e)
        ptr, idx = [0], []
        for e in range(len(tail)):
            idx += [f for f in out_of[head[e]] if f != rev[e]]
            ptr.append(len(idx))
        return np.array(ptr, dtype=np.int64), np.array(idx, dtype=np.int64)

    def canonical_edges(self):
        return list(range(0, 2 * self.num_chambers, 2))

    def to_json(self):
        return {"vertices": [{"id": v, "type": t} for v, t in zip(self.vertices, self.types)],
                "edges": [[self.vertices[a], self.vertices[b]] for a, b in self.edges]}


def load_quotient_graph(document, name=""):
    """Validate a graph document ``{"vertices": [{"id", "type"}...], "edges": [[a, b]...]}``.

    Types may be omitted, in which case a 2-coloring is inferred with the
    lowest vertex of each component typed 0.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict) or "vertices" not in document or "edges" not in document:
        raise MalformedDocument("graph document needs 'vertices' and 'edges'")
    raw_vertices = document["vertices"]
    ids, types = [], []
    for v in raw_vertices:
        if isinstance(v, dict):
            if "id" not in v:
                raise MalformedDocument("vertex without id")
            ids.append(v["id"])
            types.append(v.get("type"))
        else:
            ids.append(v)
            types.append(None)
    if len(set(map(_hashable, ids))) != len(ids):
        raise MalformedDocument("duplicate vertex ids")
    pos = {_hashable(v): i for i, v in enumerate(ids)}
    edges = []
    for e in document["edges"]:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise MalformedDocument(f"edge {e!r} is not a pair")
        try:
            a, b = pos[_hashable(e[0])], pos[_hashable(e[1])]
        except KeyError:
            raise MalformedDocument(f"edge {e!r} names an unknown vertex") from None
        if a == b:
            raise NotBipartiteWithTypes(f"loop at vertex {e[0]!r}")
        edges.append((a, b))
    if any(t is None for t in types):
        types = _two_color(len(ids), edges, types)
    for t in types:
        if t not in (0, 1):
            raise MalformedDocument(f"vertex type {t!r} is not 0 or 1")
    oriented = []
    for a, b in edges:
        if types[a] == types[b]:
            raise NotBipartiteWithTypes(
                f"edge {[ids[a], ids[b]]} joins two vertices of type {types[a]}",
                edge=[ids[a], ids[b]])
        oriented.append((a, b) if types[a] == 0 else (b, a))
    return QuotientGraph(tuple(ids), tuple(types), tuple(oriented), name or document.get("name", ""))


def _hashable(v):
    return json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v


def _two_color(n, edges, given):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    color = list(given)
    for s in range(n):
        if color[s] is not None:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if color[u] is None:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    raise NotBipartiteWithTypes("graph has an odd cycle")
    return color


def load_quotient_graph_file(path):
    with open(path) as fh:
        return load_quotient_graph(fh.read())


def cycle_graph(n):
    """The n-cycle with alternating types (n even)."""
    if n % 2:
        raise NotBipartiteWithTypes("odd cycle cannot carry alternating types")
    return load_quotient_graph({"vertices": [{"id": i, "type": i % 2} for i in range(n)],
                                "edges": [[i, (i + 1) % n] for i in range(n)]}, f"C{n}")


def complete_bipartite(a, b):
    verts = [{"id": i, "type": 0} for i in range(a)] + [{"id": a + j, "type": 1} for j in range(b)]
    return load_quotient_graph({"vertices": verts,
                                "edges": [[i, a + j] for i in range(a) for j in range(b)]},
                               f"K{a},{b}")


def non_backtracking_operator(g, index=None):
    """Edge operator on the 2|E| directed edges.

    ``B[e, f] = index[f] - [f == reverse(e)]`` whenever f leaves the head of e.
    With ``index`` omitted every directed edge has index 1, giving the usual
    0/1 Hashimoto matrix. An index counts the lifts of a directed edge at its
    tail in the universal cover.
    """
    tail, head, rev = g.directed()
    n = len(tail)
    if index is None:
        index = np.ones(n, dtype=np.int64)
    index = np.asarray(index, dtype=np.int64)
    out_of = [[] for _ in range(g.num_vertices)]
    for f, t in enumerate(tail):
        out_of[t].append(f)
    b = np.zeros((n, n), dtype=np.int64)
    for e in range(n):
        for f in out_of[head[e]]:
            b[e, f] = index[f] - (f == rev[e])
    return ChamberOperator(b, tuple(range(n)))


def translation_from_edge_operator(b, canonical, k):
    """T_k = B^(2k) restricted to the canonical directed edges."""
    mat = b.matrix if isinstance(b, ChamberOperator) else b
    if k < 0:
        raise InvalidPosition(f"position {k} must be >= 0")
    idx = np.asarray(canonical, dtype=np.int64)
    if k == 0:
        return ChamberOperator.identity(len(idx), tuple(canonical))
    power = K.int_matpow(mat, 2 * k)
    return ChamberOperator(K.as_exact(power[np.ix_(idx, idx)]), tuple(canonical))


def translation_operator(g, k):
    """T_k on the chambers of a bipartite quotient graph (k a nonnegative integer)."""
    if isinstance(k, (tuple, list)):
        if len(k) != 1:
            raise InvalidPosition("rank-one positions have one coordinate")
        k = k[0]
    b = non_backtracking_operator(g)
    return translation_from_edge_operator(b, g.canonical_edges(), int(k))


def verify_cover_pushforward(cover, base, vertex_map, k):
    """Check that T_k of a covering graph pushes forward to T_k of the base.

    For every chamber c~ of the cover over c and every base chamber c',
    sum over lifts c~' of c' of T_k^cover[c~, c~'] must equal T_k^base[c, c'].
    """
    proj = {}
    base_pos = {(a, b): i for i, (a, b) in enumerate(base.edges)}
    for i, (a, b) in enumerate(cover.edges):
        key = (base.vertices.index(vertex_map[cover.vertices[a]]),
               base.vertices.index(vertex_map[cover.vertices[b]]))
        if key not in base_pos:
            raise MalformedDocument("vertex map does not send edges to edges")
        proj[i] = base_pos[key]
    tc = translation_operator(cover, k).matrix
    tb = translation_operator(base, k).matrix
    bad = []
    for i in range(cover.num_chambers):
        pushed = [0] * base.num_chambers
        for j in range(cover.num_chambers):
            pushed[proj[j]] += int(tc[i, j])
        expected = [int(x) for x in tb[proj[i]]]
        if pushed != expected:
            bad.append(i)
    return {"k": k, "checked": cover.num_chambers, "violations": bad, "ok": not bad}


# ----------------------------------------------------------------------------
# thin quotients of affine Coxeter complexes

@dataclass(frozen=True)
class ThinQuotient:
    """Alcoves of an affine Coxeter complex modulo a translation sublattice.

    ``sublattice`` rows are generators of Lambda_Gamma in coroot coordinates
    (so the identity matrix is the full lattice of type-0 vertices). A chamber
    is stored as (finite Weyl element index, translation mod Lambda_Gamma).
    """

    system: object
    sublattice: tuple
    hnf: tuple
    finite_part: tuple = field(repr=False)  # CoxeterElements of W_fin
    chambers: tuple = field(repr=False)
    _lookup: dict = field(repr=False, compare=False, default=None)

    @property
    def rank(self):
        return self.system.roots.rank

    @property
    def num_chambers(self):
        return len(self.chambers)

    @property
    def index(self):
        return abs(int(L.determinant(self.sublattice)))

    def position_lattice(self):
        """Basis of valid positions k (sum k_j e_j in the type-0 lattice), in k-coordinates."""
        rd = self.system.roots
        g = rd.position_scale()
        return [[Fraction(rd.cartan[i][j], g[j]) for j in range(rd.rank)] for i in range(rd.rank)]

    def position_vector(self, k):
        """sum k_j e_j in coroot coordinates; InvalidPosition if not in the type-0 lattice."""
        rd = self.system.roots
        k = tuple(int(x) for x in k)
        if len(k) != rd.rank:
            raise InvalidPosition(f"position needs {rd.rank} coordinates", k=list(k))
        if any(x < 0 for x in k):
            raise InvalidPosition("positions have nonnegative coordinates", k=list(k))
        g = rd.position_scale()
        y = [g[j] * k[j] for j in range(rd.rank)]
        mu = rd.to_coroot_coords(y)
        if any(Fraction(x).denominator != 1 for x in mu):
            raise InvalidPosition(f"sum k_j e_j is not a type-0 vertex for k={list(k)}", k=list(k))
        return tuple(int(x) for x in mu)

    def is_valid(self, k):
        try:
            self.position_vector(k)
            return True
        except InvalidPosition:
            return False

    def chamber_of(self, element_map):
        """Chamber index of the alcove w(A) for an affine map w in W."""
        rd = self.system.roots
        lin = element_map.linear
        mu = rd.to_coroot_coords(element_map.shift)
        return self._lookup[(lin, L.reduce_mod_lattice(mu, self.hnf))]

    def to_json(self):
        return {"type": self.system.type_tag, "sublattice": [list(r) for r in self.sublattice],
                "chambers": self.num_chambers, "index": self.index}


def build_thin_quotient(type_tag, sublattice):
    system = build_system(type_tag)
    if not system.affine:
        raise MalformedDocument("thin quotients need an affine type")
    n = system.roots.rank
    sub = [[int(x) for x in row] for row in sublattice]
    if len(sub) != n or any(len(r) != n for r in sub):
        raise MalformedDocument(f"sublattice must be a {n}x{n} integer matrix")
    if L.determinant(sub) == 0:
        raise MalformedDocument("sublattice does not have finite index")
    hnf = tuple(tuple(r) for r in L.hermite_normal_form(sub))
    finite = tuple(parabolic_enumerate(system, system.finite_indices))
    reps, _ = L.coset_representatives(sub)
    reps = sorted(L.reduce_mod_lattice(c, hnf) for c in reps)
    chambers = tuple((i, c) for i in range(len(finite)) for c in reps)
    lookup = {(finite[i].map.linear, c): pos for pos, (i, c) in enumerate(chambers)}
    return ThinQuotient(system, tuple(tuple(r) for r in sub), hnf, finite, chambers, lookup)


def load_thin_quotient(document):
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict) or "type" not in document or "sublattice" not in document:
        raise MalformedDocument("thin quotient document needs 'type' and 'sublattice'")
    return build_thin_quotient(document["type"], document["sublattice"])


def thin_translation_operator(t, k):
    """Permutation matrix sending each chamber to its unique chamber in position k.

    For C = t_mu w_f(A) the chamber in position k is t_mu w_f(A + p_k), i.e.
    (w_f, mu) -> (w_f, mu + w_f(p_k)) with p_k = sum k_j e_j.
    """
    p = t.position_vector(k)
    rd = t.system.roots
    p_y = L.vec_mat(list(p), [list(r) for r in rd.cartan])
    n = t.num_chambers
    m = np.zeros((n, n), dtype=np.int64)
    moved = []
    for w in t.finite_part:
        img = [sum(a * x for a, x in zip(row, p_y)) for row in w.map.linear]
        moved.append(tuple(int(x) for x in rd.to_coroot_coords(img)))
    for src, (i, c) in enumerate(t.chambers):
        target = L.reduce_mod_lattice([a + b for a, b in zip(c, moved[i])], t.hnf)
        m[src, t._lookup[(t.finite_part[i].map.linear, target)]] = 1
    return ChamberOperator(m, tuple(range(n)))


def thin_translation_by_action(t, k):
    """Same operator computed from the affine action on alcoves (independent route).

    Applies the element w * t_{p_k} to the base alcove for each chamber
    representative w and looks the result up by its affine map.
    """
    from .coxeter import AffineMap

    p = t.position_vector(k)
    rd = t.system.roots
    p_y = L.vec_mat(list(p), [list(r) for r in rd.cartan])
    shift = AffineMap.make(L.identity(rd.rank), p_y)
    n = t.num_chambers
    m = np.zeros((n, n), dtype=np.int64)
    for src, (i, c) in enumerate(t.chambers):
        mu_y = L.vec_mat(list(c), [list(r) for r in rd.cartan])
        w = AffineMap.make(L.identity(rd.rank), mu_y) @ t.finite_part[i].map
        m[src, t.chamber_of(w @ shift)] = 1
    return ChamberOperator(m, tuple(range(n)))


# ----------------------------------------------------------------------------
# product law

def verify_product_law(op, ks, ls=None):
    """Check T_k T_l = T_{k+l} exactly for all k in ks, l in ls.

    ``op`` maps a position (int or tuple) to a ChamberOperator. Positions whose
    sum is invalid are skipped; violations are listed, not raised.
    """
    ls = ks if ls is None else ls
    cache = {}

    def get(k):
        key = tuple(k) if isinstance(k, (tuple, list)) else k
        if key not in cache:
            cache[key] = op(k)
        return cache[key]

    checked, violations = 0, []
    for k in ks:
        for l in ls:
            s = tuple(a + b for a, b in zip(k, l)) if isinstance(k, (tuple, list)) else k + l
            try:
                lhs = get(k) @ get(l)
                rhs = get(s)
            except InvalidPosition:
                continue
            checked += 1
            if lhs != rhs:
                violations.append({"k": _plain(k), "l": _plain(l)})
    return {"checked": checked, "violations": violations, "ok": not violations}


def _plain(k):
    return list(k) if isinstance(k, (tuple, list)) else k


def valid_positions(t, max_entry, positive=False):
    """All valid positions with entries in [lo, max_entry], lo = 1 if positive else 0."""
    from itertools import product

    lo = 1 if positive else 0
    return [k for k in product(range(lo, max_entry + 1), repeat=t.rank) if t.is_valid(k)]
