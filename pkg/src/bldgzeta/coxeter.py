"""Affine and finite crystallographic Coxeter groups with exact affine actions.

Realization. For a finite root system with simple roots alpha_1..alpha_n we
use the coordinates ``y_j = <alpha_j, x>`` on the ambient space. In these
coordinates every simple reflection is an integer affine map:

* ``s_i`` (i >= 1):  y -> y - y_i * (row i of the Cartan matrix)
* ``s_0`` (affine):  y -> y - (<theta, x> - 1) * theta_check,  theta the highest root

The fundamental alcove is ``y_j > 0, sum c_j y_j < 1`` (c = coefficients of
theta) and the origin is a special vertex. Group elements are stored as exact
affine maps and compared exactly. Generator 0 is the affine reflection ``s0``;
the finite ones follow as ``s1..sn``. Finite types only have ``s1..sn``.

An infinite Coxeter matrix entry is encoded as 0.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
import math
import re
import unicodedata

import numpy as np

from . import lattice as L
from .errors import (BraidRelationViolated, DivisionByZeroPoly, InfiniteParabolic, InvalidRepresentation,
                     MalformedDocument, NonInvolutiveGenerator, NotInGroup,
                     SingularParabolicSum, UnsupportedCoxeterLabel, UnsupportedCoxeterType)
from .poly import MultiPoly, RationalMatrix, series_expand, series_inverse

INF = 0
CRYSTALLOGRAPHIC = (2, 3, 4, 6, INF)
_DESCENT_GUARD = 100_000


# ----------------------------------------------------------------------------
# exact affine maps

@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + shift, with Fraction entries."""

    linear: tuple
    shift: tuple

    @classmethod
    def make(cls, linear, shift):
        return cls(tuple(tuple(Fraction(x) for x in row) for row in linear),
                   tuple(Fraction(x) for x in shift))

    @classmethod
    def identity(cls, d):
        return cls.make(L.identity(d), [0] * d)

    @property
    def dim(self):
        return len(self.shift)

    def __matmul__(self, other):
        """Composition: (self @ other)(x) = self(other(x))."""
        a, b = self.linear, other.linear
        d = len(a)
        lin = tuple(tuple(sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d))
                    for i in range(d))
        sh = tuple(sum(a[i][k] * other.shift[k] for k in range(d)) + self.shift[i]
                   for i in range(d))
        return AffineMap(lin, sh)

    def __call__(self, x):
        return tuple(sum(r * v for r, v in zip(row, x)) + t
                     for row, t in zip(self.linear, self.shift))

    def inverse(self):
        inv = L.inverse(self.linear)
        sh = [-sum(inv[i][k] * self.shift[k] for k in range(self.dim)) for i in range(self.dim)]
        return AffineMap.make(inv, sh)

    def is_identity(self):
        d = self.dim
        return (all(self.linear[i][j] == (i == j) for i in range(d) for j in range(d))
                and not any(self.shift))

    def to_json(self):
        return {"linear": [[str(x) for x in row] for row in self.linear],
                "shift": [str(x) for x in self.shift]}


def _wall_of(reflection, base):
    """Affine functional (normal, const) vanishing on the fixed hyperplane, positive at base."""
    d = reflection.dim
    for r in range(d):
        normal = [reflection.linear[r][j] - (r == j) for j in range(d)]
        const = reflection.shift[r]
        if any(normal) or const:
            val = sum(n * x for n, x in zip(normal, base)) + const
            if val == 0:
                raise MalformedDocument("base point lies on a reflecting wall")
            if val < 0:
                normal, const = [-n for n in normal], -const
            return tuple(normal), const
    raise NonInvolutiveGenerator("generator acts as the identity")


# ----------------------------------------------------------------------------
# finite root systems

def _gram(kind, n):
    """Gram matrix of simple roots (Bourbaki numbering), scaled to integers."""
    g = [[0] * n for _ in range(n)]

    def chain():
        for i in range(n - 1):
            g[i][i + 1] = g[i + 1][i] = -1
        for i in range(n):
            g[i][i] = 2

    if kind == "A" and n >= 1:
        chain()
    elif kind == "B" and n >= 2:
        chain()
        g[n - 1][n - 1] = 1
        g[n - 2][n - 1] = g[n - 1][n - 2] = Fraction(-1)
    elif kind == "C" and n >= 2:
        chain()
        g[n - 1][n - 1] = 4
        g[n - 2][n - 1] = g[n - 1][n - 2] = -2
    elif kind == "D" and n >= 4:
        chain()
        g[n - 2][n - 1] = g[n - 1][n - 2] = 0
        g[n - 3][n - 1] = g[n - 1][n - 3] = -1
    elif kind == "E" and n in (6, 7, 8):
        for i in range(n):
            g[i][i] = 2
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]
        for a, b in edges:
            g[a][b] = g[b][a] = -1
    elif kind == "F" and n == 4:
        g = [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 1, Fraction(-1, 2)],
             [0, 0, Fraction(-1, 2), 1]]
    elif kind == "G" and n == 2:
        g = [[2, -3], [-3, 6]]
    else:
        raise UnsupportedCoxeterType(f"no root system of type {kind}{n}")
    return [[Fraction(x) for x in row] for row in g]


@dataclass(frozen=True)
class RootData:
    """Finite root system data behind an affine (or finite) realization."""

    kind: str
    rank: int
    gram: tuple
    cartan: tuple  # cartan[i][j] = <alpha_i_check, alpha_j> = 2(a_i, a_j)/(a_i, a_i)
    positive_roots: tuple  # simple-root coordinates
    highest_root: tuple
    theta_pairing: tuple  # <alpha_j, theta_check>

    @property
    def coxeter_number(self):
        return 1 + sum(self.highest_root)

    def coroot_basis(self):
        """Coroots alpha_k_check in y-coordinates: row k of the Cartan matrix."""
        return [list(row) for row in self.cartan]

    def position_scale(self):
        """g_j with e_j = g_j * (j-th unit vector): the gcd of Cartan column j."""
        out = []
        for j in range(self.rank):
            g = 0
            for i in range(self.rank):
                g = math.gcd(g, int(self.cartan[i][j]))
            out.append(g)
        return out

    def to_coroot_coords(self, y):
        """Integer coordinates of a y-vector in the coroot basis (Fractions if not in Q_check)."""
        inv = _cartan_inverse(self.cartan)
        return tuple(L.vec_mat(list(y), inv))


_CARTAN_INV = {}


def _cartan_inverse(cartan):
    if cartan not in _CARTAN_INV:
        _CARTAN_INV[cartan] = L.inverse(cartan)
    return _CARTAN_INV[cartan]


def root_data(kind, n):
    gram = _gram(kind, n)
    cartan = tuple(tuple(2 * gram[i][j] / gram[i][i] for j in range(n)) for i in range(n))
    if any(x.denominator != 1 for row in cartan for x in row):
        raise UnsupportedCoxeterType("non-integral Cartan matrix")
    cartan = tuple(tuple(int(x) for x in row) for row in cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(n):
                # s_i(beta) = beta - <beta, alpha_i_check> alpha_i
                pair = sum(beta[j] * cartan[i][j] for j in range(n))
                img = list(beta)
                img[i] -= pair
                img = tuple(img)
                if all(x >= 0 for x in img) and img not in roots:
                    roots.add(img)
                    nxt.append(img)
        frontier = nxt
    positive = tuple(sorted(roots, key=lambda r: (sum(r), r)))
    theta = max(positive, key=lambda r: (sum(r), r))

    def form(a, b):
        return sum(a[i] * gram[i][j] * b[j] for i in range(n) for j in range(n))

    tt = form(theta, theta)
    pairing = tuple(2 * form(simple[j], theta) / tt for j in range(n))
    if any(x.denominator != 1 for x in pairing):
        raise UnsupportedCoxeterType("non-integral highest coroot pairing")
    return RootData(kind, n, tuple(tuple(r) for r in gram), cartan, positive, theta,
                    tuple(int(x) for x in pairing))


# ----------------------------------------------------------------------------
# systems

@dataclass(frozen=True)
class CoxeterSystem:
    labels: tuple
    matrix: tuple
    type_tag: str
    generators: tuple  # AffineMap per generator
    base_point: tuple
    walls: tuple = field(repr=False)
    roots: RootData = field(default=None, repr=False)
    affine: bool = False
    finite_indices: tuple = ()  # generators fixing the origin (S_0)

    @property
    def rank(self):
        return len(self.labels)

    @property
    def dim(self):
        return len(self.base_point)

    def index(self, label):
        if isinstance(label, int):
            return label
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnsupportedCoxeterLabel(f"unknown generator {label!r}") from None

    def subset(self, labels):
        if isinstance(labels, ParabolicSubset):
            return labels.indices
        return tuple(sorted(set(self.index(s) for s in labels)))

    def parabolic(self, labels):
        return ParabolicSubset.of(self, labels)

    def identity(self):
        return CoxeterElement(AffineMap.identity(self.dim), 0, ())

    def map_of_word(self, word):
        m = AffineMap.identity(self.dim)
        for s in word:
            m = m @ self.generators[self.index(s)]
        return m

    def element(self, word):
        return length_and_word(self, self.map_of_word(word))

    def side(self, i, point):
        normal, const = self.walls[i]
        return sum(n * x for n, x in zip(normal, point)) + const

    def left_descents(self, g):
        p = g(self.base_point)
        return tuple(i for i in range(self.rank) if self.side(i, p) < 0)

    def right_descents(self, g):
        return self.left_descents(g.inverse())

    def separating_hyperplanes(self, g):
        """Number of reflecting hyperplanes between the base chamber and its image.

        Independent of the descent algorithm; only available for root-system realizations.
        """
        if self.roots is None:
            raise UnsupportedCoxeterType("hyperplane count needs root data")
        p = g(self.base_point)
        b = self.base_point
        total = 0
        for root in self.roots.positive_roots:
            vp = sum(c * y for c, y in zip(root, p))
            vb = sum(c * y for c, y in zip(root, b))
            if self.affine:
                if vp.denominator == 1:
                    raise NotInGroup("image of the base point lies on a wall")
                total += abs(math.floor(vp) - math.floor(vb))
            else:
                if vp == 0:
                    raise NotInGroup("image of the base point lies on a wall")
                total += vp < 0
        return total

    def to_json(self):
        return {"type": self.type_tag, "labels": list(self.labels),
                "m": [list(row) for row in self.matrix]}


@dataclass(frozen=True)
class ParabolicSubset:
    indices: tuple
    labels: tuple
    finite: bool

    @classmethod
    def of(cls, system, labels):
        idx = system.subset(labels)
        finite = not (system.affine and len(idx) == system.rank)
        finite = finite and classify_finite(system.matrix, idx) is not None
        return cls(idx, tuple(system.labels[i] for i in idx), finite)


@dataclass(frozen=True)
class CoxeterElement:
    map: AffineMap
    length: int
    word: tuple  # generator indices of the lex-first reduced word

    def labels(self, system):
        return [system.labels[i] for i in self.word]


def _order(a, b, limit=12):
    prod = a @ b
    m = prod
    for k in range(1, limit + 1):
        if m.is_identity():
            return k
        m = m @ prod
    return INF


def _coxeter_matrix_of(generators):
    n = len(generators)
    return tuple(tuple(1 if i == j else _order(generators[i], generators[j]) for j in range(n))
                 for i in range(n))


_TAG = re.compile(r"^\s*([A-Ga-g])\s*(~|̃)?\s*(\d+)\s*(~)?\s*$")


def parse_type_tag(tag):
    """'A~2', 'Ã2', 'C~2', 'A3' -> (kind, n, affine)."""
    # NFD splits precomposed letters such as U+00C3 into base + combining tilde
    m = _TAG.match(unicodedata.normalize("NFD", tag))
    if not m:
        raise UnsupportedCoxeterType(f"unrecognized type tag {tag!r}")
    kind = m.group(1).upper()
    affine = bool(m.group(2) or m.group(4))
    return kind, int(m.group(3)), affine


def _standard_system(kind, n, affine):
    rd = root_data(kind, n)
    d = n
    cartan = rd.cartan
    gens = []
    for i in range(n):
        lin = [[int(r == j) for j in range(d)] for r in range(d)]
        for j in range(d):
            lin[j][i] -= cartan[i][j]
        gens.append(AffineMap.make(lin, [0] * d))
    if affine:
        c = rd.highest_root
        t = rd.theta_pairing
        lin = [[int(i == j) - t[i] * c[j] for j in range(d)] for i in range(d)]
        gens.append(AffineMap.make(lin, list(t)))
        h = rd.coxeter_number
        base = tuple(Fraction(1, h) for _ in range(d))
        tag = f"{kind}~{n}"
    else:
        base = tuple(Fraction(1) for _ in range(d))
        tag = f"{kind}{n}"
    labels = default_labels(len(gens))
    finite = tuple(range(n))
    walls = tuple(_wall_of(g, base) for g in gens)
    return CoxeterSystem(labels, _coxeter_matrix_of(gens), tag, tuple(gens), base, walls,
                         rd, affine, finite)


def default_labels(rank):
    """s, t for rank 2; s, t, r for rank 3; s1..sn otherwise. The affine generator is last."""
    if rank == 2:
        return ("s", "t")
    if rank == 3:
        return ("s", "t", "r")
    return tuple(f"s{i + 1}" for i in range(rank))


def _validate_matrix(m):
    n = len(m)
    if any(len(row) != n for row in m):
        raise MalformedDocument("Coxeter matrix must be square")
    for i in range(n):
        if m[i][i] != 1:
            raise NonInvolutiveGenerator(f"diagonal entry m[{i}][{i}] = {m[i][i]} must be 1")
        for j in range(n):
            if m[i][j] != m[j][i]:
                raise MalformedDocument("Coxeter matrix must be symmetric")
            if i != j and m[i][j] not in CRYSTALLOGRAPHIC:
                raise UnsupportedCoxeterLabel(
                    f"m[{i}][{j}] = {m[i][j]} is not crystallographic (2, 3, 4, 6, inf)")


def _normalize_entry(x):
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "oo", "∞"):
            return INF
        x = int(x)
    if x is None or (isinstance(x, float) and math.isinf(x)) or x == -1:
        return INF
    return int(x)


def _check_action(gens, matrix):
    for i, g in enumerate(gens):
        if not (g @ g).is_identity():
            raise NonInvolutiveGenerator(f"generator {i} is not an involution")
    n = len(gens)
    for i in range(n):
        for j in range(i + 1, n):
            if _order(gens[i], gens[j]) != matrix[i][j]:
                raise BraidRelationViolated(
                    f"(s{i} s{j}) does not have order {matrix[i][j] or 'inf'}")


_SUPPORTED = [("A", 1, True), ("A", 2, True), ("A", 3, True), ("A", 4, True), ("B", 3, True),
              ("B", 4, True), ("C", 2, True), ("C", 3, True), ("C", 4, True), ("D", 4, True),
              ("D", 5, True), ("G", 2, True), ("F", 4, True), ("E", 6, True),
              ("A", 1, False), ("A", 2, False), ("A", 3, False), ("A", 4, False),
              ("B", 2, False), ("B", 3, False), ("B", 4, False), ("D", 4, False),
              ("G", 2, False), ("F", 4, False)]


def _recognize(matrix):
    n = len(matrix)
    for kind, r, affine in _SUPPORTED:
        if r + affine != n:
            continue
        std = _standard_system(kind, r, affine)
        if n > 8:
            perms = [tuple(range(n))]
        else:
            perms = permutations(range(n))
        for p in perms:
            if all(std.matrix[p[i]][p[j]] == matrix[i][j] for i in range(n) for j in range(n)):
                return std, p
    return None, None


def build_system(type_tag=None, matrix=None, action=None, base_point=None, labels=None):
    """Construct and validate a Coxeter system.

    Give either a type tag (``"A~2"``, ``"C~2"``, ``"G~2"``, ``"A3"``...), or a
    Coxeter matrix. A bare matrix is matched against the supported
    crystallographic types up to relabeling; with ``action`` (one
    ``(linear, shift)`` pair per generator) and ``base_point`` an arbitrary
    faithful affine realization is used instead.
    """
    if type_tag is not None:
        kind, n, affine = parse_type_tag(type_tag)
        system = _standard_system(kind, n, affine)
        _check_action(system.generators, system.matrix)
        if labels is not None:
            system = _relabel(system, tuple(labels))
        return system
    if matrix is None:
        raise MalformedDocument("need a type tag or a Coxeter matrix")
    m = tuple(tuple(_normalize_entry(x) for x in row) for row in matrix)
    _validate_matrix(m)
    n = len(m)
    if labels is None:
        labels = default_labels(n)
    if action is not None:
        if base_point is None:
            raise MalformedDocument("a custom action needs a base point inside the fundamental chamber")
        gens = tuple(AffineMap.make(lin, sh) for lin, sh in action)
        if len(gens) != n:
            raise MalformedDocument("one affine map per generator is required")
        _check_action(gens, m)
        base = tuple(Fraction(x) for x in base_point)
        walls = tuple(_wall_of(g, base) for g in gens)
        return CoxeterSystem(tuple(labels), m, "custom", gens, base, walls)
    std, perm = _recognize(m)
    if std is None:
        raise UnsupportedCoxeterType("Coxeter matrix does not match a supported crystallographic type;"
                                     " supply an explicit action")
    gens = tuple(std.generators[perm[i]] for i in range(n))
    walls = tuple(std.walls[perm[i]] for i in range(n))
    finite = tuple(sorted(i for i in range(n) if perm[i] in std.finite_indices))
    system = CoxeterSystem(tuple(labels), m, std.type_tag, gens, std.base_point, walls,
                           std.roots, std.affine, finite)
    _check_action(system.generators, system.matrix)
    return system


def _relabel(system, labels):
    if len(labels) != system.rank:
        raise MalformedDocument("wrong number of labels")
    return CoxeterSystem(labels, system.matrix, system.type_tag, system.generators,
                         system.base_point, system.walls, system.roots, system.affine,
                         system.finite_indices)


# ----------------------------------------------------------------------------
# length, words, enumeration

def length_and_word(system, g):
    """Exact length and lex-first reduced word by greedy descent.

    While the image of the base chamber lies across the wall of some generator,
    left-multiply by the lowest such generator. Each step crosses exactly one
    wall back, so the step count is the length.
    """
    if isinstance(g, CoxeterElement):
        g = g.map
    w = g
    p = g(system.base_point)
    word = []
    guard = _DESCENT_GUARD
    if system.roots is not None:
        guard = system.separating_hyperplanes(g)
    while True:
        s = next((i for i in range(system.rank) if system.side(i, p) < 0), None)
        if s is None:
            break
        if any(system.side(i, p) == 0 for i in range(system.rank)):
            raise NotInGroup("image of the base point lies on a wall")
        if len(word) >= guard:
            raise NotInGroup("descent exceeded the separating-hyperplane bound")
        gen = system.generators[s]
        w = gen @ w
        p = gen(p)
        word.append(s)
    if not w.is_identity():
        raise NotInGroup("descent ended in the fundamental chamber away from the identity")
    return CoxeterElement(g, len(word), tuple(word))


@dataclass
class BallEnumeration:
    elements: list  # sorted by (length, word)
    histogram: list
    lookup: dict  # AffineMap -> CoxeterElement

    def by_length(self, k):
        return [e for e in self.elements if e.length == k]


def _bfs(system, gens_idx, radius=None, limit=None):
    ident = system.identity()
    seen = {ident.map: ident}
    layer = [ident]
    elements = [ident]
    hist = [1]
    depth = 0
    while layer and (radius is None or depth < radius):
        nxt = []
        for w in layer:
            for s in gens_idx:
                v = w.map @ system.generators[s]
                if v not in seen:
                    e = CoxeterElement(v, depth + 1, w.word + (s,))
                    seen[v] = e
                    nxt.append(e)
                    if limit is not None and len(seen) > limit:
                        raise InfiniteParabolic(
                            f"closure exceeded the finite-type bound {limit}")
        depth += 1
        if nxt:
            hist.append(len(nxt))
            elements.extend(nxt)
        elif radius is not None and depth <= radius:
            hist.append(0)
        layer = nxt
    if radius is not None:
        hist = (hist + [0] * (radius + 1))[: radius + 1]
    return elements, hist, seen


def enumerate_ball(system, radius):
    """All elements of length <= radius, each once, with the length histogram.

    Breadth-first over right multiplication by generators in index order; the
    first word that reaches an element is its lex-first reduced word.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    elements, hist, seen = _bfs(system, range(system.rank), radius)
    return BallEnumeration(elements, hist, seen)


# ----------------------------------------------------------------------------
# finite parabolics

_EXCEPTIONAL_ORDERS = {"E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152, "G2": 12}


def classify_finite(matrix, subset=None):
    """Finite-type name and group order of the parabolic on ``subset``, or None if infinite.

    Works component by component on the Coxeter graph.
    """
    idx = list(range(len(matrix))) if subset is None else sorted(subset)
    if not idx:
        return "A0", 1
    comps = []
    left = set(idx)
    while left:
        stack = [left.pop()]
        comp = set(stack)
        while stack:
            v = stack.pop()
            for u in list(left):
                if matrix[v][u] != 2:
                    left.discard(u)
                    comp.add(u)
                    stack.append(u)
        comps.append(sorted(comp))
    names, order = [], 1
    for comp in comps:
        res = _classify_connected(matrix, comp)
        if res is None:
            return None
        names.append(res[0])
        order *= res[1]
    return "x".join(names), order


def _classify_connected(m, comp):
    n = len(comp)
    if n == 1:
        return "A1", 2
    edges = [(a, b, m[a][b]) for a, b in combinations(comp, 2) if m[a][b] != 2]
    if any(w == INF for _, _, w in edges) or len(edges) != n - 1:
        return None
    deg = {v: 0 for v in comp}
    for a, b, _ in edges:
        deg[a] += 1
        deg[b] += 1
    labels = [w for _, _, w in edges]
    if 6 in labels:
        return ("G2", 12) if n == 2 else None
    fours = [(a, b) for a, b, w in edges if w == 4]
    if len(fours) > 1 or max(deg.values()) > 3:
        return None
    if fours:
        if max(deg.values()) > 2:
            return None
        a, b = fours[0]
        if deg[a] == 1 or deg[b] == 1:
            return f"B{n}", 2**n * math.factorial(n)
        if n == 4:
            return "F4", 1152
        return None
    branch = [v for v in comp if deg[v] == 3]
    if not branch:
        return f"A{n}", math.factorial(n + 1)
    if len(branch) > 1:
        return None
    center = branch[0]
    adj = {v: set() for v in comp}
    for a, b, _ in edges:
        adj[a].add(b)
        adj[b].add(a)
    arms = []
    for start in adj[center]:
        length, prev, cur = 1, center, start
        while True:
            nxt = [x for x in adj[cur] if x != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[:2] == [1, 1]:
        return f"D{n}", 2 ** (n - 1) * math.factorial(n)
    name = {(1, 2, 2): "E6", (1, 2, 3): "E7", (1, 2, 4): "E8"}.get(tuple(arms))
    if name is None:
        return None
    return name, _EXCEPTIONAL_ORDERS[name]


def parabolic_enumerate(system, subset):
    """Every element of the finite standard parabolic W_I, with lengths taken in W."""
    idx = system.subset(subset)
    if system.affine and len(idx) == system.rank:
        raise InfiniteParabolic("the full affine Weyl group is infinite")
    info = classify_finite(system.matrix, idx)
    if info is None:
        raise InfiniteParabolic(f"parabolic {[system.labels[i] for i in idx]} is infinite")
    elements, _, _ = _bfs(system, idx, None, limit=info[1])
    if len(elements) != info[1]:
        raise InfiniteParabolic(
            f"closure has {len(elements)} elements, expected {info[1]} for type {info[0]}")
    return sorted(elements, key=lambda e: (e.length, e.word))


def coset_decompose(system, w, subset):
    """w = w^I * w_I with w^I minimal in its coset w W_I and l(w) = l(w^I) + l(w_I)."""
    idx = set(system.subset(subset))
    if system.affine and len(idx) == system.rank:
        raise InfiniteParabolic("the full affine Weyl group is infinite")
    if classify_finite(system.matrix, idx) is None:
        raise InfiniteParabolic("parabolic is infinite")
    if isinstance(w, CoxeterElement):
        w = w.map
    cur = w
    stripped = []
    while True:
        s = next((i for i in sorted(idx) if i in system.right_descents(cur)), None)
        if s is None:
            break
        cur = cur @ system.generators[s]
        stripped.append(s)
    w_min = length_and_word(system, cur)
    w_par = length_and_word(system, system.map_of_word(reversed(stripped)))
    return w_min, w_par


# ----------------------------------------------------------------------------
# Hecke representations

@dataclass(frozen=True)
class HeckeRepresentation:
    """Exact matrices for the generators e_s, extended multiplicatively along reduced words."""

    dim: int
    matrices: tuple  # object-dtype numpy arrays of Fraction
    name: str = "custom"

    @classmethod
    def trivial(cls, system):
        return cls.scalar(system, 1, name="trivial")

    @classmethod
    def scalar(cls, system, value, name=None):
        v = Fraction(value)
        mats = tuple(np.array([[v]], dtype=object) for _ in range(system.rank))
        return cls(1, mats, name or f"scalar({v})")

    @classmethod
    def from_matrices(cls, system, matrices, name="custom"):
        mats = tuple(np.array([[Fraction(x) for x in row] for row in m], dtype=object)
                     for m in matrices)
        if len(mats) != system.rank:
            raise InvalidRepresentation("one matrix per generator is required")
        dim = mats[0].shape[0]
        if any(m.shape != (dim, dim) for m in mats):
            raise InvalidRepresentation("generator matrices must be square of equal size")
        rep = cls(dim, mats, name)
        rep.check_braid(system)
        return rep

    def identity(self):
        return np.array([[Fraction(int(i == j)) for j in range(self.dim)]
                         for i in range(self.dim)], dtype=object)

    def of_word(self, word):
        m = self.identity()
        for s in word:
            m = m @ self.matrices[s]
        return m

    def of(self, element):
        return self.of_word(element.word)

    def check_braid(self, system):
        for i in range(system.rank):
            for j in range(i + 1, system.rank):
                m = system.matrix[i][j]
                if m == INF:
                    continue
                a = self.of_word([i, j] * (m // 2) + [i] * (m % 2))
                b = self.of_word([j, i] * (m // 2) + [j] * (m % 2))
                if not np.array_equal(a, b):
                    raise InvalidRepresentation(
                        f"braid relation between {system.labels[i]} and {system.labels[j]} fails")


def verify_length_additive(system, rep, radius):
    """Check pi(v) pi(w) = pi(vw) on every pair in the ball with l(vw) = l(v) + l(w)."""
    ball = enumerate_ball(system, radius)
    mats = {e.map: rep.of(e) for e in ball.elements}
    checked = failures = 0
    for v in ball.elements:
        for w in ball.elements:
            if v.length + w.length > radius:
                continue
            vw = ball.lookup.get(v.map @ w.map)
            if vw is None or vw.length != v.length + w.length:
                continue
            checked += 1
            if not np.array_equal(mats[v.map] @ mats[w.map], mats[vw.map]):
                failures += 1
    return {"checked": checked, "failures": failures}


# ----------------------------------------------------------------------------
# Poincare series

def _rep(system, rep):
    return HeckeRepresentation.trivial(system) if rep is None else rep


def _coefficients(system, elements, rep, n):
    zero = rep.identity() * 0
    coeffs = [zero.copy() for _ in range(n + 1)]
    for e in elements:
        if e.length <= n:
            coeffs[e.length] = coeffs[e.length] + rep.of(e)
    return coeffs


def _wrap(coeffs, dim):
    if dim == 1:
        return MultiPoly.from_coeffs([c[0, 0] for c in coeffs])
    return [[MultiPoly.from_coeffs([c[i, j] for c in coeffs]) for j in range(dim)]
            for i in range(dim)]


def _subset_elements(system, idx, n):
    if len(idx) == system.rank and system.affine:
        return enumerate_ball(system, n).elements
    if classify_finite(system.matrix, idx) is None:
        return _bfs(system, idx, n)[0]
    return parabolic_enumerate(system, idx)


def poincare_truncated(system, n, subset=None, rep=None, cosets=False):
    """sum of u^l(w) pi(w) over w of length <= n.

    ``subset=None`` sums over all of W; otherwise over W_I, or over the minimal
    coset representatives W^I when ``cosets`` is true.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    rep = _rep(system, rep)
    if subset is None:
        elements = enumerate_ball(system, n).elements
    else:
        idx = system.subset(subset)
        if cosets:
            elements = [e for e in enumerate_ball(system, n).elements
                        if not set(system.right_descents(e.map)) & set(idx)]
        else:
            elements = _subset_elements(system, idx, n)
    return _wrap(_coefficients(system, elements, rep, n), rep.dim)


def _parabolic_poly_matrix(system, idx, rep):
    elements = parabolic_enumerate(system, idx)
    top = max(e.length for e in elements)
    coeffs = _coefficients(system, elements, rep, top)
    return [[MultiPoly.from_coeffs([c[i, j] for c in coeffs]) for j in range(rep.dim)]
            for i in range(rep.dim)]


def proper_subsets(system):
    r = system.rank
    for k in range(r + 1):
        for idx in combinations(range(r), k):
            if k < r:
                yield idx


def poincare_rational(system, rep=None):
    """Closed form of the full Poincare series from the finite parabolics.

    From sum_{I subset S} (-1)^|I| P P_I^{-1} = 0 and P_S = P:
    P = (-1)^(|S|+1) * (sum_{I != S} (-1)^|I| P_I^{-1})^{-1}.
    Returns a RationalFunction for one-dimensional representations and a
    RationalMatrix otherwise.
    """
    rep = _rep(system, rep)
    if not system.affine:
        # finite W: the series is a polynomial
        elements = _bfs(system, range(system.rank), None,
                        limit=classify_finite(system.matrix)[1])[0]
        top = max(e.length for e in elements)
        coeffs = _coefficients(system, elements, rep, top)
        mat = RationalMatrix.from_polys(
            [[MultiPoly.from_coeffs([c[i, j] for c in coeffs]) for j in range(rep.dim)]
             for i in range(rep.dim)])
        return mat.as_scalar() if rep.dim == 1 else mat
    total = None
    for idx in proper_subsets(system):
        p_i = RationalMatrix.from_polys(_parabolic_poly_matrix(system, idx, rep))
        term = p_i.inverse()
        if len(idx) % 2:
            term = term.scale(-1)
        total = term if total is None else total + term
    total = total.reduced()
    if all(x.is_zero() for row in total.entries for x in row):
        raise SingularParabolicSum("alternating sum of parabolic inverses vanishes")
    sign = 1 if (system.rank + 1) % 2 == 0 else -1
    try:
        result = total.inverse().scale(sign).reduced()
    except DivisionByZeroPoly as exc:
        raise SingularParabolicSum("alternating sum of parabolic inverses is singular") from exc
    return result.as_scalar() if rep.dim == 1 else result


def alternating_coset_sum(system, n, rep=None):
    """Coefficient arrays of sum_{I subset S} (-1)^|I| P^I(u), truncated at degree n.

    Each W^I is enumerated separately from the ball, so the vanishing of the
    sum is checked rather than assumed.
    """
    rep = _rep(system, rep)
    ball = enumerate_ball(system, n)
    desc = [(e, set(system.right_descents(e.map))) for e in ball.elements]
    zero = rep.identity() * 0
    out = [zero.copy() for _ in range(n + 1)]
    for k in range(system.rank + 1):
        for idx in combinations(range(system.rank), k):
            for e, d in desc:
                if not d & set(idx):
                    out[e.length] = out[e.length] + rep.of(e) * (-1) ** k
    return out


def alternating_inverse_sum(system, n, rep=None):
    """Coefficient arrays of sum_{I subset S} (-1)^|I| P(u) P_I(u)^{-1}, truncated at degree n."""
    rep = _rep(system, rep)
    full = _coefficients(system, enumerate_ball(system, n).elements, rep, n)
    zero = rep.identity() * 0
    out = [zero.copy() for _ in range(n + 1)]
    r = system.rank
    for k in range(r + 1):
        for idx in combinations(range(r), k):
            if k == r and system.affine:
                part = full
            else:
                part = _coefficients(system, _subset_elements(system, idx, n), rep, n)
            inv = series_inverse(part, n)
            for t in range(n + 1):
                acc = zero.copy()
                for s in range(t + 1):
                    acc = acc + full[s] @ inv[t - s]
                out[t] = out[t] + acc * (-1) ** k
    return out


def series_is_zero(coeffs):
    return all(not any(x for x in c.flat) for c in coeffs)


def series_of(rational, n):
    """Truncated coefficients of a scalar RationalFunction as a list of Fractions."""
    s = series_expand(rational, n)
    return s.coeffs(n + 1)


__all__ = [
    "AffineMap", "CoxeterSystem", "CoxeterElement", "ParabolicSubset", "default_labels", "HeckeRepresentation", "RootData",
    "BallEnumeration", "build_system", "length_and_word", "enumerate_ball",
    "parabolic_enumerate", "coset_decompose", "poincare_truncated", "poincare_rational",
    "alternating_coset_sum", "alternating_inverse_sum", "verify_length_additive",
    "classify_finite", "root_data", "parse_type_tag", "series_is_zero", "series_of", "INF",
]
