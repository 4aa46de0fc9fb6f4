"""Lattice points of a sharp rational open cone.

For a lattice ``Sigma`` in Q^r and r independent rational functionals
alpha_1..alpha_r, the points of ``Sigma`` with every alpha_j > 0 are exactly
``e + sum nu_j a_j`` with ``e`` in a finite residue set ``E`` and ``nu`` in
N_0^r, uniquely. ``a_j`` is the lattice vector on the j-th edge ray of the
closed cone with the smallest positive alpha_j.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil

from . import lattice as L
from .errors import DegenerateCone, NotInCone, NotInLattice


def _vec(v):
    return tuple(Fraction(x) for x in v)


def _out(v):
    """Integers stay ints in output, everything else stays Fraction."""
    return tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in v)


@dataclass(frozen=True)
class RationalLattice:
    basis: tuple  # rows are basis vectors in ambient coordinates

    def __post_init__(self):
        b = tuple(_vec(row) for row in self.basis)
        object.__setattr__(self, "basis", b)
        if not b or any(len(row) != len(b) for row in b):
            raise DegenerateCone("lattice basis must be a square matrix")
        if L.determinant(b) == 0:
            raise DegenerateCone("lattice basis is singular")

    @classmethod
    def standard(cls, r):
        return cls(tuple(tuple(int(i == j) for j in range(r)) for i in range(r)))

    @property
    def rank(self):
        return len(self.basis)

    def coordinates(self, v):
        """Coordinates of ``v`` in the basis; raises NotInLattice if not integral."""
        inv = _inverse_cache(self.basis)
        c = L.vec_mat(list(_vec(v)), inv)
        if any(x.denominator != 1 for x in c):
            raise NotInLattice(f"{list(map(str, v))} is not in the lattice")
        return tuple(int(x) for x in c)

    def point(self, coords):
        return tuple(L.vec_mat(list(coords), self.basis))


_INV = {}


def _inverse_cache(basis):
    if basis not in _INV:
        _INV[basis] = L.inverse(basis)
    return _INV[basis]


@dataclass(frozen=True)
class SharpCone:
    functionals: tuple  # rows alpha_j, acting on ambient coordinates

    def __post_init__(self):
        f = tuple(_vec(row) for row in self.functionals)
        object.__setattr__(self, "functionals", f)
        if not f or any(len(row) != len(f) for row in f) or L.determinant(f) == 0:
            raise DegenerateCone("cone functionals are not linearly independent",
                                 functionals=[[str(x) for x in row] for row in f])

    @classmethod
    def standard(cls, r):
        return cls(tuple(tuple(int(i == j) for j in range(r)) for i in range(r)))

    def values(self, v):
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.functionals)

    def contains(self, v):
        return all(x > 0 for x in self.values(v))


@dataclass(frozen=True)
class ConeDecomposition:
    lattice: RationalLattice
    cone: SharpCone
    axes: tuple
    residues: tuple
    index: int
    _lookup: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", {tuple(e): i for i, e in enumerate(self.residues)})

    @property
    def rank(self):
        return self.lattice.rank

    def normalized(self, v):
        """beta_j(v) = alpha_j(v) / alpha_j(a_j)."""
        vals = self.cone.values(v)
        return tuple(x / self.cone.values(a)[j] for j, (x, a) in enumerate(zip(vals, self.axes)))

    def recompose(self, e, nu):
        v = list(_vec(e))
        for n, a in zip(nu, self.axes):
            v = [x + n * y for x, y in zip(v, a)]
        return tuple(v)

    def with_residues(self, residues):
        """Same axes, different residue set (used for negative controls)."""
        return ConeDecomposition(self.lattice, self.cone, self.axes,
                                 tuple(_vec(e) for e in residues), self.index)

    def to_json(self):
        def enc(v):
            return [int(x) if x.denominator == 1 else str(x) for x in v]
        return {"axes": [enc(a) for a in self.axes], "E": [enc(e) for e in self.residues],
                "index": self.index}


def axis_generators(lat, cone):
    """Primitive lattice vector on each edge ray of the closed cone.

    a_j spans the rank-1 kernel of the other functionals; restricted to lattice
    coordinates that kernel meets Z^r in Z*a, and the sign makes alpha_j(a_j) > 0.
    """
    r = lat.rank
    if len(cone.functionals) != r:
        raise DegenerateCone("need exactly one functional per lattice dimension")
    # functional values on the basis vectors: F[i][j] = alpha_j(b_i)
    f = [[sum(a * x for a, x in zip(alpha, b)) for alpha in cone.functionals] for b in lat.basis]
    axes = []
    for j in range(r):
        others = [[f[i][k] for i in range(r)] for k in range(r) if k != j]
        if others:
            ker = L.nullspace(others)
            if len(ker) != 1:
                raise DegenerateCone("functionals are dependent")
            c = L.primitive_integer(ker[0])
        else:
            c = [1]
        v = lat.point(c)
        val = cone.values(v)[j]
        if val == 0:
            raise DegenerateCone("functionals are dependent")
        if val < 0:
            v = tuple(-x for x in v)
        axes.append(tuple(v))
    return axes


def residue_set(lat, cone, axes=None):
    """Decomposition with one residue per coset of span(axes) in the lattice.

    Each residue is the coset member with every beta_j in (0, 1].
    """
    if axes is None:
        axes = axis_generators(lat, cone)
    axes = tuple(_vec(a) for a in axes)
    sub = [list(lat.coordinates(a)) for a in axes]
    reps, diag = L.coset_representatives(sub)
    index = 1
    for d in diag:
        index *= d
    scale = [cone.values(a)[j] for j, a in enumerate(axes)]
    residues = []
    for c in reps:
        v = lat.point(c)
        beta = [x / s for x, s in zip(cone.values(v), scale)]
        for j, b in enumerate(beta):
            shift = ceil(b) - 1
            if shift:
                v = [x - shift * y for x, y in zip(v, axes[j])]
        residues.append(tuple(v))
    residues.sort()
    return ConeDecomposition(lat, cone, axes, tuple(residues), index)


def decompose(lat, cone):
    return residue_set(lat, cone, axis_generators(lat, cone))


def decompose_point(dec, v):
    """Unique (e, nu) with v = e + sum nu_j a_j."""
    v = _vec(v)
    dec.lattice.coordinates(v)
    vals = dec.cone.values(v)
    if any(x <= 0 for x in vals):
        raise NotInCone(f"point {[str(x) for x in v]} is not in the open cone",
                        values=[str(x) for x in vals])
    nu = tuple(ceil(b) - 1 for b in dec.normalized(v))
    e = list(v)
    for n, a in zip(nu, dec.axes):
        e = [x - n * y for x, y in zip(e, a)]
    e = tuple(e)
    if e not in dec._lookup:
        raise NotInCone(f"no residue covers {[str(x) for x in v]}", residue=[str(x) for x in e])
    return e, nu


@dataclass
class BijectionReport:
    radius: int
    box_points: int
    cone_points: int
    image_points: int
    failures: int
    first_failure: tuple = None
    reason: str = ""

    @property
    def ok(self):
        return self.failures == 0

    def to_json(self):
        return {"radius": self.radius, "box_points": self.box_points,
                "cone_points": self.cone_points, "image_points": self.image_points,
                "failures": self.failures, "verified": self.ok,
                "first_failure": None if self.first_failure is None
                else [int(x) if Fraction(x).denominator == 1 else str(x) for x in self.first_failure],
                "reason": self.reason}


def verify_bijection(dec, box_radius):
    """Exhaustive check of the decomposition on lattice coordinates in [-B, B]^r.

    Two independent routes: every box point is decomposed (and recomposed),
    and separately the forward map E x N_0^r is enumerated far enough to cover
    the box; the forward image must be injective and equal to the cone points.
    Failures are counted; the lexicographically smallest failing point is kept.
    """
    if box_radius < 1:
        raise ValueError("box_radius must be >= 1")
    lat = dec.lattice
    r = lat.rank
    box = {}
    for c in product(range(-box_radius, box_radius + 1), repeat=r):
        box[c] = lat.point(c)
    cone_pts = {c for c, v in box.items() if dec.cone.contains(v)}
    bad = []

    for c in sorted(box):
        v = box[c]
        inside = c in cone_pts
        try:
            e, nu = decompose_point(dec, v)
            ok = inside and dec.recompose(e, nu) == v and all(n >= 0 for n in nu)
            why = "" if ok else "decomposition of a point outside the cone or bad round trip"
        except NotInCone:
            ok = not inside
            why = "" if ok else "cone point not covered"
        if not ok:
            bad.append((v, why))

    # forward route: nu_j never exceeds max beta_j over the box
    limits = []
    for j in range(r):
        top = max((dec.normalized(box[c])[j] for c in cone_pts), default=Fraction(0))
        limits.append(max(0, ceil(top)))
    image = {}
    for e in dec.residues:
        if not dec.cone.contains(e):
            bad.append((e, "residue outside the cone"))
        for j, a in enumerate(dec.axes):
            if dec.cone.contains(tuple(x - y for x, y in zip(e, a))):
                bad.append((e, f"residue minus axis {j} still inside the cone"))
        for nu in product(*(range(m + 1) for m in limits)):
            v = dec.recompose(e, nu)
            try:
                c = lat.coordinates(v)
            except NotInLattice:
                bad.append((v, "forward image left the lattice"))
                continue
            if max(abs(x) for x in c) > box_radius:
                continue
            if c in image:
                bad.append((v, "forward map is not injective"))
            image[c] = v
    for c in sorted(cone_pts - set(image)):
        bad.append((box[c], "cone point missing from forward image"))
    for c in sorted(set(image) - cone_pts):
        bad.append((box[c], "forward image point outside the cone"))

    first = min(bad, key=lambda t: t[0]) if bad else None
    return BijectionReport(box_radius, len(box), len(cone_pts), len(image), len(bad),
                           None if first is None else _out(first[0]),
                           "" if first is None else first[1])
