from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, strategies as st

from bldgzeta.cones import (RationalLattice, SharpCone, axis_generators, decompose,
                            decompose_point, verify_bijection)
from bldgzeta.errors import DegenerateCone, NotInCone, NotInLattice


def rows2(lo=-3, hi=3):
    return st.lists(st.lists(st.integers(lo, hi), min_size=2, max_size=2), min_size=2, max_size=2) \
        .filter(lambda m: sympy.Matrix(m).det() != 0)


def parallelepiped_count(dec, reach=12):
    """Lattice points with every beta_j in (0, 1], found by scanning lattice coordinates."""
    n = 0
    r = dec.rank
    for c in product(range(-reach, reach + 1), repeat=r):
        v = dec.lattice.point(c)
        if not dec.cone.contains(v):
            continue
        if all(b <= 1 for b in dec.normalized(v)):
            n += 1
    return n


def test_standard_cone():
    dec = decompose(RationalLattice.standard(2), SharpCone.standard(2))
    assert dec.to_json() == {"axes": [[1, 0], [0, 1]], "E": [[1, 1]], "index": 1}
    assert verify_bijection(dec, 8).ok


def test_skew_cone():
    dec = decompose(RationalLattice.standard(2), SharpCone([[1, 0], [1, 2]]))
    assert dec.to_json()["E"] == [[1, 0], [2, 0]]
    assert dec.index == 2
    assert verify_bijection(dec, 10).ok


@given(rows2(), rows2(-2, 2))
def test_random_cones(alphas, basis):
    dec = decompose(RationalLattice(basis), SharpCone(alphas))
    assert len(dec.residues) == dec.index
    coords = [dec.lattice.coordinates(a) for a in dec.axes]
    assert dec.index == abs(sympy.Matrix(coords).det())
    assert verify_bijection(dec, 4).ok


@given(rows2(-2, 2))
def test_residue_count_matches_parallelepiped(alphas):
    dec = decompose(RationalLattice.standard(2), SharpCone(alphas))
    assert parallelepiped_count(dec) == dec.index


@given(rows2(), st.tuples(st.integers(-30, 30), st.integers(-30, 30)))
def test_decompose_point_round_trip(alphas, v):
    dec = decompose(RationalLattice.standard(2), SharpCone(alphas))
    if not dec.cone.contains(v):
        with pytest.raises(NotInCone):
            decompose_point(dec, v)
        return
    e, nu = decompose_point(dec, v)
    assert e in dec.residues
    assert all(n >= 0 for n in nu)
    assert dec.recompose(e, nu) == tuple(Fraction(x) for x in v)


def test_three_dimensional_cone():
    lat = RationalLattice([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    dec = decompose(lat, SharpCone([[1, 0, 0], [1, 2, 0], [0, 1, 3]]))
    assert len(dec.residues) == dec.index >= 3
    assert verify_bijection(dec, 3).ok


def test_corrupted_residues_detected():
    dec = decompose(RationalLattice.standard(2), SharpCone([[1, 0], [1, 2]]))
    missing = dec.with_residues(dec.residues[:1])
    assert not verify_bijection(missing, 6).ok
    shifted = dec.with_residues([dec.residues[0], tuple(x + y for x, y in zip(dec.residues[1],
                                                                              dec.axes[0]))])
    assert not verify_bijection(shifted, 6).ok


def test_errors():
    with pytest.raises(DegenerateCone):
        SharpCone([[1, 2], [2, 4]])
    with pytest.raises(DegenerateCone):
        RationalLattice([[1, 1], [1, 1]])
    lat = RationalLattice([[2, 0], [0, 2]])
    with pytest.raises(NotInLattice):
        lat.coordinates((1, 0))
    dec = decompose(lat, SharpCone.standard(2))
    with pytest.raises(NotInLattice):
        decompose_point(dec, (1, 1))
    assert axis_generators(lat, SharpCone.standard(2)) == [(2, 0), (0, 2)]


def test_rational_lattice():
    lat = RationalLattice([[Fraction(1, 2), 0], [0, 1]])
    dec = decompose(lat, SharpCone([[1, 0], [1, 1]]))
    assert verify_bijection(dec, 6).ok
