"""Exact integer and rational linear algebra on small matrices.

Matrices are lists of rows. Integer routines return plain ``int`` entries,
rational routines return :class:`~fractions.Fraction` entries.
"""

from fractions import Fraction
from itertools import product
from math import gcd, lcm


def to_fractions(m):
    return [[Fraction(x) for x in row] for row in m]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def vec_mat(v, m):
    """Row vector times matrix."""
    return [sum(v[k] * m[k][j] for k in range(len(v))) for j in range(len(m[0]))]


def transpose(m):
    return [list(col) for col in zip(*m)]


def rank(m):
    return len(_rref(to_fractions(m))[1])


def _rref(a):
    a = [row[:] for row in a]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def determinant(m):
    a = to_fractions(m)
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def inverse(m):
    n = len(m)
    a = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(to_fractions(m))]
    red, pivots = _rref(a)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def nullspace(m):
    """Basis of the right kernel {x : m x = 0} over Q."""
    a = to_fractions(m)
    cols = len(a[0])
    red, pivots = _rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for r, p in enumerate(pivots):
            x[p] = -red[r][f]
        basis.append(x)
    return basis


def primitive_integer(v):
    """Scale a rational vector to the primitive integer vector on the same ray."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive scaling")
    return [x // g for x in ints]


def _xgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def hermite_normal_form(m):
    """Row-style HNF of a full-column-rank integer matrix.

    Returns the nonzero rows H (upper triangular, positive pivots, entries above
    each pivot reduced into [0, pivot)) spanning the same row lattice.
    """
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for c in range(cols):
        # gcd-combine every row below r into row r at column c
        for i in range(r + 1, rows):
            if a[i][c]:
                g, s, t = _xgcd(a[r][c], a[i][c])
                x, y = a[r][c] // g, a[i][c] // g
                ra, rb = a[r], a[i]
                a[r] = [s * p + t * q for p, q in zip(ra, rb)]
                a[i] = [-y * p + x * q for p, q in zip(ra, rb)]
        if r < rows and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                f = a[i][c] // a[r][c]
                if f:
                    a[i] = [p - f * q for p, q in zip(a[i], a[r])]
            r += 1
        if r == rows:
            break
    return [row for row in a if any(row)]


def reduce_mod_lattice(v, hnf):
    """Canonical representative of ``v`` modulo the row lattice of a square HNF."""
    v = [int(x) for x in v]
    for row in hnf:
        c = next(j for j, x in enumerate(row) if x)
        f = v[c] // row[c]
        if f:
            v = [p - f * q for p, q in zip(v, row)]
    return tuple(v)


def smith_normal_form(m):
    """Return (U, D, V) with U * m * V = D diagonal, U and V unimodular.

    Diagonal entries are nonnegative and each divides the next.
    """
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        done = False
        while not done:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
                        break
            if not done:
                continue
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
                        break
            if not done:
                continue
            # divisibility: fold any entry not divisible by the pivot into row t
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % p), None)
            if bad is not None:
                i, _ = bad
                a[t] = [x + y for x, y in zip(a[t], a[i])]
                u[t] = [x + y for x, y in zip(u[t], u[i])]
                done = False
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, a, v


def coset_representatives(sublattice):
    """Representatives of Z^r / (row lattice of ``sublattice``), an r x r full-rank integer matrix.

    Enumerated in Smith-normal-form coordinates; the result is deterministic.
    """
    u, d, v = smith_normal_form(sublattice)
    r = len(d)
    diag = [d[i][i] for i in range(r)]
    if any(x == 0 for x in diag):
        raise ValueError("sublattice does not have full rank")
    vinv = inverse(v)
    reps = []
    for z in product(*(range(x) for x in diag)):
        c = vec_mat(list(z), vinv)
        reps.append(tuple(int(x) for x in c))
    return reps, diag
