"""Exact multivariate polynomials and rational functions over Q.

Polynomials are sparse maps from exponent tuples to :class:`fractions.Fraction`
coefficients. Rational functions keep a numerator/denominator pair; they are
reduced by content and by a few cheap syntactic rules, and fully reduced by a
gcd in the univariate case. Equality of rational functions is decided by
cross-multiplication, so correctness never depends on a canonical form.
"""

from fractions import Fraction
from itertools import product
from math import gcd, lcm

from .errors import DivisionByZeroPoly, MalformedDocument, NotExpandable


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c.strip())
    return Fraction(c)


def format_fraction(c):
    """Canonical string: ``"p"`` for integers, ``"p/q"`` with q > 0 otherwise."""
    c = _frac(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _exp_key(exp):
    return "(" + ",".join(str(e) for e in exp) + ")"


def _parse_exp_key(key):
    body = key.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise MalformedDocument(f"bad exponent key {key!r}")
    body = body[1:-1].strip()
    if not body:
        return ()
    return tuple(int(t) for t in body.split(",") if t.strip() != "")


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} has wrong arity for {nvars} variables")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent {exp}")
                c = _frac(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
                    if not clean[exp]:
                        del clean[exp]
        self.terms = clean

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, nvars, c=1):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def monomial(cls, exp, c=1):
        exp = tuple(exp)
        return cls(len(exp), {exp: c})

    @classmethod
    def var(cls, nvars, i):
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1})

    @classmethod
    def from_coeffs(cls, coeffs):
        """Univariate polynomial from a dense coefficient list (lowest degree first)."""
        return cls(1, {(i,): c for i, c in enumerate(coeffs)})

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.nvars, other)
        return NotImplemented

    # -- queries -------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coeff(self, exp):
        return self.terms.get(tuple(exp), Fraction(0))

    def coeffs(self, n=None):
        """Dense coefficient list of a univariate polynomial."""
        if self.nvars != 1:
            raise ValueError("coeffs() needs a univariate polynomial")
        top = self.degree() if n is None else n - 1
        return [self.terms.get((i,), Fraction(0)) for i in range(top + 1)]

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def __call__(self, *point):
        total = Fraction(0)
        for exp, c in self.terms.items():
            m = c
            for x, e in zip(point, exp):
                m *= _frac(x) ** e
            total += m
        return total

    def leading(self):
        """Lex-largest term as ``(exp, coeff)``."""
        exp = max(self.terms)
        return exp, self.terms[exp]

    def min_exponents(self):
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    # -- arithmetic ----------------------------------------------------------
    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.constant(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def truncate(self, n):
        """Drop all terms of total degree > n."""
        return MultiPoly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) <= n})

    def shift(self, exp):
        """Multiply by the monomial ``u**exp``."""
        return MultiPoly(self.nvars, {tuple(a + b for a, b in zip(e, exp)): c
                                      for e, c in self.terms.items()})

    def substitute_monomials(self, monomials):
        """Replace variable i by the monomial ``u**monomials[i]`` (all in a common ring)."""
        target = len(monomials[0])
        out = {}
        for exp, c in self.terms.items():
            e = [0] * target
            for k, mono in zip(exp, monomials):
                for j in range(target):
                    e[j] += k * mono[j]
            e = tuple(e)
            out[e] = out.get(e, 0) + c
        return MultiPoly(target, out)

    def inverse(self):
        """Inverse in the polynomial ring; only nonzero constants are units."""
        if self.is_zero() or not self.is_constant():
            raise DivisionByZeroPoly(f"{self} is not a unit in Q[u]")
        return MultiPoly.constant(self.nvars, 1 / self.constant_term())

    def divmod(self, other):
        """Multivariate division by a single polynomial in lex order."""
        if other.is_zero():
            raise DivisionByZeroPoly("division by the zero polynomial")
        lead_e, lead_c = other.leading()
        quot = {}
        rem = {}
        work = dict(self.terms)
        while work:
            e = max(work)
            c = work.pop(e)
            if all(a >= b for a, b in zip(e, lead_e)):
                qe = tuple(a - b for a, b in zip(e, lead_e))
                qc = c / lead_c
                quot[qe] = quot.get(qe, 0) + qc
                for oe, oc in other.terms.items():
                    if oe == lead_e:
                        continue
                    te = tuple(a + b for a, b in zip(qe, oe))
                    work[te] = work.get(te, 0) - qc * oc
                    if not work[te]:
                        del work[te]
            else:
                rem[e] = c
        return MultiPoly(self.nvars, quot), MultiPoly(self.nvars, rem)

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divides(self, other):
        """True when ``self`` divides ``other`` exactly."""
        if self.is_zero():
            return other.is_zero()
        return other.divmod(self)[1].is_zero()

    def content(self):
        """Positive rational c such that self / c has coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def derivative(self, i=0):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly(self.nvars, out)

    # -- io ------------------------------------------------------------------
    def to_json(self):
        return {_exp_key(e): format_fraction(c) for e, c in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, data, nvars=None):
        terms = {_parse_exp_key(k): _frac(v) for k, v in data.items()}
        if nvars is None:
            arities = {len(e) for e in terms}
            if len(arities) > 1:
                raise MalformedDocument("inconsistent exponent arity")
            nvars = arities.pop() if arities else 1
        return cls(nvars, terms)

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.to_json()})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = ["u"] if self.nvars == 1 else [f"u{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(format_fraction(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_fraction(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_gcd_univariate(a, b):
    """Monic gcd of two univariate polynomials (Euclid over Q)."""
    if a.nvars != 1 or b.nvars != 1:
        raise ValueError("univariate gcd only")
    a = a.coeffs() if a else []
    b = b.coeffs() if b else []

    def strip(p):
        while p and not p[-1]:
            p.pop()
        return p

    a, b = strip(list(a)), strip(list(b))
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            f = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[i + shift] -= f * c
            r = strip(r)
        a, b = b, r
    if not a:
        return MultiPoly.zero(1)
    lead = a[-1]
    return MultiPoly.from_coeffs([c / lead for c in a])


class RationalFunction:
    """Quotient ``num / den`` of two MultiPolys in the same variables."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        if isinstance(num, (int, Fraction)):
            nv = den.nvars if isinstance(den, MultiPoly) else 1
            num = MultiPoly.constant(nv, num)
        if den is None:
            den = MultiPoly.constant(num.nvars)
        elif isinstance(den, (int, Fraction)):
            den = MultiPoly.constant(num.nvars, den)
        if num.nvars != den.nvars:
            raise ValueError("numerator and denominator live in different rings")
        if den.is_zero():
            raise DivisionByZeroPoly("rational function with zero denominator")
        self.num = num
        self.den = den
        if reduce:
            self._reduce()

    @property
    def nvars(self):
        return self.num.nvars

    def _reduce(self):
        num, den = self.num, self.den
        if num.is_zero():
            self.num = num
            self.den = MultiPoly.constant(den.nvars)
            return
        # common monomial factor
        m = tuple(min(a, b) for a, b in zip(num.min_exponents(), den.min_exponents()))
        if any(m):
            neg = tuple(-x for x in m)
            num, den = num.shift(neg), den.shift(neg)
        if num.nvars == 1:
            g = poly_gcd_univariate(num, den)
            if g.degree() > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        elif den.divides(num):
            num, den = num.exact_div(den), MultiPoly.constant(den.nvars)
        # scale: denominator constant term 1 when invertible at 0, else content 1
        c0 = den.constant_term()
        if c0:
            scale = c0
        else:
            scale = den.content() * (1 if den.leading()[1] > 0 else -1)
        self.num = num * (1 / scale)
        self.den = den * (1 / scale)

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, MultiPoly):
            return RationalFunction(other, reduce=False)
        if isinstance(other, (int, Fraction)):
            return RationalFunction(MultiPoly.constant(self.nvars, other), reduce=False)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise DivisionByZeroPoly("inverse of the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.num * other.den == other.num * self.den

    def __hash__(self):  # equality is by cross-multiplication
        raise TypeError("RationalFunction is unhashable")

    def series(self, n):
        return series_expand(self, n)

    def to_json(self, names=None):
        if names is None:
            names = ["u"] if self.nvars == 1 else [f"u{i + 1}" for i in range(self.nvars)]
        return {"vars": list(names), "num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data):
        nvars = len(data.get("vars", [])) or None
        num = MultiPoly.from_json(data["num"], nvars)
        den = MultiPoly.from_json(data["den"], num.nvars)
        return cls(num, den)

    def __repr__(self):
        return f"RationalFunction(({self.num}) / ({self.den}))"


def _monomials_upto(nvars, n):
    """All exponent tuples of total degree <= n, graded then lex."""
    out = []
    for total in range(n + 1):
        for exp in product(range(total + 1), repeat=nvars):
            if sum(exp) == total:
                out.append(exp)
    return out


def series_expand(f, n):
    """Power series of ``f`` truncated at total degree ``n``."""
    if isinstance(f, MultiPoly):
        return f.truncate(n)
    den0 = f.den.constant_term()
    if not den0:
        raise NotExpandable("denominator vanishes at the origin", den=f.den.to_json())
    nv = f.nvars
    inv0 = 1 / den0
    den_terms = [(e, c) for e, c in f.den.terms.items() if any(e)]
    coeff = {}
    if nv == 1:
        # dense recursion is much faster in one variable
        dc = f.den.coeffs()
        nc = f.num.coeffs(n + 1) if f.num else [Fraction(0)] * (n + 1)
        nc = (nc + [Fraction(0)] * (n + 1))[: n + 1]
        out = []
        for t in range(n + 1):
            acc = nc[t]
            for s in range(1, min(t, len(dc) - 1) + 1):
                if dc[s]:
                    acc -= dc[s] * out[t - s]
            out.append(acc * inv0)
        return MultiPoly.from_coeffs(out)
    for exp in _monomials_upto(nv, n):
        acc = f.num.coeff(exp)
        for de, dcoef in den_terms:
            if all(a >= b for a, b in zip(exp, de)):
                prev = coeff.get(tuple(a - b for a, b in zip(exp, de)))
                if prev:
                    acc -= dcoef * prev
        if acc:
            coeff[exp] = acc * inv0
    return MultiPoly(nv, coeff)


def series_inverse(coeffs, n):
    """Inverse of a univariate power series with invertible constant term, to degree n.

    ``coeffs`` may hold scalars or square object-dtype numpy matrices.
    """
    import numpy as np

    c0 = coeffs[0]
    matrix = isinstance(c0, np.ndarray)
    if matrix:
        inv0 = matrix_inverse_exact(c0)
    else:
        if not c0:
            raise NotExpandable("constant term is zero")
        inv0 = 1 / _frac(c0)
    out = [inv0]
    for t in range(1, n + 1):
        acc = None
        for s in range(1, min(t, len(coeffs) - 1) + 1):
            term = coeffs[s] @ out[t - s] if matrix else coeffs[s] * out[t - s]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = c0 * 0
        out.append(-(inv0 @ acc) if matrix else -(inv0 * acc))
    return out


def matrix_inverse_exact(m):
    """Gauss-Jordan inverse of a square matrix of Fractions (object dtype)."""
    import numpy as np

    n = m.shape[0]
    a = [[_frac(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m.tolist())]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return np.array([row[n:] for row in a], dtype=object)


# ----------------------------------------------------------------------------
# polynomial matrices

def _as_poly(x, nvars):
    if isinstance(x, MultiPoly):
        return x
    return MultiPoly.constant(nvars, x)


def det_poly_matrix(m):
    """Determinant of a square matrix of MultiPolys by Bareiss elimination.

    Every division in the recurrence is exact over the polynomial ring.
    """
    n = len(m)
    if n == 0:
        return MultiPoly.constant(1)
    nvars = next((x.nvars for row in m for x in row if isinstance(x, MultiPoly)), 1)
    a = [[_as_poly(x, nvars) for x in row] for row in m]
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    sign = 1
    prev = MultiPoly.constant(nvars)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return MultiPoly.zero(nvars)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def det_cofactor(m):
    """Laplace expansion; exponential, used only as a test oracle on tiny matrices."""
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_cofactor(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def adjugate_poly_matrix(m):
    """Adjugate of a square MultiPoly matrix via cofactor determinants."""
    n = len(m)
    nvars = next((x.nvars for row in m for x in row if isinstance(x, MultiPoly)), 1)
    if n == 1:
        return [[MultiPoly.constant(nvars)]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            d = det_poly_matrix(minor)
            adj[j][i] = d if (i + j) % 2 == 0 else -d
    return adj


class RationalMatrix:
    """Square matrix of rational functions held as ``entries / den`` with one scalar denominator."""

    __slots__ = ("entries", "den")

    def __init__(self, entries, den):
        self.entries = entries
        self.den = den

    @property
    def size(self):
        return len(self.entries)

    @classmethod
    def from_polys(cls, entries):
        nvars = entries[0][0].nvars
        return cls(entries, MultiPoly.constant(nvars))

    def __add__(self, other):
        n = self.size
        if self.den == other.den:
            return RationalMatrix([[self.entries[i][j] + other.entries[i][j] for j in range(n)]
                                   for i in range(n)], self.den)
        if self.den.nvars == 1:
            g = poly_gcd_univariate(self.den, other.den)
            fa, fb = other.den.exact_div(g), self.den.exact_div(g)
            den = self.den * fa
        else:
            fa, fb, den = other.den, self.den, self.den * other.den
        return RationalMatrix([[self.entries[i][j] * fa + other.entries[i][j] * fb
                                for j in range(n)] for i in range(n)], den)

    def scale(self, c):
        return RationalMatrix([[x * c for x in row] for row in self.entries], self.den)

    def inverse(self):
        """``(N / d)^-1 = d * adj(N) / det(N)``."""
        det = det_poly_matrix(self.entries)
        if det.is_zero():
            raise DivisionByZeroPoly("singular rational matrix")
        adj = adjugate_poly_matrix(self.entries)
        return RationalMatrix([[x * self.den for x in row] for row in adj], det).reduced()

    def reduced(self):
        """Cancel a common univariate factor between all entries and the denominator."""
        if self.den.nvars != 1:
            return self
        g = self.den
        for row in self.entries:
            for x in row:
                g = poly_gcd_univariate(g, x) if x else g
                if g.degree() == 0:
                    break
        entries, den = self.entries, self.den
        if g.degree() > 0:
            entries = [[x.exact_div(g) for x in row] for row in entries]
            den = den.exact_div(g)
        c0 = den.constant_term()
        if c0 and c0 != 1:
            entries = [[x * (1 / c0) for x in row] for row in entries]
            den = den * (1 / c0)
        return RationalMatrix(entries, den)

    def entry(self, i, j):
        return RationalFunction(self.entries[i][j], self.den)

    def as_scalar(self):
        if self.size != 1:
            raise ValueError("not a 1x1 matrix")
        return self.entry(0, 0)

    def series(self, n):
        """Matrix of truncated power series, one MultiPoly per entry."""
        return [[series_expand(self.entry(i, j), n) for j in range(self.size)]
                for i in range(self.size)]

    def to_json(self):
        return {"den": self.den.to_json(),
                "num": [[x.to_json() for x in row] for row in self.entries]}
