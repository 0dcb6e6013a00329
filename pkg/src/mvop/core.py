"""Exact rational substrate: scalars, polynomials, matrices, matrix polynomials.

Everything here works over :class:`fractions.Fraction`.  Values are immutable;
arithmetic never rounds.  The vec convention is row-major stacking, so that::

    vec(M @ P) == kron(M, I) @ vec(P)
    vec(P @ L) == kron(I, L.T) @ vec(P)
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Q = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


class NoSolution(ArithmeticError):
    """Raised by :func:`solve_exact` for an inconsistent system."""


class SingularMatrix(ArithmeticError):
    pass


_RATIONAL = re.compile(r"[+-]?\d+(/[+-]?\d+)?")


def as_q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer string. Decimal notation is rejected."""
    s = text.strip()
    if not _RATIONAL.fullmatch(s):
        raise ValueError(f"not an exact rational: {text!r}")
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def fmt_q(x: Fraction) -> str:
    x = as_q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def pochhammer(a, n: int) -> Fraction:
    """Shifted factorial (a)_n; zero for every negative n."""
    a = as_q(a)
    if n < 0:
        return ZERO
    out = ONE
    for i in range(n):
        out *= a + i
    return out


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def falling(m: int, j: int) -> int:
    """m (m-1) ... (m-j+1), i.e. the factor produced by d^j/dt^j on t^m."""
    out = 1
    for i in range(j):
        out *= m - i
    return out


# ---------------------------------------------------------------------------
# univariate polynomials


class Poly:
    """Polynomial with ascending Fraction coefficients and no trailing zeros."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [as_q(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, a) -> "Poly":
        return cls((a,))

    @classmethod
    def monomial(cls, deg: int, a=1) -> "Poly":
        return cls([0] * deg + [a])

    @property
    def degree(self) -> int:
        return len(self.c) - 1  # zero polynomial has degree -1

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, i: int) -> Fraction:
        return self.c[i] if 0 <= i < len(self.c) else ZERO

    def lead(self) -> Fraction:
        return self.c[-1] if self.c else ZERO

    def __call__(self, x) -> Fraction:
        x = as_q(x)
        acc = ZERO
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def _coerce(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other) -> "Poly":
        o = self._coerce(other)
        n = max(len(self.c), len(o.c))
        return Poly(self.coeff(i) + o.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-a for a in self.c)

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            a = as_q(other)
            return Poly(x * a for x in self.c)
        if not self.c or not other.c:
            return Poly()
        out = [ZERO] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.c == other.c

    def __hash__(self) -> int:
        return hash(self.c)

    def deriv(self, k: int = 1) -> "Poly":
        return Poly(falling(i, k) * a for i, a in enumerate(self.c) if i >= k)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = max(len(r) - len(other.c) + 1, 0)
        q = [ZERO] * dq
        lc = other.c[-1]
        for i in range(dq - 1, -1, -1):
            f = r[i + len(other.c) - 1] / lc
            q[i] = f
            if f:
                for j, b in enumerate(other.c):
                    r[i + j] -= f * b
        return Poly(q), Poly(r[: len(other.c) - 1])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        return self * (1 / self.lead()) if self.c else self

    def __repr__(self) -> str:
        if not self.c:
            return "Poly(0)"
        return "Poly(" + ", ".join(fmt_q(a) for a in self.c) + ")"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


T = Poly((0, 1))  # the variable


# ---------------------------------------------------------------------------
# dense matrices


class Matrix:
    """Dense rows x cols matrix of Fractions."""

    __slots__ = ("rows", "shape")

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(as_q(x) for x in r) for r in rows)
        ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")
        self.shape = (len(self.rows), ncols)

    @classmethod
    def _raw(cls, rows) -> "Matrix":
        m = object.__new__(cls)
        m.rows = tuple(tuple(r) for r in rows)
        m.shape = (len(m.rows), len(m.rows[0]) if m.rows else 0)
        return m

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "Matrix":
        m = n if m is None else m
        return cls._raw([[ZERO] * m for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "Matrix":
        """Matrix unit E_ij (0-based)."""
        return cls._raw([[ONE if (r, c) == (i, j) else ZERO for c in range(n)] for r in range(n)])

    @classmethod
    def column(cls, entries: Sequence) -> "Matrix":
        return cls([[x] for x in entries])

    @property
    def n(self) -> int:
        return self.shape[0]

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix._raw([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix._raw([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return Matrix._raw([[-a for a in r] for r in self.rows])

    def scale(self, a) -> "Matrix":
        a = as_q(a)
        return Matrix._raw([[a * x for x in r] for r in self.rows])

    def __mul__(self, a) -> "Matrix":
        if isinstance(a, Matrix):
            return self @ a
        return self.scale(a)

    __rmul__ = scale

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum((a * c[k] for k, a in nz), ZERO) for c in cols])
        return Matrix._raw(out)

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(list(zip(*self.rows))) if self.rows else self

    def shift(self, a) -> "Matrix":
        """self + a*I."""
        a = as_q(a)
        return Matrix._raw([[x + a if i == j else x for j, x in enumerate(r)] for i, r in enumerate(self.rows)])

    def diagonal(self) -> list[Fraction]:
        return [self.rows[i][i] for i in range(min(self.shape))]

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def is_upper_triangular(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i > j)

    def is_symmetric(self) -> bool:
        return self == self.T

    def max_abs(self) -> Fraction:
        return max((abs(x) for r in self.rows for x in r), default=ZERO)

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("det of non-square matrix")
        a = [list(r) for r in self.rows]
        n = len(a)
        sign = 1
        out = ONE
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                return ZERO
            if p != c:
                a[p], a[c] = a[c], a[p]
                sign = -sign
            piv = a[c][c]
            out *= piv
            for i in range(c + 1, n):
                f = a[i][c] / piv
                if f:
                    ri, rc = a[i], a[c]
                    for j in range(c, n):
                        ri[j] -= f * rc[j]
        return out * sign

    def inverse(self) -> "Matrix":
        n = self.shape[0]
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        a = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                raise SingularMatrix("matrix is singular")
            a[p], a[c] = a[c], a[p]
            piv = a[c][c]
            a[c] = [x / piv for x in a[c]]
            for i in range(n):
                if i != c and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return Matrix._raw([r[n:] for r in a])

    def __repr__(self) -> str:
        return "Matrix([" + ", ".join("[" + ", ".join(fmt_q(x) for x in r) + "]" for r in self.rows) + "])"


def kron(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = a.shape
    rb, cb = b.shape
    return Matrix._raw(
        [[a.rows[i][j] * b.rows[k][l] for j in range(ca) for l in range(cb)] for i in range(ra) for k in range(rb)]
    )


def vec(p: Matrix) -> list[Fraction]:
    """Row-major stacking."""
    return [x for r in p.rows for x in r]


def unvec(v: Sequence, n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return Matrix([v[i * m : (i + 1) * m] for i in range(n)])


def matvec(a: Matrix, v: Sequence) -> list[Fraction]:
    return [sum((x * y for x, y in zip(r, v) if x), ZERO) for r in a.rows]


# ---------------------------------------------------------------------------
# fraction-free elimination


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for r in rows:
        r = [as_q(x) for x in r]
        d = reduce(lcm, (x.denominator for x in r), 1)
        ir = [x.numerator * (d // x.denominator) for x in r]
        g = reduce(gcd, ir, 0)
        if g > 1:
            ir = [x // g for x in ir]
        out.append(ir)
    return out


def bareiss_echelon(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.

    Returns the nonzero echelon rows (integers, content removed) and the pivot
    columns.  Pivot choice is the first row with a nonzero entry in the current
    column.
    """
    a = [r for r in _integer_rows(rows) if any(r)]
    if ncols is None:
        ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv_row = a[r]
        pv = piv_row[c]
        for i in range(r + 1, len(a)):
            row = a[i]
            f = row[c]
            if f == 0:
                if pv != prev:
                    a[i] = [(pv * x) // prev for x in row]
                continue
            a[i] = [(pv * x - f * y) // prev for x, y in zip(row, piv_row)]
        prev = pv
        pivots.append(c)
        r += 1
        # drop rows that became zero to keep later passes short
        tail = [row for row in a[r:] if any(row)]
        a = a[:r] + tail
        if r == len(a):
            break
    echelon = []
    for row in a[:r]:
        g = reduce(gcd, row, 0)
        echelon.append([x // g for x in row] if g > 1 else row)
    return echelon, pivots


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q (computed via Bareiss then back-substitution)."""
    ech, pivots = bareiss_echelon(rows, ncols)
    red = [[Fraction(x) for x in row] for row in ech]
    for i in range(len(red) - 1, -1, -1):
        c = pivots[i]
        pv = red[i][c]
        red[i] = [x / pv for x in red[i]]
        for k in range(i):
            f = red[k][c]
            if f:
                red[k] = [x - f * y for x, y in zip(red[k], red[i])]
    return red, pivots


def rank(a: Matrix | Sequence[Sequence]) -> int:
    rows = a.rows if isinstance(a, Matrix) else a
    return len(bareiss_echelon(rows)[1])


def nullspace_exact(a: Matrix | Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}, one vector per free column (reduced form)."""
    if isinstance(a, Matrix):
        rows, ncols = a.rows, a.shape[1]
    else:
        rows = a
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
    red, pivots = rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [ZERO] * ncols
        v[f] = ONE
        for row, c in zip(red, pivots):
            v[c] = -row[f]
        basis.append(v)
    return basis


def solve_exact(a: Matrix, b: Sequence) -> list[Fraction]:
    """One exact solution of A x = b (free variables set to zero)."""
    nr, nc = a.shape
    if len(b) != nr:
        raise ValueError("right-hand side has wrong length")
    aug = [list(r) + [as_q(x)] for r, x in zip(a.rows, b)]
    red, pivots = rref(aug, nc + 1)
    if nc in pivots:
        raise NoSolution("inconsistent linear system")
    x = [ZERO] * nc
    for row, c in zip(red, pivots):
        x[c] = row[nc]
    return x


# ---------------------------------------------------------------------------
# matrix polynomials


class MatrixPoly:
    """Square matrix with polynomial entries, stored as ascending Matrix coefficients."""

    __slots__ = ("coeffs", "size")

    def __init__(self, coeffs: Iterable[Matrix], size: int | None = None):
        cs = list(coeffs)
        if size is None:
            if not cs:
                raise ValueError("size needed for the zero MatrixPoly")
            size = cs[0].shape[0]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)
        self.size = size

    @classmethod
    def const(cls, m: Matrix) -> "MatrixPoly":
        return cls([m], m.shape[0])

    @classmethod
    def identity(cls, n: int) -> "MatrixPoly":
        return cls.const(Matrix.identity(n))

    @classmethod
    def zero(cls, n: int) -> "MatrixPoly":
        return cls([], n)

    @classmethod
    def from_entries(cls, grid: Sequence[Sequence]) -> "MatrixPoly":
        """Build from a grid whose entries are Poly or scalars."""
        n = len(grid)
        polys = [[g if isinstance(g, Poly) else Poly.const(g) for g in row] for row in grid]
        deg = max((p.degree for row in polys for p in row), default=-1)
        return cls([Matrix._raw([[p.coeff(d) for p in row] for row in polys]) for d in range(deg + 1)], n)

    @classmethod
    def scalar(cls, p: Poly, n: int) -> "MatrixPoly":
        """p(t) * I."""
        return cls([Matrix.identity(n).scale(a) for a in p.c], n)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> Matrix:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Matrix.zeros(self.size)

    def lead(self) -> Matrix:
        return self.coeff(self.degree)

    def is_zero(self) -> bool:
        return not self.coeffs

    def entry(self, i: int, j: int) -> Poly:
        return Poly(c.rows[i][j] for c in self.coeffs)

    def entries(self) -> list[list[Poly]]:
        return [[self.entry(i, j) for j in range(self.size)] for i in range(self.size)]

    def __call__(self, x) -> Matrix:
        x = as_q(x)
        acc = Matrix.zeros(self.size)
        for c in reversed(self.coeffs):
            acc = acc.scale(x) + c
        return acc

    def _coerce(self, other) -> "MatrixPoly":
        if isinstance(other, MatrixPoly):
            return other
        if isinstance(other, Matrix):
            return MatrixPoly.const(other)
        if isinstance(other, Poly):
            return MatrixPoly.scalar(other, self.size)
        return MatrixPoly.scalar(Poly.const(other), self.size)

    def __add__(self, other) -> "MatrixPoly":
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return MatrixPoly([self.coeff(i) + o.coeff(i) for i in range(n)], self.size)

    __radd__ = __add__

    def __neg__(self) -> "MatrixPoly":
        return MatrixPoly([-c for c in self.coeffs], self.size)

    def __sub__(self, other) -> "MatrixPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MatrixPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MatrixPoly":
        if isinstance(other, (MatrixPoly, Matrix, Poly)):
            return self @ self._coerce(other)
        a = as_q(other)
        return MatrixPoly([c.scale(a) for c in self.coeffs], self.size)

    def __rmul__(self, other) -> "MatrixPoly":
        if isinstance(other, (Matrix, Poly)):
            return self._coerce(other) @ self
        return self * other

    def __matmul__(self, other) -> "MatrixPoly":
        o = self._coerce(other)
        if o.size != self.size:
            raise ValueError("size mismatch")
        if self.is_zero() or o.is_zero():
            return MatrixPoly.zero(self.size)
        out = [None] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coeffs):
                p = a @ b
                out[i + j] = p if out[i + j] is None else out[i + j] + p
        z = Matrix.zeros(self.size)
        return MatrixPoly([c if c is not None else z for c in out], self.size)

    def __rmatmul__(self, other) -> "MatrixPoly":
        return self._coerce(other) @ self

    def __eq__(self, other) -> bool:
        if isinstance(other, Matrix):
            other = MatrixPoly.const(other)
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        return self.size == other.size and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.size, self.coeffs))

    @property
    def T(self) -> "MatrixPoly":
        return MatrixPoly([c.T for c in self.coeffs], self.size)

    def deriv(self, k: int = 1) -> "MatrixPoly":
        return MatrixPoly([c.scale(falling(i, k)) for i, c in enumerate(self.coeffs) if i >= k], self.size)

    def shift_degree(self, a: int) -> "MatrixPoly":
        """Multiply by t^a."""
        return MatrixPoly([Matrix.zeros(self.size)] * a + list(self.coeffs), self.size)

    def map_entries(self, f) -> "MatrixPoly":
        return MatrixPoly.from_entries([[f(p) for p in row] for row in self.entries()])

    def det(self) -> Poly:
        return _poly_det(self.entries())

    def adjugate(self) -> "MatrixPoly":
        e = self.entries()
        n = self.size
        if n == 1:
            return MatrixPoly.identity(1)
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[e[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
                d = _poly_det(minor)
                cof[j][i] = d if (i + j) % 2 == 0 else -d
        return MatrixPoly.from_entries(cof)

    def __repr__(self) -> str:
        return f"MatrixPoly(size={self.size}, deg={self.degree}, coeffs={list(self.coeffs)!r})"


def _poly_det(e: list[list[Poly]]) -> Poly:
    n = len(e)
    if n == 1:
        return e[0][0]
    if n == 2:
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]
    out = Poly()
    for j in range(n):
        if e[0][j].is_zero():
            continue
        minor = [[e[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = e[0][j] * _poly_det(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


# ---------------------------------------------------------------------------
# matrix rational functions


class MatRatFn:
    """numerator(t) / denominator(t) with a scalar monic denominator, kept in lowest terms."""

    __slots__ = ("num", "den")

    def __init__(self, num: MatrixPoly, den: Poly | None = None, *, canonical: bool = True):
        den = Poly.const(1) if den is None else den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if canonical:
            num, den = _canonical(num, den)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: MatrixPoly) -> "MatRatFn":
        return cls(p, Poly.const(1), canonical=False)

    @classmethod
    def coerce(cls, x, size: int | None = None) -> "MatRatFn":
        if isinstance(x, MatRatFn):
            return x
        if isinstance(x, MatrixPoly):
            return cls.from_poly(x)
        if isinstance(x, Matrix):
            return cls.from_poly(MatrixPoly.const(x))
        if size is None:
            raise TypeError("cannot coerce scalar without size")
        p = x if isinstance(x, Poly) else Poly.const(x)
        return cls.from_poly(MatrixPoly.scalar(p, size))

    @property
    def size(self) -> int:
        return self.num.size

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def to_poly(self) -> MatrixPoly:
        if not self.is_polynomial():
            raise ValueError("rational function has a nontrivial denominator")
        return self.num * (1 / self.den.c[0]) if self.den.c[0] != 1 else self.num

    def __add__(self, other) -> "MatRatFn":
        o = MatRatFn.coerce(other, self.size)
        if self.den == o.den:
            return MatRatFn(self.num + o.num, self.den, canonical=not self.is_polynomial())
        return MatRatFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "MatRatFn":
        return MatRatFn(-self.num, self.den, canonical=False)

    def __sub__(self, other) -> "MatRatFn":
        return self + (-MatRatFn.coerce(other, self.size))

    def __mul__(self, other) -> "MatRatFn":
        if isinstance(other, (MatRatFn, MatrixPoly, Matrix)):
            o = MatRatFn.coerce(other)
            if self.is_polynomial() and o.is_polynomial():
                return MatRatFn.from_poly(self.to_poly() @ o.to_poly())
            return MatRatFn(self.num @ o.num, self.den * o.den)
        if isinstance(other, Poly):
            return MatRatFn(self.num * other, self.den)
        return MatRatFn(self.num * as_q(other), self.den, canonical=False)

    def __rmul__(self, other) -> "MatRatFn":
        if isinstance(other, (MatrixPoly, Matrix)):
            return MatRatFn.coerce(other) * self
        return self * other

    __matmul__ = __mul__

    def deriv(self, k: int = 1) -> "MatRatFn":
        out = self
        for _ in range(k):
            if out.is_polynomial():
                out = MatRatFn.from_poly(out.to_poly().deriv())
            else:
                out = MatRatFn(out.num.deriv() * out.den - out.num * out.den.deriv(), out.den * out.den)
        return out

    def __call__(self, x) -> Matrix:
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(x).scale(1 / d)

    def __eq__(self, other) -> bool:
        if isinstance(other, (MatrixPoly, Matrix)):
            other = MatRatFn.coerce(other)
        if not isinstance(other, MatRatFn):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"MatRatFn(num={self.num!r}, den={self.den!r})"


def _canonical(num: MatrixPoly, den: Poly) -> tuple[MatrixPoly, Poly]:
    if num.is_zero():
        return num, Poly.const(1)
    g = den
    for row in num.entries():
        for p in row:
            if not p.is_zero():
                g = poly_gcd(g, p)
                if g.degree == 0:
                    break
        if g.degree == 0:
            break
    if g.degree > 0:
        num = num.map_entries(lambda p: p // g)
        den = den // g
    lc = den.lead()
    if lc != 1:
        num = num * (1 / lc)
        den = den.monic()
    return num, den


def matrix_inverse_rational(p: MatrixPoly) -> MatRatFn:
    """Exact inverse of a matrix polynomial as adj(P)/det(P)."""
    d = p.det()
    if d.is_zero():
        raise SingularMatrix("matrix polynomial has identically zero determinant")
    return MatRatFn(p.adjugate(), d)
