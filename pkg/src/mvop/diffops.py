"""Matrix differential operators acting from the left on matrix functions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    MatRatFn,
    Matrix,
    MatrixPoly,
    Poly,
    as_q,
    binomial,
    falling,
    matrix_inverse_rational,
)


class NotPolynomial(ValueError):
    """A denominator survived where a polynomial result was required."""


class ShapeError(ValueError):
    pass


class MatDiffOp:
    """sum_j F_j(t) d^j/dt^j, with MatRatFn coefficients F_j."""

    __slots__ = ("size", "coeffs")

    def __init__(self, coeffs: Sequence, size: int | None = None):
        cs = []
        for c in coeffs:
            if size is None and isinstance(c, (MatRatFn, MatrixPoly, Matrix)):
                size = c.size if not isinstance(c, Matrix) else c.shape[0]
            cs.append(c)
        if size is None:
            raise ValueError("cannot infer operator size")
        cs = [MatRatFn.coerce(c, size) for c in cs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)
        self.size = size

    @classmethod
    def identity(cls, n: int) -> "MatDiffOp":
        return cls([Matrix.identity(n)], n)

    @classmethod
    def zero(cls, n: int) -> "MatDiffOp":
        return cls([], n)

    @classmethod
    def scalar(cls, a, n: int) -> "MatDiffOp":
        return cls([Matrix.identity(n).scale(a)], n)

    @classmethod
    def derivative(cls, j: int, n: int) -> "MatDiffOp":
        z = Matrix.zeros(n)
        return cls([z] * j + [Matrix.identity(n)], n)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, j: int) -> MatRatFn:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return MatRatFn.from_poly(MatrixPoly.zero(self.size))

    def poly_coeff(self, j: int) -> MatrixPoly:
        return self.coeff(j).to_poly()

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def _check(self, other: "MatDiffOp") -> None:
        if other.size != self.size:
            raise ShapeError(f"operator sizes differ: {self.size} vs {other.size}")

    def __add__(self, other) -> "MatDiffOp":
        if not isinstance(other, MatDiffOp):
            other = MatDiffOp.scalar(other, self.size)
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return MatDiffOp([self.coeff(j) + other.coeff(j) for j in range(n)], self.size)

    __radd__ = __add__

    def __neg__(self) -> "MatDiffOp":
        return MatDiffOp([-c for c in self.coeffs], self.size)

    def __sub__(self, other) -> "MatDiffOp":
        if not isinstance(other, MatDiffOp):
            other = MatDiffOp.scalar(other, self.size)
        return self + (-other)

    def __rsub__(self, other) -> "MatDiffOp":
        return (-self) + other

    def __mul__(self, other) -> "MatDiffOp":
        if isinstance(other, MatDiffOp):
            return compose(self, other)
        a = as_q(other)
        return MatDiffOp([c * a for c in self.coeffs], self.size)

    def __rmul__(self, other) -> "MatDiffOp":
        return self * other

    def __matmul__(self, other: "MatDiffOp") -> "MatDiffOp":
        return compose(self, other)

    def __pow__(self, e: int) -> "MatDiffOp":
        out = MatDiffOp.identity(self.size)
        for _ in range(e):
            out = compose(out, self)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatDiffOp):
            return NotImplemented
        if other.size != self.size:
            return False
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coeff(j) == other.coeff(j) for j in range(n))

    def __hash__(self) -> int:
        return hash((self.size, tuple(c.num for c in self.coeffs)))

    def __call__(self, p):
        return apply(self, p)

    def __repr__(self) -> str:
        return f"MatDiffOp(size={self.size}, order={self.order})"


def apply(op: MatDiffOp, p) -> MatRatFn | MatrixPoly:
    """sum_j F_j P^(j).  Returns a MatrixPoly when the result is polynomial."""
    if isinstance(p, Matrix):
        p = MatrixPoly.const(p)
    if p.size != op.size:
        raise ShapeError(f"operator size {op.size} vs function size {p.size}")
    if isinstance(p, MatrixPoly) and op.is_polynomial():
        acc = MatrixPoly.zero(op.size)
        for j, c in enumerate(op.coeffs):
            if j > p.degree:
                break
            acc = acc + c.to_poly() @ p.deriv(j)
        return acc
    f = MatRatFn.coerce(p)
    acc = MatRatFn.from_poly(MatrixPoly.zero(op.size))
    for j, c in enumerate(op.coeffs):
        acc = acc + c * f.deriv(j)
    return acc.to_poly() if acc.is_polynomial() else acc


def compose(a: MatDiffOp, b: MatDiffOp) -> MatDiffOp:
    """(A B) f = A (B f), expanded by Leibniz."""
    a._check(b)
    n = a.size
    if a.is_zero() or b.is_zero():
        return MatDiffOp.zero(n)
    out: dict[int, MatRatFn] = {}
    for i, fa in enumerate(a.coeffs):
        if fa.is_zero():
            continue
        for j, gb in enumerate(b.coeffs):
            if gb.is_zero():
                continue
            for l in range(i + 1):
                d = gb.deriv(l)
                if d.is_zero():
                    continue
                term = fa * d
                if l != i:
                    term = term * binomial(i, l)
                key = i - l + j
                out[key] = term if key not in out else out[key] + term
    top = max(out) if out else -1
    return MatDiffOp([out.get(k, MatRatFn.from_poly(MatrixPoly.zero(n))) for k in range(top + 1)], n)


def commutator(a: MatDiffOp, b: MatDiffOp) -> MatDiffOp:
    return compose(a, b) - compose(b, a)


def conjugate_by(op: MatDiffOp, psi_star, require_polynomial: bool = False) -> MatDiffOp:
    """The operator F -> psi_star^{-1} op(psi_star F).

    ``psi_star`` may be a MatrixPoly or a MatRatFn.  With ``require_polynomial``
    a surviving denominator raises :class:`NotPolynomial`.
    """
    psi = MatRatFn.coerce(psi_star)
    if psi.size != op.size:
        raise ShapeError("conjugator size mismatch")
    if psi.is_polynomial():
        inv = matrix_inverse_rational(psi.to_poly())
    else:
        base = matrix_inverse_rational(psi.num)
        inv = MatRatFn(base.num * psi.den, base.den)
    derivs = [psi.deriv(k) for k in range(op.order + 1)]
    zero = MatRatFn.from_poly(MatrixPoly.zero(op.size))
    new = [zero] * (op.order + 1)
    for j, fj in enumerate(op.coeffs):
        if fj.is_zero():
            continue
        left = inv * fj
        for l in range(j + 1):
            d = derivs[j - l]
            if d.is_zero():
                continue
            new[l] = new[l] + (left * d) * binomial(j, l)
    out = MatDiffOp(new, op.size)
    if require_polynomial:
        for j, c in enumerate(out.coeffs):
            if not c.is_polynomial():
                raise NotPolynomial(f"coefficient of d^{j} keeps denominator {c.den!r}")
    return out


@dataclass(frozen=True)
class FormCheck:
    ok: bool
    violation: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_hypergeometric_form(op: MatDiffOp) -> FormCheck:
    """Every F_j polynomial of degree <= j."""
    for j, c in enumerate(op.coeffs):
        if not c.is_polynomial():
            return FormCheck(False, j, "non-polynomial coefficient")
        if c.to_poly().degree > j:
            return FormCheck(False, j, f"degree {c.to_poly().degree} exceeds {j}")
    return FormCheck(True)


def hypergeometric_data(op: MatDiffOp) -> tuple[Matrix, Matrix, Matrix]:
    """Return (X, U, V) for op = t(1-t) d^2 + (X - tU) d + V, or raise ShapeError."""
    n = op.size
    if op.order != 2 or not op.is_polynomial():
        raise ShapeError("expected a second order polynomial operator")
    f2 = op.poly_coeff(2)
    expected = MatrixPoly([Matrix.zeros(n), Matrix.identity(n), -Matrix.identity(n)], n)
    if f2 != expected:
        raise ShapeError("leading coefficient is not t(1-t) I")
    f1, f0 = op.poly_coeff(1), op.poly_coeff(0)
    if f1.degree > 1 or f0.degree > 0:
        raise ShapeError("lower coefficients exceed hypergeometric degrees")
    return f1.coeff(0), -f1.coeff(1), f0.coeff(0)


def gamma_n(op: MatDiffOp, n: int) -> Matrix:
    """-n(n-1) I - n U + V for op = t(1-t) d^2 + (X - tU) d + V."""
    _, u, v = hypergeometric_data(op)
    return (v - u.scale(n)).shift(-n * (n - 1))


def leading_symbol(op: MatDiffOp, n: int) -> Matrix:
    """Coefficient of t^n in op(t^n I) for a hypergeometric-form operator."""
    acc = Matrix.zeros(op.size)
    for j, c in enumerate(op.coeffs):
        if j > n:
            break
        acc = acc + c.to_poly().coeff(j).scale(falling(n, j))
    return acc


def second_order(x: Matrix, u: Matrix, v: Matrix) -> MatDiffOp:
    """t(1-t) d^2 + (X - tU) d + V."""
    n = x.shape[0]
    i = Matrix.identity(n)
    return MatDiffOp(
        [
            MatrixPoly.const(v),
            MatrixPoly([x, -u], n),
            MatrixPoly([Matrix.zeros(n), i, -i], n),
        ],
        n,
    )


# ---------------------------------------------------------------------------
# eigenvalue sequences


class EigenSeq:
    """Matrix whose entries are polynomials in the index n."""

    __slots__ = ("size", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        self.entries = tuple(tuple(e if isinstance(e, Poly) else Poly.const(e) for e in row) for row in entries)
        self.size = len(self.entries)

    @classmethod
    def diag(cls, polys: Sequence) -> "EigenSeq":
        n = len(polys)
        return cls([[polys[i] if i == j else Poly() for j in range(n)] for i in range(n)])

    @classmethod
    def constant(cls, m: Matrix) -> "EigenSeq":
        return cls(m.rows)

    @classmethod
    def identity(cls, n: int) -> "EigenSeq":
        return cls.constant(Matrix.identity(n))

    def __call__(self, n) -> Matrix:
        return Matrix([[p(n) for p in row] for row in self.entries])

    def degree(self) -> int:
        return max(p.degree for row in self.entries for p in row)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def __add__(self, other) -> "EigenSeq":
        if not isinstance(other, EigenSeq):
            other = EigenSeq.identity(self.size).scale(other)
        return EigenSeq([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    __radd__ = __add__

    def __neg__(self) -> "EigenSeq":
        return EigenSeq([[-a for a in r] for r in self.entries])

    def __sub__(self, other) -> "EigenSeq":
        if not isinstance(other, EigenSeq):
            other = EigenSeq.identity(self.size).scale(other)
        return self + (-other)

    def scale(self, a) -> "EigenSeq":
        a = as_q(a)
        return EigenSeq([[p * a for p in r] for r in self.entries])

    def __mul__(self, other) -> "EigenSeq":
        if not isinstance(other, EigenSeq):
            return self.scale(other)
        n = self.size
        return EigenSeq(
            [[sum((self.entries[i][k] * other.entries[k][j] for k in range(n)), Poly()) for j in range(n)] for i in range(n)]
        )

    def __rmul__(self, other) -> "EigenSeq":
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EigenSeq):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"EigenSeq({[[p.c for p in r] for r in self.entries]!r})"


def npoly(*coeffs) -> Poly:
    """Polynomial in n from ascending coefficients."""
    return Poly(coeffs)


N_VAR = Poly((0, 1))
