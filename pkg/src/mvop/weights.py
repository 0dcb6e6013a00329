"""Jacobi-type matrix weights W(t) = t^alpha (1-t)^beta M(t) on (0, 1).

All integrals are divided by B(alpha+1, beta+1), so every moment is rational
and every inner product is an exact matrix.  Orthogonality and symmetry are
homogeneous statements, so the normalization does not affect them.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .core import Matrix, MatrixPoly, ONE, ZERO, as_q, pochhammer
from .diffops import MatDiffOp, NotPolynomial, ShapeError, apply


class WeightError(ValueError):
    """Invalid weight parameters or probe points."""


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: dict | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class JacobiMatrixWeight:
    alpha: Fraction
    beta: Fraction
    M: MatrixPoly

    def __post_init__(self):
        a, b = as_q(self.alpha), as_q(self.beta)
        if a <= -1 or b <= -1:
            raise WeightError(f"need alpha, beta > -1, got alpha={a}, beta={b}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def size(self) -> int:
        return self.M.size

    def is_symmetric(self) -> bool:
        return all(c.is_symmetric() for c in self.M.coeffs)


@lru_cache(maxsize=None)
def _moment(alpha: Fraction, beta: Fraction, m: int, p: int) -> Fraction:
    return pochhammer(alpha + 1, m) * pochhammer(beta + 1, p) / pochhammer(alpha + beta + 2, m + p)


def normalized_moment(alpha, beta, m: int, p: int = 0) -> Fraction:
    """int t^(a+m) (1-t)^(b+p) dt divided by the (m, p) = (0, 0) integral."""
    a, b = as_q(alpha), as_q(beta)
    if a <= -1 or b <= -1:
        raise WeightError(f"need alpha, beta > -1, got alpha={a}, beta={b}")
    if m < 0 or p < 0:
        raise WeightError("moment indices must be nonnegative")
    return _moment(a, b, m, p)


def integrate(p: MatrixPoly, w: JacobiMatrixWeight, shift: int = 0) -> Matrix:
    """Normalized integral of t^shift p(t) rho(t) over (0, 1)."""
    if not p.coeffs:
        return Matrix.zeros(p.size)
    n, m = p.coeffs[0].shape
    acc = [[ZERO] * m for _ in range(n)]
    for d, c in enumerate(p.coeffs):
        mu = _moment(w.alpha, w.beta, d + shift, 0)
        if mu == 0:
            continue
        for i, row in enumerate(c.rows):
            acc_i = acc[i]
            for j, x in enumerate(row):
                if x:
                    acc_i[j] += x * mu
    return Matrix._raw([tuple(r) for r in acc])


def _check_sizes(*items) -> None:
    sizes = {x.size for x in items}
    if len(sizes) != 1:
        raise ShapeError(f"size mismatch: {sorted(sizes)}")


def inner_product(p: MatrixPoly, q: MatrixPoly, w: JacobiMatrixWeight) -> Matrix:
    """(P, Q) = int P W Q^T."""
    _check_sizes(p, q, w)
    return integrate(p @ w.M @ q.T, w)


def skew_bracket(p: MatrixPoly, q: MatrixPoly, w: JacobiMatrixWeight) -> Matrix:
    """<P, Q> = (P^T, Q^T)^T = int Q^T W P."""
    return inner_product(p.T, q.T, w).T


def _monomial(n: int, a: int, i: int, j: int) -> MatrixPoly:
    z = Matrix.zeros(n)
    return MatrixPoly([z] * a + [Matrix.unit(n, i, j)], n)


def symmetry_check(op: MatDiffOp, w: JacobiMatrixWeight, degmax: int) -> CheckResult:
    """Exact test of <op P, Q> = <P, op Q> on all monomials t^a E_ij, a <= degmax.

    With B(P, Q) = <op P, Q> the identity reads B(P, Q) = B(Q, P)^T.  For
    Q = t^b E_kl only row l of B(P, Q) is nonzero and it equals row k of
    H_P(b) = int t^b M (op P) rho, so one table of H values covers every pair.
    """
    _check_sizes(op, w)
    if not op.is_polynomial():
        raise NotPolynomial("symmetry_check needs polynomial coefficients")
    n = op.size
    basis = [(a, i, j) for a in range(degmax + 1) for i in range(n) for j in range(n)]
    h: dict[tuple[int, int, int], list[Matrix]] = {}
    for key in basis:
        a, i, j = key
        img = apply(op, _monomial(n, a, i, j))
        prod = w.M @ img
        h[key] = [integrate(prod, w, b) for b in range(degmax + 1)]

    def bracket(pk, qk) -> Matrix:
        b, k, l = qk
        rows = [[ZERO] * n for _ in range(n)]
        rows[l] = list(h[pk][b].rows[k])
        return Matrix(rows)

    for pk in basis:
        for qk in basis:
            if qk < pk:
                continue
            lhs = bracket(pk, qk)
            rhs = bracket(qk, pk).T
            if lhs != rhs:
                return CheckResult(
                    False,
                    {"P": f"t^{pk[0]} E{pk[1] + 1}{pk[2] + 1}", "Q": f"t^{qk[0]} E{qk[1] + 1}{qk[2] + 1}",
                     "lhs": lhs, "rhs": rhs},
                    "<DP,Q> != <P,DQ>",
                )
    return CheckResult(True)


def conjugate_weight(w: JacobiMatrixWeight, psi: MatrixPoly) -> JacobiMatrixWeight:
    """Weight Psi W Psi^T; any (1-t) powers stay inside the polynomial part."""
    _check_sizes(w, psi)
    return JacobiMatrixWeight(w.alpha, w.beta, psi @ w.M @ psi.T)


def positivity_probe(
    w: JacobiMatrixWeight, points: Sequence = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
) -> CheckResult:
    """All leading principal minors of M(t0) positive at each probe point."""
    for t0 in points:
        t0 = as_q(t0)
        if not 0 < t0 < 1:
            raise WeightError(f"probe point {t0} outside (0, 1)")
        m = w.M(t0)
        for r in range(1, w.size + 1):
            minor = Matrix([row[:r] for row in m.rows[:r]]).det()
            if minor <= 0:
                return CheckResult(False, {"t": t0, "order": r, "minor": minor}, "minor not positive")
    return CheckResult(True)


def verify_weight_ode(w: JacobiMatrixWeight, a: Matrix, b: Matrix) -> CheckResult:
    """t(1-t) M' = ((1-t)A + tB) M + M ((1-t)A + tB)^T, exactly."""
    n = w.size
    k = MatrixPoly([a, b - a], n)
    lhs = MatrixPoly([Matrix.zeros(n), Matrix.identity(n), -Matrix.identity(n)], n) @ w.M.deriv()
    rhs = k @ w.M + w.M @ k.T
    res = lhs - rhs
    if res.is_zero():
        return CheckResult(True, {"residual": res})
    return CheckResult(False, {"residual": res}, "weight ODE residual nonzero")


def diagonal_weight(alpha, beta, entries: Iterable) -> JacobiMatrixWeight:
    """Weight with diagonal polynomial part, entries given as Poly or scalars."""
    entries = list(entries)
    n = len(entries)
    grid = [[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)]
    return JacobiMatrixWeight(as_q(alpha), as_q(beta), MatrixPoly.from_entries(grid))


def identity_weight(n: int, alpha=0, beta=0) -> JacobiMatrixWeight:
    return diagonal_weight(alpha, beta, [ONE] * n)
