"""Kronecker form of the eigen equation and the matrix hypergeometric series.

With the row-major vec (vec(MP) = (M x I) vec P, vec(PL) = (I x L^T) vec P)
the equation t(1-t)P'' + (X - tU)P' + VP = P Lambda_n becomes

    t(1-t) v'' + (C - t Ut) v' - Tt v = 0,
    C = X x I,  Ut = U x I,  Tt = I x Lambda_n^T - V x I,

which is the hypergeometric equation with A + B + I = Ut and AB = Tt.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .core import Matrix, Poly, ZERO, kron, matvec, solve_exact, vec
from .diffops import hypergeometric_data
from .eigensolver import generate_pstar
from .families import FamilyBundle, one_step_t, two_step_t
from .weights import CheckResult


class KronMismatch(AssertionError):
    """The assembled Tt disagrees with the closed-form diagonal list."""


class FactorizationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class KronSystem:
    n: int
    size: int
    C: Matrix
    U_t: Matrix
    T_t: Matrix

    @property
    def dim(self) -> int:
        return self.size * self.size


def diag_list(bundle: FamilyBundle) -> list[Poly]:
    """t_1..t_{N^2} as polynomials in n."""
    return one_step_t(bundle.params) if bundle.kind == "one-step" else two_step_t(bundle.params)


def build_kron_system(bundle: FamilyBundle, n: int, opname: str = "D_hyp") -> KronSystem:
    op = bundle.operators[opname]
    x, u, v = hypergeometric_data(op)
    lam = bundle.eigen[opname](n)
    size = op.size
    eye = Matrix.identity(size)
    c = kron(x, eye)
    ut = kron(u, eye)
    tt = kron(eye, lam.T) - kron(v, eye)
    if opname == "D_hyp":
        expect = [p(n) for p in diag_list(bundle)]
        if not tt.is_diagonal() or tt.diagonal() != expect:
            raise KronMismatch(f"Tt diagonal {tt.diagonal()} differs from the closed-form list {expect}")
    return KronSystem(n, size, c, ut, tt)


def hg_series_apply(system: KronSystem, v0: Sequence, terms: int) -> list[list[Fraction]]:
    """First ``terms`` coefficients v_i of 2F1(C, A, B; t) v0.

    Uses (i+1)(C + i) v_{i+1} = (Tt + i Ut + i(i-1)) v_i, which only needs
    A + B and AB.
    """
    v = [Fraction(x) for x in v0]
    if len(v) != system.dim:
        raise ValueError(f"expected a column of length {system.dim}")
    out = [v] if terms > 0 else []
    for i in range(terms - 1):
        rhs_m = system.T_t + system.U_t.scale(i)
        rhs = matvec(rhs_m.shift(i * (i - 1)), v)
        lhs = system.C.shift(i).scale(i + 1)
        # C + i is invertible for alpha > -1 since its eigenvalues are alpha + 1, alpha + 2, ...
        v = solve_exact(lhs, rhs)
        out.append(v)
    return out


def reference_pstar(bundle: FamilyBundle, n: int):
    return generate_pstar(bundle, "D_hyp", n, "pstar-zero")


def annihilation_check(bundle: FamilyBundle, n: int, extra: int = 4, v0: Sequence | None = None) -> CheckResult:
    """Series on vec(P_n^*(0)) truncates at degree n and rebuilds P_n^*."""
    system = build_kron_system(bundle, n)
    ps = reference_pstar(bundle, n)
    start = vec(ps.coeff(0)) if v0 is None else list(v0)
    coeffs = hg_series_apply(system, start, n + 1 + extra)
    for i in range(n + 1, n + 1 + extra):
        if any(coeffs[i]):
            return CheckResult(False, {"n": n, "i": i, "coefficient": coeffs[i]}, f"coefficient {i} does not vanish")
    if v0 is None:
        for i in range(n + 1):
            if coeffs[i] != vec(ps.coeff(i)):
                return CheckResult(False, {"n": n, "i": i}, f"coefficient {i} differs from P_n^*")
    return CheckResult(True, {"n": n, "terms": n + 1 + extra})


# ---------------------------------------------------------------------------
# high-precision A, B


@dataclass
class ABFactorization:
    A: mpmath.matrix
    B: mpmath.matrix
    branches: list[tuple[int, object, object]] = field(default_factory=list)
    residual_sum: object = 0
    residual_product: object = 0
    precision: int = 256

    def block(self, i: int, j: int, size: int) -> mpmath.matrix:
        """Block (i, j), 1-based, of A in the size x size block partition."""
        out = mpmath.matrix(size, size)
        for a in range(size):
            for b in range(size):
                out[a, b] = self.A[(i - 1) * size + a, (j - 1) * size + b]
        return out


def _mp(m: Matrix) -> mpmath.matrix:
    r, c = m.shape
    out = mpmath.matrix(r, c)
    for i in range(r):
        for j in range(c):
            x = m[i, j]
            out[i, j] = mpmath.mpf(x.numerator) / x.denominator
    return out


def _norm(m: mpmath.matrix):
    return max((abs(m[i, j]) for i in range(m.rows) for j in range(m.cols)), default=mpmath.mpf(0))


def solve_ab_factorization(system: KronSystem, precision: int = 256, tol=None) -> ABFactorization:
    """Upper-triangular A with A^2 - A(Ut - I) + Tt = 0 and B = Ut - I - A.

    Diagonal entries solve a^2 - m a + tau = 0; the root of smaller real part
    is taken (this is -n in the first slot).  Entries above the diagonal then
    follow from a linear equation, working outward from the diagonal.
    """
    if not (system.U_t.is_upper_triangular() and system.T_t.is_diagonal()):
        raise FactorizationError("triangular solve needs upper-triangular Ut and diagonal Tt")
    with mpmath.workprec(precision):
        tol = mpmath.mpf(10) ** -60 if tol is None else mpmath.mpf(tol)
        d = system.dim
        m = _mp(system.U_t) - mpmath.eye(d)
        tt = _mp(system.T_t)
        a = mpmath.matrix(d, d)
        branches = []
        for i in range(d):
            mi, ti = m[i, i], tt[i, i]
            disc = mpmath.sqrt(mi * mi - 4 * ti)
            r1, r2 = (mi - disc) / 2, (mi + disc) / 2
            if mpmath.re(r2) < mpmath.re(r1):
                r1, r2 = r2, r1
            a[i, i] = r1
            branches.append((i, r1, r2))
        scale = max(_norm(m), _norm(tt), mpmath.mpf(1))
        for gap in range(1, d):
            for i in range(d - gap):
                j = i + gap
                rhs = a[i, i] * m[i, j]
                for c in range(i + 1, j):
                    rhs += a[i, c] * (m[c, j] - a[c, j])
                den = a[i, i] + a[j, j] - m[j, j]
                if abs(den) <= tol * scale:
                    if abs(rhs) > tol * scale:
                        raise FactorizationError(f"no upper-triangular solution at entry ({i}, {j})")
                    a[i, j] = 0
                else:
                    a[i, j] = rhs / den
        b = m - a
        res_sum = _norm(a + b + mpmath.eye(d) - _mp(system.U_t))
        res_prod = _norm(a * b - tt)
        if res_prod > tol * scale:
            raise FactorizationError(f"AB - Tt residual {mpmath.nstr(res_prod, 5)} above tolerance")
        return ABFactorization(a, b, branches, res_sum, res_prod, precision)


def pochhammer_identity_residual(fact: ABFactorization, system: KronSystem, upto: int = 5):
    """max_i ||(A+i)(B+i) - (Tt + i Ut + i(i-1))|| for i <= upto."""
    with mpmath.workprec(fact.precision):
        d = system.dim
        ut, tt = _mp(system.U_t), _mp(system.T_t)
        worst = mpmath.mpf(0)
        for i in range(upto + 1):
            lhs = (fact.A + i * mpmath.eye(d)) * (fact.B + i * mpmath.eye(d))
            rhs = tt + i * ut + i * (i - 1) * mpmath.eye(d)
            worst = max(worst, _norm(lhs - rhs))
        return worst
