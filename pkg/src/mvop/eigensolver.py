"""Polynomial eigenfunctions of hypergeometric-form operators.

For D = t(1-t) d^2 + (X - tU) d + V and P_n^* = sum_j A_j t^j, the eigen
equation D P_n^* = P_n^* Lambda_n splits into

    Gamma_n A_n = A_n Lambda_n,
    Gamma_j A_j - A_j Lambda_n = -(j+1)(X + j) A_{j+1},   j = n-1, ..., 0,

with Gamma_j = -j(j-1) - jU + V.  Each step is a Sylvester equation solved
exactly through its Kronecker form.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import Matrix, MatrixPoly, ONE, kron, nullspace_exact, solve_exact, unvec, vec
from .diffops import EigenSeq, MatDiffOp, apply, gamma_n, hypergeometric_data
from .families import FamilyBundle, ParameterError, appendix_coeff, pstar_zero
from .weights import CheckResult, JacobiMatrixWeight, inner_product


class SpectraOverlap(ArithmeticError):
    """Sylvester equation without a unique solution (shared eigenvalue)."""


class GenericityError(ParameterError):
    pass


def sylvester_solve(g: Matrix, l: Matrix, r: Matrix) -> Matrix:
    """Unique X with G X - X L = R.

    The Kronecker matrix G(x)I - I(x)L^T has determinant equal, up to sign, to
    the resultant of the two characteristic polynomials, so a zero determinant
    is exactly the shared-eigenvalue case.
    """
    n, m = g.shape[0], l.shape[0]
    k = kron(g, Matrix.identity(m)) - kron(Matrix.identity(n), l.T)
    if k.det() == 0:
        raise SpectraOverlap("spectra of G and L intersect")
    x = solve_exact(k, vec(r))
    return unvec(x, n, m)


@dataclass
class PolyFamily:
    bundle: FamilyBundle
    opname: str
    normalization: str
    pstar: list[MatrixPoly] = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.pstar) - 1

    def p(self, n: int) -> MatrixPoly:
        """P_n itself (the transpose of the eigenfunction P_n^*)."""
        return self.pstar[n].T

    def leading(self, n: int) -> Matrix:
        return self.pstar[n].coeff(n)

    def monic(self) -> "PolyFamily":
        out = [q @ self.leading(i).inverse() for i, q in enumerate(self.pstar)]
        return PolyFamily(self.bundle, self.opname, "monic", out)


def _eigvec_matrix(g: Matrix, lam: Sequence[Fraction], where: str) -> Matrix:
    n = g.shape[0]
    if len(set(lam)) != len(lam):
        raise GenericityError(f"repeated eigenvalue in Lambda at {where}", where)
    cols = []
    for c, mu in enumerate(lam):
        ns = nullspace_exact(g.shift(-mu).rows, n)
        if len(ns) != 1:
            raise GenericityError(f"eigenvalue {mu} of Gamma at {where} has geometric multiplicity {len(ns)}", where)
        cols.append(ns[0])
    return Matrix([[cols[c][i] for c in range(n)] for i in range(n)])


def generate_pstar(bundle: FamilyBundle, opname: str, n: int, normalization: str) -> MatrixPoly:
    """P_n^* for the named hypergeometric-form operator."""
    op = bundle.operators[opname]
    x, _, _ = hypergeometric_data(op)
    lam = bundle.eigen[opname](n)
    if not lam.is_diagonal():
        raise ValueError("generation needs a diagonal eigenvalue sequence")
    lam_d = lam.diagonal()
    size = op.size
    lead = _eigvec_matrix(gamma_n(op, n), lam_d, f"n={n}")
    coeffs = _descend(op, x, lam, lead, n)
    if normalization == "appendix":
        target = appendix_coeff(bundle, n, 0)
        f = _column_factors(lead, target)
    elif normalization == "pstar-zero":
        if n == 0:
            target = Matrix.identity(size)
        else:
            target = pstar_zero(bundle, n)
        f = _column_factors(coeffs[0], target, diagonal=True)
    elif normalization == "monic":
        inv = lead.inverse()
        return MatrixPoly([c @ inv for c in coeffs], size)
    elif normalization == "raw":
        f = [ONE] * size
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    fd = Matrix.diag(f)
    return MatrixPoly([c @ fd for c in coeffs], size)


def _column_factors(m: Matrix, target: Matrix, diagonal: bool = False) -> list[Fraction]:
    n = m.shape[0]
    out = []
    for c in range(n):
        if diagonal:
            r = c
        else:
            r = next((i for i in range(n) if m[i, c] != 0 and target[i, c] != 0), None)
            if r is None:
                raise GenericityError(f"no common nonzero entry in column {c}", "normalization")
        if m[r, c] == 0:
            raise GenericityError(f"reference entry ({r},{c}) vanishes", "normalization")
        out.append(target[r, c] / m[r, c])
    return out


def _descend(op: MatDiffOp, x: Matrix, lam: Matrix, lead: Matrix, n: int) -> list[Matrix]:
    coeffs: list[Matrix | None] = [None] * (n + 1)
    coeffs[n] = lead
    for j in range(n - 1, -1, -1):
        rhs = (x.shift(j) @ coeffs[j + 1]).scale(-(j + 1))
        try:
            coeffs[j] = sylvester_solve(gamma_n(op, j), lam, rhs)
        except SpectraOverlap:
            raise GenericityError(f"spectrum of Gamma_{j} meets spectrum of Lambda_{n}", f"n={n}, j={j}") from None
    return coeffs


def generate_family(
    bundle: FamilyBundle, opname: str, N: int, normalization: str | None = None, jobs: int = 1
) -> PolyFamily:
    """P_0^*, ..., P_N^* for the bundle's operator ``opname`` (D1 or D_hyp)."""
    if normalization is None:
        normalization = "pstar-zero" if opname == "D_hyp" else "appendix"
    ns = range(N + 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(generate_pstar, [bundle] * len(ns), [opname] * len(ns), ns, [normalization] * len(ns)))
    else:
        out = [generate_pstar(bundle, opname, n, normalization) for n in ns]
    return PolyFamily(bundle, opname, normalization, out)


def monic_orthogonal(w: JacobiMatrixWeight, N: int) -> list[MatrixPoly]:
    """Monic Q_0..Q_N with (Q_n, t^m I) = 0 for m < n, by Gram-Schmidt."""
    size = w.size
    qs: list[MatrixPoly] = []
    norms: list[Matrix] = []
    for n in range(N + 1):
        tn = MatrixPoly([Matrix.zeros(size)] * n + [Matrix.identity(size)], size)
        q = tn
        for qm, hm in zip(qs, norms):
            c = inner_product(tn, qm, w) @ hm.inverse()
            q = q - MatrixPoly.const(c) @ qm
        h = inner_product(q, q, w)
        if h.det() == 0:
            raise ArithmeticError(f"singular Gram matrix at degree {n}")
        qs.append(q)
        norms.append(h)
    return qs


def verify_eigen_equation(family: PolyFamily, opname: str, lam: EigenSeq | None = None) -> CheckResult:
    """apply(op, P_n^*) == P_n^* Lambda_n for every member of the family."""
    op = family.bundle.operators[opname]
    lam = family.bundle.eigen[opname] if lam is None else lam
    for n, ps in enumerate(family.pstar):
        lhs = apply(op, ps)
        rhs = ps @ lam(n)
        if lhs != rhs:
            return CheckResult(False, {"n": n, "residual": lhs - rhs}, f"eigen equation fails at n={n}")
    return CheckResult(True)
