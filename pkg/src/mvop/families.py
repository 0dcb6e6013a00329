"""Constructors for the one-step (3x3) and two-step (4x4) Jacobi-type families.

Every operator, weight, conjugator, eigenvalue sequence and closed form used
elsewhere in the package is built here from the parameters.  Closed forms
are kept in their displayed shape; where a displayed entry disagrees with
what the objects force, the working value is used and the displayed one is
kept under ``printed`` or a ``*_printed`` helper for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Union

from . import appendix
from .core import Matrix, MatrixPoly, MatRatFn, ONE, Poly, T, ZERO, as_q, pochhammer
from .diffops import MatDiffOp, EigenSeq, N_VAR, second_order
from .weights import JacobiMatrixWeight


class ParameterError(ValueError):
    """Invalid or non-generic parameters; ``expression`` names the culprit."""

    def __init__(self, message: str, expression: str = ""):
        super().__init__(message)
        self.expression = expression


def _nz(value: Fraction, expr: str) -> Fraction:
    if value == 0:
        raise ParameterError(f"{expr} vanishes", expr)
    return value


def _int_param(x, name: str) -> int:
    q = as_q(x)
    if q.denominator != 1:
        raise ParameterError(f"{name} must be an integer, got {q}", name)
    return int(q)


def gbinom(x: Fraction, m: int) -> Fraction:
    """Generalized binomial coefficient C(x, m) for integer m >= 0."""
    if m < 0:
        return ZERO
    out = ONE
    for i in range(m):
        out *= x - i
    return out / factorial(m)


@dataclass(frozen=True)
class OneStepParams:
    alpha: Fraction
    beta: Fraction
    k: int

    def __post_init__(self):
        a, b = as_q(self.alpha), as_q(self.beta)
        k = _int_param(self.k, "k")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "k", k)
        if a <= -1:
            raise ParameterError(f"alpha = {a} must exceed -1", "alpha > -1")
        if b <= -1:
            raise ParameterError(f"beta = {b} must exceed -1", "beta > -1")
        if not 1 <= k <= b:
            raise ParameterError(f"need 1 <= k <= beta, got k={k}, beta={b}", "1 <= k <= beta")
        s = a + b - k
        for v, e in [(s + 2, "alpha+beta-k+2"), (s + 3, "alpha+beta-k+3"), (s + 4, "alpha+beta-k+4"),
                     (b - k + 1, "beta-k+1"), (b - k + 2, "beta-k+2")]:
            _nz(v, e)
        for i, w in enumerate(one_step_w(self), 1):
            _nz(w, f"w{i}")

    @property
    def kind(self) -> str:
        return "one-step"

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "k": Fraction(self.k)}


@dataclass(frozen=True)
class TwoStepParams:
    alpha: Fraction
    beta: Fraction
    k1: int
    k2: int

    def __post_init__(self):
        a, b = as_q(self.alpha), as_q(self.beta)
        k1, k2 = _int_param(self.k1, "k1"), _int_param(self.k2, "k2")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)
        if a <= -1:
            raise ParameterError(f"alpha = {a} must exceed -1", "alpha > -1")
        if b <= -1:
            raise ParameterError(f"beta = {b} must exceed -1", "beta > -1")
        if not 1 <= k1 < k2 <= b:
            raise ParameterError(
                f"need 1 <= k1 < k2 <= beta, got k1={k1}, k2={k2}, beta={b}", "1 <= k1 < k2 <= beta"
            )
        p = a + b
        for v, e in [
            (k1 - k2 - 1, "k1-k2-1"), (k1 - k2 - 2, "k1-k2-2"), (k2 - k1 + 1, "k2-k1+1"),
            (p - k1 + 3, "alpha+beta-k1+3"), (p - k1 + 4, "alpha+beta-k1+4"),
            (p - k2 + 2, "alpha+beta-k2+2"), (p - k2 + 3, "alpha+beta-k2+3"),
            (b - k2 + 1, "beta-k2+1"), (b - k1 + 2, "beta-k1+2"),
        ]:
            _nz(v, e)
        for i, w in enumerate(two_step_w(self), 1):
            _nz(w, f"w{i}")

    @property
    def kind(self) -> str:
        return "two-step"

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "k1": Fraction(self.k1), "k2": Fraction(self.k2)}


Params = Union[OneStepParams, TwoStepParams]


def one_step_w(p: OneStepParams) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients that make the D1 family orthogonal (they depend on beta, k only)."""
    b, k = p.beta, p.k
    return Fraction(k * (k + 1)), 2 * k * (b - k + 1), (b - k + 1) * (b - k + 2)


def one_step_w_printed(p: OneStepParams) -> tuple[Fraction, Fraction, Fraction]:
    """The displayed products in alpha; not an orthogonality weight for the D1 family."""
    a, k = p.alpha, p.k
    w1 = ONE
    w2 = Fraction(k) * (a - k)
    for j in range(k - 1):
        w1 *= (a - j - 1) * (a - j) / ((k - j - 1) * (k - j))
        w2 *= (a - j - 1) * (a - j) / ((k - j) * (k - j + 1))
    w3 = ONE
    for j in range(k):
        w3 *= (a - j - 1) * (a - j) / ((k - j) * (k - j + 1))
    return w1, w2, w3


def two_step_w(p: TwoStepParams) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    b, k1, k2 = p.beta, p.k1, p.k2
    w1 = Fraction(k2 - k1 + 1, k2) * gbinom(b, k2 - 1) * gbinom(b + 1, k1 - 1)
    w2 = Fraction(k2 - k1 + 2, k2 + 1) * gbinom(b, k2) * gbinom(b + 1, k1 - 1)
    w3 = Fraction(k2 - k1, k2) * gbinom(b, k2 - 1) * gbinom(b + 1, k1)
    w4 = Fraction(k2 - k1 + 1, k2 + 1) * gbinom(b, k2) * gbinom(b + 1, k1)
    return w1, w2, w3, w4


@dataclass
class FamilyBundle:
    kind: str
    params: Params
    W: JacobiMatrixWeight
    W_tilde: JacobiMatrixWeight
    psi_star: MatrixPoly
    operators: dict[str, MatDiffOp]
    eigen: dict[str, EigenSeq]
    ode_A: Matrix
    ode_B: Matrix
    constants: dict[str, Fraction]
    hyp_data: tuple[Matrix, Matrix, Matrix]
    notes: list[str] = field(default_factory=list)
    printed: dict[str, MatDiffOp] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.psi_star.size

    @property
    def weights(self) -> dict[str, JacobiMatrixWeight]:
        return {"W": self.W, "W_tilde": self.W_tilde}


# ---------------------------------------------------------------------------
# small builders

ONE_MINUS_T = Poly((1, -1))
TT = T * ONE_MINUS_T  # t(1-t)


def _m(rows) -> Matrix:
    return Matrix([[as_q(x) for x in r] for r in rows])


def _lin(c0, c1) -> MatrixPoly:
    """c0 - t*c1 as a matrix polynomial (the displayed 'A - tB' pattern)."""
    a, b = _m(c0), _m(c1)
    return MatrixPoly([a, -b], a.shape[0])


def _grid(rows) -> MatrixPoly:
    return MatrixPoly.from_entries([[x if isinstance(x, Poly) else Poly.const(as_q(x)) for x in r] for r in rows])


def _original_operator(x0, u0, m1, m2) -> MatDiffOp:
    """t(1-t) d^2 + (X0 - t U0) d + [M1 + t M2] / (1 - t)."""
    n = len(x0)
    f0 = MatRatFn(MatrixPoly([_m(m1), _m(m2)], n), ONE_MINUS_T)
    f1 = MatRatFn.from_poly(_lin(x0, u0))
    f2 = MatRatFn.from_poly(MatrixPoly.scalar(TT, n))
    return MatDiffOp([f0, f1, f2], n)


def _op(f2: MatrixPoly, f1: MatrixPoly, f0: MatrixPoly) -> MatDiffOp:
    return MatDiffOp([f0, f1, f2], f2.size)


def _diag_seq(entries) -> EigenSeq:
    return EigenSeq.diag(entries)


N = N_VAR


# ---------------------------------------------------------------------------
# one-step


def one_step_t(p: OneStepParams) -> list[Poly]:
    """t_1..t_9 of the one-step diagonal list as polynomials in n."""
    a, b, k = p.alpha, p.beta, p.k
    s = a + b - k
    base3 = -N * N - N * (a + b + 3)
    base4 = -N * N - N * (a + b + 4)
    base5 = -N * N - N * (a + b + 5)
    return [
        base3,
        base4 - (s + 2),
        base5 - 2 * (s + 3),
        base3 + (s + 2),
        base4,
        base5 - (s + 4),
        base3 + 2 * (s + 3),
        base4 + (s + 4),
        base5,
    ]


def one_step_constants(p: OneStepParams) -> dict[str, Fraction]:
    a, b, k = p.alpha, p.beta, p.k
    c1 = (
        a * b**2 + 10 * a * b + 18 * a + 2 * b**2 + 14 * b + 16 + 2 * a**2 * b + 8 * a**2
        - 2 * k * a * b - 10 * k * a - 4 * k * b - 14 * k + a**3 - 2 * k * a**2 + k**2 * a + 2 * k**2
    )
    c2 = a * b + 5 * a + 3 * b + 8 + a**2 - k * a - 3 * k
    return {"C1": c1, "C2": c2}


def _one_step(p: OneStepParams) -> FamilyBundle:
    a, b, k = p.alpha, p.beta, p.k
    s = a + b - k  # recurring combination alpha+beta-k
    w1, w2, w3 = one_step_w(p)
    W = JacobiMatrixWeight(a, b, _grid([[w1 * T * T, 0, 0], [0, w2 * T, 0], [0, 0, w3]]))

    d_orig = _original_operator(
        [[a + 3, 0, 0], [0, a + 2, 0], [0, 0, a + 1]],
        [[a + b + 4, 0, 0], [0, a + b + 3, 0], [0, 0, a + b + 2]],
        [[-2 * (b - k + 1), 2 * (b - k + 1), 0], [0, -(b - k + 2), b - k + 2], [0, 0, 0]],
        [[0, 0, 0], [k + 1, -(k + 1), 0], [0, 2 * k, -2 * k]],
    )
    L = _m([[1, 0, 0], [1, 1, 0], [1, 2, 1]])
    dpsi = _grid([[1, 0, 0], [0, ONE_MINUS_T, 0], [0, 0, ONE_MINUS_T * ONE_MINUS_T]])
    psi_star = MatrixPoly.const(L) @ dpsi
    W_tilde = JacobiMatrixWeight(a, b, psi_star.T @ W.M @ psi_star)

    tt = MatrixPoly.scalar(TT, 3)
    a1 = _lin([[a + 3, 0, 0], [-1, a + 2, 0], [0, -2, a + 1]], [[a + b + 4, 0, 0], [0, a + b + 5, 0], [0, 0, a + b + 6]])
    a0 = MatrixPoly.const(_m([[0, 2 * (b - k + 1), 0], [0, -(s + 2), b - k + 2], [0, 0, -2 * (s + 3)]]))
    d_tilde = _op(tt, a1, a0)
    d1 = _op(tt, a1, a0)

    half = Fraction(1, 2)
    def d2_with(e21, e33):
        b2 = _grid([[TT, 0, 0], [e21 * T, half * TT, 0], [0, -T, 0]])
        b1 = _lin(
            [[s + 4, b - k + 1, 0], [-(s + 4) * half, (a + 4) * half, (b - k + 2) * half], [0, -(s + 5), -(b - k + 2)]],
            [[a + b + 4, b - k + 1, 0], [0, (a + b + 5) * half, (b - k + 2) * half], [0, 0, e33]],
        )
        b0 = MatrixPoly.const(
            _m([[0, -k * (b - k + 1), 0], [0, k * (s + 2) * half, -k * (b - k + 2) * half], [0, 0, k * (s + 3)]])
        )
        return _op(b2, b1, b0)

    # Lambda_n(D2) has a constant (3,3) entry only without the t-term at (3,3)
    # of the first-order part, and the (2,1) second-order entry must be -t/2
    d2 = d2_with(-half, 0)
    d2_printed = d2_with(half, a + b + 6)

    consts = one_step_constants(p)
    c1, c2 = consts["C1"], consts["C2"]
    V = Matrix.diag([0, -(s + 2), -2 * (s + 3)])
    U = _m([[a + b + 4, -1, Fraction(2) / (s + 2)], [0, a + b + 5, -2 * (s + 3) / (s + 2)], [0, 0, a + b + 6]])
    X = _m(
        [
            [(a + 1) * (s + 4) / (s + 2), (a + 1) * (s + 4) / ((s + 2) * (s + 3)), 0],
            [2 * (b - k + 1) / (s + 2), c1 / ((s + 2) * (s + 4)), 2 * (a + 2) / (s + 4)],
            [0, (b - k + 2) * (s + 2) / ((s + 3) * (s + 4)), c2 / (s + 4)],
        ]
    )
    d_hyp = second_order(X, U, V)

    t = one_step_t(p)
    eig = {
        "D_hyp": _diag_seq(t[:3]),
        "D1": _diag_seq(t[:3]),
        "D_tilde": _diag_seq(t[:3]),
        "D2": _diag_seq(
            [
                -N * N - N * (a + b + 3),
                (-N * N - N * (a + b + 4) + k * (s + 2)) * half,
                Poly.const(k * (s + 3)),
            ]
        ),
    }
    A = _m([[1, -half, 0], [0, half, -1], [0, 0, 0]])
    B = _m([[0, -half, 0], [0, -1, -1], [0, 0, -2]])
    ops = {"D_original": d_orig, "D_tilde": d_tilde, "D_hyp": d_hyp, "D1": d1, "D2": d2}
    bundle = FamilyBundle("one-step", p, W, W_tilde, psi_star, ops, eig, A, B, consts, (X, U, V))
    bundle.printed = {"D_tilde": d_tilde, "D1": d1, "D2": d2_printed}
    bundle.notes.append("D2 uses -t/2 at (2,1) of the second-order part and no t-term at (3,3) of the first-order part")
    return bundle


# ---------------------------------------------------------------------------
# two-step


def two_step_t(p: TwoStepParams) -> list[Poly]:
    """t_1..t_16 of the two-step diagonal list as polynomials in n."""
    a, b, k1, k2 = p.alpha, p.beta, p.k1, p.k2
    P = a + b
    base3 = -N * N - N * (P + 3)
    base4 = -N * N - N * (P + 4)
    base5 = -N * N - N * (P + 5)
    return [
        base3,
        base4 - (P - k1 + 3),
        base4 - (P - k2 + 2),
        base5 - (2 * P - k1 - k2 + 6),
        base3 + (P - k1 + 3),
        base4,
        base4 + (k2 - k1 + 1),
        base5 - (P - k2 + 3),
        base3 + (P - k2 + 2),
        base4 + (k1 - k2 - 1),
        base4,
        base5 - (P - k1 + 4),
        base3 + (2 * P - k1 - k2 + 6),
        base4 + (P - k2 + 3),
        base4 + (P - k1 + 4),
        base5,
    ]


def two_step_constants(p: TwoStepParams) -> dict[str, Fraction]:
    a, b, k1, k2 = p.alpha, p.beta, p.k1, p.k2
    P = a + b
    c11 = (a + 1) * (P - k1 + 4) * (P - k2 + 3) / ((P - k2 + 2) * (P - k1 + 3))
    c23 = Fraction(k1 - k2) * (b - k1 + 2) / ((k1 - k2 - 1) * (P - k1 + 3) * (P - k2 + 3))
    c32 = Fraction(k1 - k2 - 2) * (b - k2 + 1) / ((k1 - k2 - 1) * (P - k1 + 4) * (P - k2 + 2))
    num22 = (
        18 + k1**2 * a * b - k2**2 * a**2 + 21 * a - k2**2 * a * b + 9 * k2 * a * b - k1**2 * k2 * a
        + k2 * a**3 + k1 * k2**2 * a + k2 * a * b**2 - k1 * a * b**2
        + 2 * k2 * a**2 * b - 2 * k1 * a**2 * b - k1 * k2 * a - 11 * k1 * a * b + k1**2 * a**2 - 27 * k1
        + 12 * b + 15 * k2 - 5 * k2**2 + 8 * a**2 + 8 * k1**2
        + a**3 - k1 * a**3 - k1 * k2 - 27 * k1 * a + 6 * k1**2 * a - 4 * k2**2 * a - 9 * k1 * a**2
        + 7 * k2 * a**2 - 2 * k1**2 * k2 + 2 * k1 * k2**2 + 17 * k2 * a
        + 2 * b**2 + a * b**2 + 10 * a * b + 2 * a**2 * b - 2 * k1 * b**2 - 15 * k1 * b + 2 * k2 * b**2
        + 11 * k2 * b + 2 * k1**2 * b - 2 * k2**2 * b
    )
    num33 = (
        16 + k1**2 * a * b - k2**2 * a**2 + 18 * a - k2**2 * a * b + 9 * k2 * a * b - k1**2 * k2 * a
        + k2 * a**3 + k1 * k2**2 * a + k2 * a * b**2 - k1 * a * b**2
        + 2 * k2 * a**2 * b - 2 * k1 * a**2 * b + 5 * k1 * k2 * a - 11 * k1 * a * b + k1**2 * a**2
        - 18 * k1 + 14 * b + 4 * k2 - 10 * k2**2 + 8 * a**2 + 3 * k1**2
        + a**3 - k1 * a**3 + 9 * k1 * k2 - 21 * k1 * a + 3 * k1**2 * a - 7 * k2**2 * a - 9 * k1 * a**2
        + 7 * k2 * a**2 - 2 * k1**2 * k2 + 2 * k1 * k2**2 + 11 * k2 * a
        + 2 * b**2 + a * b**2 + 10 * a * b + 2 * a**2 * b - 2 * k1 * b**2 - 15 * k1 * b + 2 * k2 * b**2
        + 11 * k2 * b + 2 * k1**2 * b - 2 * k2**2 * b
    )
    num44 = (
        24 + 23 * a - k2 * a * b + k1 * k2 * a - k1 * a * b - 7 * k1 + 17 * b - 10 * k2 + 8 * a**2
        + a**3 + 3 * k1 * k2 - 5 * k1 * a - k1 * a**2 - k2 * a**2 - 6 * k2 * a + 3 * b**2 + a * b**2
        + 11 * a * b + 2 * a**2 * b - 3 * k1 * b - 3 * k2 * b
    )
    c22 = num22 / ((k2 - k1 + 1) * (P - k1 + 3) * (P - k2 + 3))
    c33 = num33 / ((k2 - k1 + 1) * (P - k1 + 4) * (P - k2 + 2))
    # the printed denominator is (P-k1+4)(P-k2+2); only (P-k2+3) keeps D_hyp
    # similar to D1 (trace of X must equal 4*alpha+8)
    c44 = num44 / ((P - k1 + 4) * (P - k2 + 3))
    c44_printed = num44 / ((P - k1 + 4) * (P - k2 + 2))
    return {"C11": c11, "C22": c22, "C23": c23, "C32": c32, "C33": c33, "C44": c44, "C44_printed": c44_printed}


def d3_entries(p: TwoStepParams) -> dict[str, Fraction]:
    """c22, c33 of the D3 display and the n-free value used for c44."""
    a, b, k1, k2 = p.alpha, p.beta, p.k1, p.k2
    c22 = (
        a * k1 - 2 * k1 * b - 5 * k1 + 2 * k2 * b + 5 * k2 - 8 * k1 * k2 - a * k2 + k1**2 * b
        + 5 * k1**2 + k2**2 * b + 3 * k2**2 - k1**3 + 2 * k1**2 * k2 - 2 * k1 * k2 * b - a - k1 * k2**2
    )
    c33 = -a * k2 - 4 * k2 - k2 * b + k1 * k2 - 2 + a * k1 + k1 * b + 4 * k1 - a - k1**2
    c44 = k1 * (a + b - k1 + 2) + 2 * a + 2 * b - k2 + 6
    return {"c22": c22, "c33": c33, "c44": c44}


def d3_c44_displayed(p: TwoStepParams, n) -> Fraction:
    """The c44 entry exactly as printed, which carries a stray dependence on n."""
    a, b, k1, k2 = p.alpha, p.beta, p.k1, p.k2
    return -k2 + 2 * a + 2 * k1 + a * k1 + b * k1 - k1**2 + 4 + 2 * as_q(n)


def _two_step(p: TwoStepParams) -> FamilyBundle:
    a, b, k1, k2 = p.alpha, p.beta, p.k1, p.k2
    P = a + b
    K = Fraction(k2 - k1 + 1)
    d0, d1_, d2_ = Fraction(k1 - k2), Fraction(k1 - k2 - 1), Fraction(k1 - k2 - 2)
    half = Fraction(1, 2)
    w1, w2, w3, w4 = two_step_w(p)
    W = JacobiMatrixWeight(a, b, _grid([[w1 * T * T, 0, 0, 0], [0, w2 * T, 0, 0], [0, 0, w3 * T, 0], [0, 0, 0, w4]]))

    d_orig = _original_operator(
        [[a + 3, 0, 0, 0], [0, a + 2, 0, 0], [0, 0, a + 2, 0], [0, 0, 0, a + 1]],
        [[a + b + 4, 0, 0, 0], [0, a + b + 3, 0, 0], [0, 0, a + b + 3, 0], [0, 0, 0, a + b + 2]],
        [
            [k1 + k2 - 2 * (b + 1), (k2 - k1 + 2) * (b - k2 + 1) / K, (k2 - k1) * (b - k1 + 2) / K, 0],
            [0, -(b - k1 + 2), 0, b - k1 + 2],
            [0, 0, -(b - k2 + 1), b - k2 + 1],
            [0, 0, 0, 0],
        ],
        [
            [0, 0, 0, 0],
            [k2 + 1, -(k2 + 1), 0, 0],
            [k1, 0, -k1, 0],
            [0, k1 * (k2 - k1 + 2) / K, (k2 - k1) * (k2 + 1) / K, -(k1 + k2)],
        ],
    )
    L = _m([[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, (k2 - k1 + 2) / K, (k2 - k1) / K, 1]])
    dpsi = _grid([[1, 0, 0, 0], [0, ONE_MINUS_T, 0, 0], [0, 0, ONE_MINUS_T, 0], [0, 0, 0, ONE_MINUS_T * ONE_MINUS_T]])
    psi_star = MatrixPoly.const(L) @ dpsi
    W_tilde = JacobiMatrixWeight(a, b, psi_star.T @ W.M @ psi_star)

    tt = MatrixPoly.scalar(TT, 4)
    a1 = _lin(
        [[a + 3, 0, 0, 0], [-1, a + 2, 0, 0], [-1, 0, a + 2, 0], [0, -(k2 - k1 + 2) / K, -(k2 - k1) / K, a + 1]],
        [[a + b + 4, 0, 0, 0], [0, a + b + 5, 0, 0], [0, 0, a + b + 5, 0], [0, 0, 0, a + b + 6]],
    )

    def a0_with(entry13):
        return MatrixPoly.const(
            _m(
                [
                    [0, (k2 - k1 + 2) * (b - k2 + 1) / K, entry13, 0],
                    [0, -(a + b + 2) + k2, 0, b - k1 + 2],
                    [0, 0, -(a + b + 3) + k1, b - k2 + 1],
                    [0, 0, 0, -2 * (a + b + 3) + k1 + k2],
                ]
            )
        )

    # the conjugated operator is printed twice; the two prints differ in one entry
    d_tilde_printed = _op(tt, a1, a0_with((k2 - k1) * (a - k1 + 2) / K))
    d1 = _op(tt, a1, a0_with((k2 - k1) * (b - k1 + 2) / K))
    d_tilde = d1

    b33 = (
        2 - 2 * a * k2 * k1 - 2 * a * k1 - 2 * k1 * k2 * b - 8 * k1 * k2 - k1**3 + a + 2 * k1**2 * k2
        + 2 * k2 * b + k1**2 * b + k2**2 * b - 2 * k1 * b + 2 * a * k2 + a * k2**2 + a * k1**2
        + 7 * k2 - 7 * k1 + 3 * k2**2 + 5 * k1**2 - k1 * k2**2
    )
    B2 = _grid(
        [
            [0, 0, 0, 0],
            [0, 0, 0, 0],
            [d1_ / d0 * T, 0, d1_ / d0 * TT, 0],
            [0, d2_ / d1_ * T, 1 / d1_ * T, TT],
        ]
    )
    B1 = _lin(
        [
            [-(b - k1 + 2), 0, -(b - k1 + 2), 0],
            [0, -(b - k1 + 2) * d2_ / d1_, -(b - k1 + 2) / d1_, -(b - k1 + 2)],
            [(P - k1 + 3) * d1_ / d0, -(b - k2 + 1) * d2_ / (d1_ * d0), b33 / (d1_ * d0), -(b - k2 + 1) / d0],
            [0, d2_ * (P - k1 + 4) / d1_, (P - k1 + 4) / d1_, P - k1 + 4],
        ],
        [
            [0, 0, -(b - k1 + 2), 0],
            [0, 0, 0, -(b - k1 + 2)],
            [0, 0, (P + 5) * d1_ / d0, -(b - k2 + 1) / d0],
            [0, 0, 0, P + 6],
        ],
    )
    B0 = MatrixPoly.const(
        _m(
            [
                [0, 0, (1 + k1) * (b - k1 + 2), 0],
                [0, 0, 0, (1 + k1) * (b - k1 + 2)],
                [0, 0, -(1 + k1) * (P - k1 + 3) * d1_ / d0, (1 + k1) * (b - k2 + 1) / d0],
                [0, 0, 0, -(1 + k1) * (P - k1 + 4)],
            ]
        )
    )
    d2 = _op(B2, B1, B0)

    de = d3_entries(p)
    c22, c33, c44 = de["c22"], de["c33"], de["c44"]
    C2 = _grid(
        [
            [0, 0, 0, 0],
            [1 / d2_ * T, 1 / d2_ * TT, 0, 0],
            [-T, 0, -TT, 0],
            [0, -T, 0, -TT],
        ]
    )

    def c1_with(entry12, entry13):
        return _lin(
            [
                [b - k1 + 1, entry12, entry13, 0],
                [(P - k2 + 2) / d2_, c22 / (d2_ * d1_), (b - k1 + 2) * d0 / (d2_ * d1_), (b - k1 + 2) * d1_ / d2_],
                [-(P - k1 + 3), (b - k2 + 1) / d1_, -c33 / d1_, 0],
                [0, -(c33 - b + k1 - 1) / d1_, d0 / d1_, -(P - k1 + 3)],
            ],
            [
                [0, -(b - k2 + 1) / d1_, d0 * (b - k1 + 2) / d1_, 0],
                [0, (P + 5) / d2_, 0, (b - k1 + 2) * d1_ / d2_],
                [0, 0, -(P + 5), 0],
                [0, 0, 0, -(P + 6)],
            ],
        )

    C0 = MatrixPoly.const(
        _m(
            [
                [0, (2 + k2) * (b - k2 + 1) / d1_, -(1 + k1) * d0 * (b - k1 + 2) / d1_, 0],
                [0, -(P - k2 + 2) * (2 + k2) / d2_, 0, (b - k1 + 2) * (k2 + 2 - k1**2 + k1 * k2) / d2_],
                [0, 0, (1 + k1) * (P - k1 + 3), -(b - k2 + 1)],
                [0, 0, 0, c44],
            ]
        )
    )
    d3_printed_13 = d0 * (b - k1 + 2) / (k1 - k2 + 1) if k1 - k2 + 1 != 0 else None
    d3 = _op(C2, c1_with(-(b - k2 + 1) / d1_, d0 * (b - k1 + 2) / d1_), C0)
    d3_printed = None if d3_printed_13 is None else _op(C2, c1_with((b - k2 + 1) / d1_, d3_printed_13), C0)

    consts = two_step_constants(p)
    V = Matrix.diag([0, -(P - k1 + 3), -(P - k2 + 2), -(2 * P - k1 - k2 + 6)])
    U = _m(
        [
            [P + 4, -1, -1, (2 * P - k1 - k2 + 6) / ((P - k2 + 2) * (P - k1 + 3))],
            [0, P + 5, 0, -d0 * (P - k1 + 4) / ((P - k1 + 3) * d1_)],
            [0, 0, P + 5, -d2_ * (P - k2 + 3) / (d1_ * (P - k2 + 2))],
            [0, 0, 0, P + 6],
        ]
    )
    X = _m(
        [
            [consts["C11"], (a + 1) * (P - k2 + 3) / ((P - k2 + 2) * (P - k1 + 3)),
             (a + 1) * (P - k1 + 4) / ((P - k2 + 2) * (P - k1 + 3)), 0],
            [d0 * (b - k1 + 2) / ((P - k1 + 3) * d1_), consts["C22"], consts["C23"], d0 * (a + 2) / ((P - k2 + 3) * d1_)],
            [d2_ * (b - k2 + 1) / (d1_ * (P - k2 + 2)), consts["C32"], consts["C33"], d2_ * (a + 2) / ((P - k1 + 4) * d1_)],
            [0, (P - k1 + 3) * (b - k2 + 1) / ((P - k1 + 4) * (P - k2 + 3)),
             (P - k2 + 2) * (b - k1 + 2) / ((P - k1 + 4) * (P - k2 + 3)), consts["C44"]],
        ]
    )
    d_hyp = second_order(X, U, V)

    t = two_step_t(p)
    z = Poly()
    lam_n = N * N + N * (P + 5) + k1 * (P - k1 + 2) + 2 * P - k2 + 6
    e23 = (N + (P - k1 + 3)) * (N + (P - k2 + 3)) * (N + k1) * (N + (k1 + 1))
    f32 = (N + (P - k1 + 4)) * (N + (P - k2 + 2)) * (N + (k2 + 1)) * (N + (k2 + 2))
    eig = {
        "D_hyp": _diag_seq(t[:4]),
        "D1": _diag_seq([t[0], t[2], t[1], t[3]]),
        "D_tilde": _diag_seq([t[0], t[2], t[1], t[3]]),
        "D2": _diag_seq(
            [
                z,
                z,
                -(N + (k1 + 1)) * (N + (P - k1 + 3)) * (d1_ / d0),
                -(N + (k1 + 1)) * (N + (P - k1 + 4)),
            ]
        ),
        "D3": _diag_seq(
            [
                z,
                -(N + (k2 + 2)) * (N + (P - k2 + 2)) * (1 / d2_),
                (N + (k1 + 1)) * (N + (P - k1 + 3)),
                lam_n,
            ]
        ),
        "E": EigenSeq([[e23 if (i, j) == (1, 2) else z for j in range(4)] for i in range(4)]),
        "F": EigenSeq([[f32 if (i, j) == (2, 1) else z for j in range(4)] for i in range(4)]),
    }
    A = _m([[1, -half, -half, 0], [0, half, 0, (k1 - k2 - 2) / (2 * K)], [0, 0, half, d0 / (2 * K)], [0, 0, 0, 0]])
    B = _m([[0, -half, -half, 0], [0, -1, 0, (k1 - k2 - 2) / (2 * K)], [0, 0, -1, d0 / (2 * K)], [0, 0, 0, -2]])
    ops = {"D_original": d_orig, "D_tilde": d_tilde, "D_hyp": d_hyp, "D1": d1, "D2": d2, "D3": d3}
    consts = dict(consts)
    consts.update({"b33": b33, "c22": c22, "c33": c33, "c44": c44})
    bundle = FamilyBundle("two-step", p, W, W_tilde, psi_star, ops, eig, A, B, consts, (X, U, V))
    bundle.notes.append("D_tilde entry (1,3) uses beta-k1+2 as conjugation gives; one print has alpha-k1+2")
    bundle.notes.append("D3 c44 uses the n-free value forced by Lambda_n(D3); the print carries +4+2n")
    bundle.notes.append("D3 C1(1,3) uses denominator k1-k2-1; the print has k1-k2+1 in the constant part")
    bundle.notes.append("D3 C1(1,2) constant part is -(beta-k2+1)/(k1-k2-1); the print has the opposite sign")
    bundle.printed = {"D_tilde": d_tilde_printed, "D1": d1, "D2": d2}
    if d3_printed is not None:
        bundle.printed["D3"] = d3_printed
    if d3_printed_13 is not None:
        bundle.constants["D3_C1_13_printed"] = d3_printed_13
    return bundle


# ---------------------------------------------------------------------------
# public API


def build_family(kind: str, params: Params | None = None, **kw) -> FamilyBundle:
    """Build every named object of a family.

    ``params`` may be passed directly, or as keywords (alpha, beta, k or k1, k2).
    """
    if params is None:
        params = OneStepParams(**kw) if kind == "one-step" else TwoStepParams(**kw)
    if kind == "one-step":
        if not isinstance(params, OneStepParams):
            raise ParameterError("one-step family needs OneStepParams", "kind")
        return _one_step(params)
    if kind == "two-step":
        if not isinstance(params, TwoStepParams):
            raise ParameterError("two-step family needs TwoStepParams", "kind")
        return _two_step(params)
    raise ValueError(f"unknown family kind {kind!r}")


def lambda_sequence(bundle: FamilyBundle, name: str) -> EigenSeq:
    try:
        return bundle.eigen[name]
    except KeyError:
        raise KeyError(f"no eigenvalue sequence named {name!r} for the {bundle.kind} family") from None


def pstar_zero(bundle: FamilyBundle, n: int) -> Matrix:
    """Displayed closed form of the constant term for the diagonal-V family, n >= 1.

    The displayed matrix is upper triangular; the eigenfunction P_n^* built by
    the recursion has the transposed, lower triangular, constant term, so this
    matrix is compared with P_n(0) = P_n^*(0)^T.
    """
    if n < 1:
        raise ValueError("closed form of P_n^*(0) is stated for n >= 1 only")
    sg = -1 if n % 2 else 1
    p = bundle.params
    a, b = p.alpha, p.beta
    P = a + b
    try:
        if bundle.kind == "one-step":
            k = p.k
            s = P - k
            p11 = sg * (s + n + 2) * (s + n + 3) * pochhammer(a + 1, n) / ((s + 3) * (s + 2) * pochhammer(P + n + 3, n))
            p12 = (2 * sg * n * (b - k + 1) * (s + n + 3) * pochhammer(a + 2, n - 1)
                   / ((k + n + 1) * (s + 4) * (s + 2) * pochhammer(P + n + 4, n - 1)))
            p13 = ZERO if n < 2 else (
                sg * n * (n - 1) * (b - k + 1) * (b - k + 2) * pochhammer(a + 3, n - 2)
                / ((k + n) * (k + n + 1) * (s + 3) * (s + 4) * pochhammer(P + n + 5, n - 2)))
            p22 = -sg * (s + 2) * (s + n + 4) * pochhammer(a + 2, n) / (n * (s + 4) * pochhammer(P + n + 4, n))
            p23 = (-sg * (b - k + 2) * (s + 2) * pochhammer(a + 3, n - 1)
                   / ((k + n) * (s + 4) * pochhammer(P + n + 5, n - 1)))
            p33 = sg * (s + 2) * (s + 3) * pochhammer(a + 3, n) / (n * (n + 1) * pochhammer(P + n + 5, n))
            return Matrix([[p11, p12, p13], [0, p22, p23], [0, 0, p33]])
        k1, k2 = p.k1, p.k2
        K = k2 - k1 + 1
        p11 = (sg * (P - k1 + n + 3) * (P - k2 + n + 2) * pochhammer(a + 1, n)
               / ((P - k1 + 3) * (P - k2 + 2) * pochhammer(P + n + 3, n)))
        p12 = (sg * n * (k2 - k1) * (b - k1 + 2) * (P - k2 + n + 2) * pochhammer(a + 2, n - 1)
               / ((k1 + n) * K * (P - k1 + 3) * (P - k2 + 3) * pochhammer(P + n + 4, n - 1)))
        p13 = (sg * n * (k2 - k1 + 2) * (b - k2 + 1) * (P - k1 + n + 3) * pochhammer(a + 2, n - 1)
               / ((k2 + n + 1) * K * (P - k1 + 4) * (P - k2 + 2) * pochhammer(P + n + 4, n - 1)))
        # printed as "n(n-1(" with an unbalanced parenthesis; read as n(n-1)
        p14 = ZERO if n < 2 else (
            sg * n * (n - 1) * (b - k2 + 1) * (b - k1 + 2) * pochhammer(a + 3, n - 2)
            / ((k1 + n) * (k2 + n + 1) * (P - k1 + 4) * (P - k2 + 3) * pochhammer(P + n + 5, n - 2)))
        p22 = (-sg * (P - k2 + n + 4) * (P - k1 + 3) * pochhammer(a + 2, n)
               / (n * (P - k2 + 3) * pochhammer(P + n + 4, n)))
        p24 = (-sg * (b - k2 + 1) * (P - k1 + 3) * pochhammer(a + 3, n - 1)
               / ((k2 + n + 1) * (P - k2 + 3) * pochhammer(P + n + 5, n - 1)))
        p33 = -sg * (P - k1 + n + 4) * (P - k2 + 2) * pochhammer(a + 2, n) / ((P - k1 + 4) * pochhammer(P + n + 4, n))
        p34 = (-sg * (b - k1 + 2) * (P - k2 + 2) * pochhammer(a + 3, n - 1)
               / ((k1 + n) * (P - k1 + 4) * pochhammer(P + n + 5, n - 1)))
        p44 = sg * (P - k1 + 3) * (P - k2 + 2) * pochhammer(a + 3, n) / (n * (n + 1) * pochhammer(P + n + 5, n))
        return Matrix([[p11, p12, p13, p14], [0, p22, 0, p24], [0, 0, p33, p34], [0, 0, 0, p44]])
    except ZeroDivisionError as exc:
        raise ParameterError(f"pole in a P_n^*(0) entry at n={n}", "p_ij denominator") from exc


def appendix_coeff(bundle: FamilyBundle, n: int, l: int, corrected: bool = False) -> Matrix:
    """Closed-form A_l^n (coefficient of t^(n-l)) for the D1 family."""
    if not 0 <= l <= n:
        raise ValueError("need 0 <= l <= n")
    p = bundle.params
    try:
        if bundle.kind == "one-step":
            return appendix.one_step_matrix(n, l, p.alpha, p.beta, p.k)
        return appendix.two_step_matrix(n, l, p.alpha, p.beta, p.k1, p.k2, corrected)
    except ZeroDivisionError as exc:
        raise ParameterError(f"pole in an appendix entry at n={n}, l={l}", "x_ij denominator") from exc


def ef_leading(bundle: FamilyBundle, corrected: bool = False) -> tuple[MatrixPoly, MatrixPoly]:
    """Displayed fourth-order coefficients G4 of E and H4 of F (two-step only).

    With ``corrected`` G4 takes the values recovered from Lambda_n(E): entry
    (2,1) changes sign and entry (4,3) has denominator k1-k2-1.
    """
    if bundle.kind != "two-step":
        raise ValueError("E and F exist for the two-step family only")
    p = bundle.params
    b, k1, k2 = p.beta, p.k1, p.k2
    d0, d1_, d2_ = Fraction(k1 - k2), Fraction(k1 - k2 - 1), Fraction(k1 - k2 - 2)
    om = ONE_MINUS_T
    g = _grid(
        [
            [0, 0, 0, 0],
            [(1 if corrected else -1) / d2_ * om, 0, (1 / d2_) * om * om, 0],
            [0, 0, 0, 0],
            [-1 / d1_, 0, -(1 / (d1_ if corrected else d2_)) * om, 0],
        ]
    )
    h = _grid(
        [
            [0, 0, 0, 0],
            [0, 0, 0, 0],
            [(1 / d0) * om, (1 / d0) * om * om, 0, 0],
            [Fraction(1, k2 - k1 + 1), Fraction(1, k2 - k1 + 1) * om, 0, 0],
        ]
    )
    t2 = MatrixPoly.scalar(T * T, 4)
    G4 = (t2 @ g) * ((b - k1 + 2) * d0 / (b - k2 + 1))
    H4 = (t2 @ h) * ((b - k2 + 1) * d2_ / (b - k1 + 2))
    return G4, H4


DEFAULT_ONE_STEP = OneStepParams(Fraction(3), Fraction(5), 2)
DEFAULT_TWO_STEP = TwoStepParams(Fraction(2), Fraction(6), 2, 4)
SECOND_ONE_STEP = OneStepParams(Fraction(7, 2), Fraction(11, 2), 2)
SECOND_TWO_STEP = TwoStepParams(Fraction(7, 2), Fraction(11, 2), 2, 4)


def default_bundle(kind: str) -> FamilyBundle:
    return build_family(kind, DEFAULT_ONE_STEP if kind == "one-step" else DEFAULT_TWO_STEP)
