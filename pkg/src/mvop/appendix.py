"""Closed-form coefficient tables for the one-step and two-step families.

Each entry is a product of a polynomial in (n, l, alpha, beta, k...) and a
ratio of Gamma functions.  Gamma ratios are never evaluated numerically: the
arguments are grouped by their parameter part (the coefficients of alpha and
beta) and paired inside each group, so every pair differs by an integer and
collapses to a Pochhammer product.  Integer arguments are handled with
factorials and the convention 1/Gamma(nonpositive integer) = 0.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from math import factorial
from typing import NamedTuple, Sequence

from .core import Matrix, ONE, ZERO


class GammaPoleError(ArithmeticError):
    """A Gamma ratio has a genuine pole or cannot be paired."""


class G(NamedTuple):
    """Gamma argument  c + ca*alpha + cb*beta  with integer c, ca, cb."""

    c: int
    ca: int = 0
    cb: int = 0

    def value(self, alpha: Fraction, beta: Fraction) -> Fraction:
        return self.c + self.ca * alpha + self.cb * beta


def _rising(z: Fraction, m: int) -> Fraction:
    out = ONE
    for i in range(m):
        out *= z + i
    return out


def gamma_ratio(num: Sequence[G], den: Sequence[G], alpha, beta) -> Fraction:
    """prod Gamma(num) / prod Gamma(den), evaluated as a rational number."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    groups: dict[tuple[int, int], tuple[list[int], list[int]]] = defaultdict(lambda: ([], []))
    for g in num:
        groups[(g.ca, g.cb)][0].append(g.c)
    for g in den:
        groups[(g.ca, g.cb)][1].append(g.c)

    out = ONE
    zero_from_den = False
    for (ca, cb), (ns, ds) in sorted(groups.items()):
        shift = ca * alpha + cb * beta
        if (ca, cb) == (0, 0):
            # plain integer arguments: factorials and reciprocal-pole zeros
            for c in ns:
                z = int(c + shift)
                if z <= 0:
                    raise GammaPoleError(f"Gamma({z}) in numerator")
                out *= factorial(z - 1)
            for c in ds:
                z = int(c + shift)
                if z <= 0:
                    zero_from_den = True
                else:
                    out /= factorial(z - 1)
            continue
        if len(ns) != len(ds):
            raise GammaPoleError(f"unpaired Gamma arguments in class alpha*{ca}+beta*{cb}")
        for cn, cd in zip(sorted(ns), sorted(ds)):
            z = cd + shift
            m = cn - cd
            if m >= 0:
                out *= _rising(z, m)
            else:
                d = _rising(z + m, -m)
                if d == 0:
                    raise GammaPoleError(f"pole in Gamma ratio at argument {z + m}")
                out /= d
    return ZERO if zero_from_den else out


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


# Gamma arguments shared by every entry
def _common(n: int, l: int):
    return dict(
        gn1=G(n + 1),
        gl1=G(l + 1),
        gnl=G(n - l + 1),
        gl=G(l),
        glm1=G(l - 1),
        ga_l=G(l - 2 - n, -1),  # Gamma(l-2-alpha-n)
        ga0=G(-n, -1),  # Gamma(-alpha-n)
        ga1=G(-n - 1, -1),
        ga2=G(-n - 2, -1),
        gab2=G(-2 - 2 * n, -1, -1),  # Gamma(-2-beta-alpha-2n)
        gab3=G(-3 - 2 * n, -1, -1),
        gab4=G(-4 - 2 * n, -1, -1),
        gabl2=G(l - 2 - 2 * n, -1, -1),  # Gamma(l-2-beta-alpha-2n)
        gabl3=G(l - 3 - 2 * n, -1, -1),
        gabl4=G(l - 4 - 2 * n, -1, -1),
    )


def one_step_entry(i: int, j: int, n: int, l: int, alpha, beta, k) -> Fraction:
    """x_ij (1-based) of the one-step table at (n, l)."""
    a, b, k = Fraction(alpha), Fraction(beta), Fraction(k)
    g = _common(n, l)
    s = _sign(l)
    gr = lambda num, den: gamma_ratio(num, den, a, b)  # noqa: E731
    if (i, j) == (1, 1):
        p = (
            5 * n**2 + 2 * n + 2 * k - 2 * l + 2 * l * n**2 + 2 * l * n
            - 3 * k * l**2 + 5 * k * l + k**2 * l**2 - 3 * k**2 * l + 7 * n * k + 2 * k**2 + 2 * l**2
            - l * b**2 - 3 * l * b + 3 * l**2 * b + 4 * k * l * b + 3 * k**2 * n + n * a**2
            + 3 * n * a + 5 * n**2 * a + k**2 * n**2 + 7 * k * n**2 + 2 * k * n**3 + n**2 * a**2
            + 2 * n**3 * a - 2 * k * l * n**2 - 2 * k**2 * n * l + 4 * a * k * n**2 + 2 * a * k**2 * n
            + 2 * a**2 * k * n + 2 * l * n**2 * b - 2 * a * k * n * l + 2 * a * l * n * b + 2 * k * n * l * b
            + n**4 + 2 * n * l * b + 8 * a * k * n + 2 * a * l * n + 4 * n**3 + 2 * a * k * l
            + 3 * a * k**2 + 3 * a * k + a**2 * k**2 - 2 * a * k**2 * l + a**2 * k + l**2 * b**2
            - 2 * k * l**2 * b + 2 * a * k * l * b
        )
        r = gr([g["gn1"], g["ga_l"], g["gab2"]], [g["gl1"], g["gnl"], g["ga0"], g["gabl2"]])
        return s * p * r / ((k + n + 1) * (k + n))
    if (i, j) == (1, 2):
        p = n * a + a * k + l * b + 2 * l + n * k - k * l + 2 * k + n**2 + 2 * n
        r = gr([g["gab3"], g["ga_l"], g["gn1"]], [g["gnl"], g["gabl3"], g["ga1"], g["gl1"]])
        return -s * p * r / (k + n)
    if (i, j) == (1, 3):
        return s * gr([g["gn1"], g["ga_l"], g["gab4"]], [g["gl1"], g["gnl"], g["ga2"], g["gabl4"]])
    if (i, j) == (2, 1):
        p = n * a + a * k + l * b + 2 * l - b - 2 + n * k - k * l + 2 * k + n**2 + n
        r = gr([g["gab2"], g["ga_l"], g["gn1"]], [g["gnl"], g["gabl3"], g["ga0"], g["gl"]])
        return s * p * r / ((k + n) * (k + n + 1))
    if (i, j) == (2, 2):
        p = (
            -4 * l * n * k + 4 * n**2 + 4 * n + 4 * k + 12 * l - l * n**2
            + 4 * l * n + 2 * k * l**2 - 10 * k * l + k**2 * l + 2 * n * k - 2 * k**2 - 4 * l**2
            + 2 * k * b + 2 * l * b**2 + 10 * l * b - 2 * l**2 * b + 2 * l * a * b + a * k * b
            - 3 * k * l * b + n**2 * b - k**2 * n + n * a**2 + 2 * n * b + 4 * n * a + 2 * n**2 * a
            + 3 * n * l * b + k * n * b + a * k * n - a * l * n + n * a * b
            + n**3 - 3 * a * k * l - a * k**2 + 4 * a * k + 4 * l * a + a**2 * k
        )
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl1"], g["gnl"], g["ga1"], g["gabl3"]])
        return s * p * r / (2 * (b + 1 - k) * (k + n))
    if (i, j) == (2, 3):
        p = b + 3 + a - k + n - l
        r = gr([g["gab4"], g["ga_l"], g["gn1"]], [g["gabl4"], g["ga2"], g["gnl"], g["gl1"]])
        return -s * p * r / (b + 1 - k)
    if (i, j) == (3, 1):
        r = gr([g["gn1"], g["ga_l"], g["gab2"]], [g["glm1"], g["gnl"], g["ga0"], g["gabl4"]])
        return s * r / ((k + n) * (k + n + 1))
    if (i, j) == (3, 2):
        p = b + 3 + a - k + n - l
        r = gr([g["gab3"], g["ga_l"], g["gn1"]], [g["gabl4"], g["gnl"], g["ga1"], g["gl"]])
        return s * p * r / ((k + n) * (b + 1 - k))
    if (i, j) == (3, 3):
        p = (b + 4 + a - k + n - l) * (b + 3 + a - k + n - l)
        r = gr([g["gab4"], g["ga_l"], g["gn1"]], [g["gabl4"], g["ga2"], g["gnl"], g["gl1"]])
        return s * p * r / ((b + 1 - k) * (b + 2 - k))
    raise KeyError((i, j))


def two_step_entry(i: int, j: int, n: int, l: int, alpha, beta, k1, k2, corrected: bool = False) -> Fraction:
    """x_ij (1-based) of the two-step table at (n, l).

    With ``corrected`` the x21 factor ends in n^2 + n, which is what the
    coefficient recursion produces; the table as printed has n^2 - n.
    """
    a, b = Fraction(alpha), Fraction(beta)
    k1, k2 = Fraction(k1), Fraction(k2)
    g = _common(n, l)
    s = _sign(l)
    gr = lambda num, den: gamma_ratio(num, den, a, b)  # noqa: E731
    if (i, j) == (1, 1):
        p = (
            -l * n**2 * k1 - l * n**2 * k2 + a * k2 * l * b - k2 * l**2 * b
            - k1 * l**2 * b + 5 * n**2 + 2 * k1 * l * b + a * k1 * l * b + 2 * k2 * l * b + 2 * n * k2
            + 5 * n * k1 + 2 * k1 * k2 - l * b**2 + 3 * l**2 * b + 3 * n**2 * k2
            + 4 * n**2 * k1 - 3 * l * b + 3 * n * k1 * k2 - k1 * l**2 - 2 * l + 2 * n + 3 * a * k1
            + 2 * k1 + 2 * l**2 - 2 * k2 * l**2 + 4 * k2 * l + k1 * l + l * n * k2
            - l * n * k1 + 2 * l * n + 2 * l * n**2 + k1 * k2 * l**2 - 3 * k1 * k2 * l + l**2 * b**2
            + a**2 * k1 + a**2 * k1 * k2 + 3 * a * k1 * k2 + k1 * n**3 + 2 * a * k2 * l
            + 2 * a * k1 * k2 * n - a * k1 * n * l - a * k2 * n * l + k1 * n * l * b + k2 * n**3
            + 5 * n**2 * a + 2 * n * l * b + 4 * n**3 + k1 * k2 * n**2 + k2 * n * l * b
            + 3 * a * k2 * n + 2 * a * k2 * n**2 + 5 * a * k1 * n + 2 * a * k1 * n**2
            + 2 * a * n * l + a**2 * k1 * n + n * a**2 * k2 + 3 * n * a + n * a**2 - 2 * k1 * k2 * n * l
            - 2 * a * k1 * k2 * l + 2 * a * n * l * b + 2 * n**3 * a + n**4 + 2 * l * n**2 * b + n**2 * a**2
        )
        r = gr([g["gn1"], g["ga_l"], g["gab2"]], [g["gl1"], g["gnl"], g["ga0"], g["gabl2"]])
        return s * p * r / ((n + k2 + 1) * (k1 + n))
    if (i, j) == (1, 2):
        p = 2 * l + 2 * k1 + a * k1 + l * b + n**2 + n * a + 2 * n - k1 * l + n * k1
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl1"], g["gnl"], g["ga1"], g["gabl3"]])
        return -s * p * r / (k1 + n)
    if (i, j) == (1, 3):
        p = 2 * k2 + 2 + a + l + n**2 + 3 * n + a * k2 + n * k2 + n * a + l * b - k2 * l
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gabl3"], g["ga1"], g["gnl"], g["gl1"]])
        return -s * p * r / (n + k2 + 1)
    if (i, j) == (1, 4):
        return s * gr([g["gn1"], g["ga_l"], g["gab4"]], [g["gl1"], g["gnl"], g["ga2"], g["gabl4"]])
    if (i, j) == (2, 1):
        p = n * a + a * k1 + l * b + 2 * l - b - 2 + n * k1 - k1 * l + 2 * k1 + n**2 + (n if corrected else -n)
        r = gr([g["gn1"], g["ga_l"], g["gab2"]], [g["gl"], g["gnl"], g["ga0"], g["gabl3"]])
        return s * p * r / ((k1 + n) * (n + k2 + 1))
    if (i, j) == (2, 2):
        p = (
            l * n**2 * k1 - l * n**2 * k2 + k2**2 * k1 * l + 2 * n * k1**2 * l - 2 * k2**2 * l
            - k1**2 * k2 * l + a * k2 * l * b - k2 * l**2 * b + k1 * l**2 * b + 4 * n**2 + a * k1 * b
            + 2 * k1 * k2 * b - k2**2 * l * b - k1 * l * b**2 - 6 * k1 * l * b - a * k1 * l * b
            + a * k1 * k2 * b + k1**2 * l * b + k2 * l * b**2 + 3 * k2 * l * b + 2 * n * k2 + 2 * k1 * k2
            - 4 * k1**2 - k1**2 * b * n + 2 * l * b**2 + 2 * a * l * b - 2 * l**2 * b
            + 3 * n**2 * k2 - 2 * n * k2**2 - 3 * n**2 * k1 + 10 * l * b + 2 * k1 * b - k1**2 * l**2
            + 4 * k1**2 * l - 2 * k2**2 * k1 - 4 * n * k1**2 + 2 * k1**2 * k2 + 5 * n * k1 * k2
            + 4 * k1 * l**2 + 12 * l + 4 * n + 4 * a * k1 + 4 * a * l + 4 * k1 - 4 * l**2
            - 2 * k1**2 * b - 2 * k2 * l**2 + 2 * k2 * l - 12 * k1 * l - 4 * l * n * k1
            + 4 * l * n - l * n**2 + k1 * k2 * l**2 - k1 * k2 * l - a**2 * k1**2 - k1**2 * b * a
            + a**2 * k1 - 4 * a * k1**2 + a**2 * k1 * k2 + 3 * a * k1 * k2 + a * k1**2 * k2
            - a * k2**2 * k1 - k1 * n**3 - 5 * a * k1 * l + 2 * a * k2 * l + k1 * k2 * n * b
            + 3 * a * k1 * k2 * n + a * k1 * n * l - a * k2 * n * l + n**2 * b - k1 * n * l * b
            - a * k1 * n * b + a * k2 * n * b + k2 * n**3 + 2 * n**2 * a - k1**2 * n**2 - k2**2 * n**2
            + 2 * n * b - k2**2 * k1 * n + k1**2 * k2 * n + 3 * n * l * b - k1 * n**2 * b
            - k1 * n * b + k2 * n**2 * b + 2 * k2 * n * b + n**3 + 2 * k1 * k2 * n**2 + k2 * n * l * b
            + 3 * a * k2 * n + 2 * a * k2 * n**2 - 2 * a * k1 * n - 2 * a * k1 * n**2
            - n * a * k2**2 - 2 * a * k1**2 * n - a * n * l - a**2 * k1 * n + n * a**2 * k2
            + 4 * n * a + n * a**2 + n * a * b - 2 * k1 * k2 * n * l + 2 * a * k1**2 * l
            - 2 * a * k1 * k2 * l
        )
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl1"], g["gnl"], g["ga1"], g["gabl3"]])
        return s * p * r / ((b + 1 - k2) * (k1 + n) * (k2 - k1 + 2))
    if (i, j) == (2, 3):
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl"], g["gnl"], g["ga1"], g["gabl4"]])
        return -s * r / (n + k2 + 1)
    if (i, j) == (2, 4):
        p = b + 3 + a - k2 + n - l
        r = gr([g["gn1"], g["ga_l"], g["gab4"]], [g["gabl4"], g["ga2"], g["gnl"], g["gl1"]])
        return -s * p * r / (b + 1 - k2)
    if (i, j) == (3, 1):
        p = n * a + a + a * k2 + l * b + l - b + n * k2 - k2 * l + 2 * k2 + n**2 + 2 * n
        r = gr([g["gn1"], g["ga_l"], g["gab2"]], [g["gl"], g["gnl"], g["ga0"], g["gabl3"]])
        return s * p * r / ((k1 + n) * (n + k2 + 1))
    if (i, j) == (3, 2):
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl"], g["gnl"], g["ga1"], g["gabl4"]])
        return -s * r / (k1 + n)
    if (i, j) == (3, 3):
        p = (
            6 + l * n**2 * k1 - 2 * l * n * k2**2 - l * n**2 * k2 + k2**2 * k1 * l
            - 5 * k2**2 * l - k1**2 * k2 * l + a * k2 * l * b - k2 * l**2 * b + k1 * l**2 * b + 6 * n**2
            - a * k1 * b + a * k2**2 * b - 2 * k1 * k2 * b + 2 * a * k2 * b - k2**2 * l * b
            - k1 * l * b**2 - 5 * k1 * l * b - a * k1 * l * b - a * k1 * k2 * b + k1**2 * l * b
            + k2 * l * b**2 + 4 * k2 * l * b + a**2 + 16 * n * k2 - 14 * n * k1 - 10 * k1 * k2
            + 2 * k1**2 + 6 * k2**2 + a * b + 7 * n**2 * k2 + 5 * n * k2**2 - 7 * n**2 * k1 - l * b
            - 2 * k1 * b + k1**2 * l - 2 * k2**2 * k1 + 3 * n * k1**2 + 2 * k1**2 * k2
            + k2**2 * l**2 + 2 * k2**2 * b - 9 * n * k1 * k2 + k1 * l**2 - 3 * l + 4 * k2 * b + 11 * n
            + 10 * a * k2 - 6 * a * k1 - a * l + 12 * k2 - 8 * k1 + 5 * a
            - k2 * l**2 - 2 * k1 * l - 2 * l * n * k2 + 2 * l * n * k1 - 4 * l * n - l * n**2
            - k1 * k2 * l**2 + 5 * k1 * k2 * l + a**2 * k2**2 - a**2 * k1 + 2 * a**2 * k2 + a * k1**2
            + 5 * a * k2**2 - a**2 * k1 * k2 - 7 * a * k1 * k2 + a * k1**2 * k2 + 2 * b
            - a * k2**2 * k1 - 2 * a * k2**2 * l - k1 * n**3 - a * k2 * l - k1 * k2 * n * b
            - 3 * a * k1 * k2 * n + a * k1 * n * l - a * k2 * n * l + n**2 * b - k1 * n * l * b
            - a * k1 * n * b + a * k2 * n * b + k2 * n**3 + 2 * n**2 * a + k1**2 * n**2 + k2**2 * n**2
            + 3 * n * b - k2**2 * k1 * n + k1**2 * k2 * n + k2**2 * n * b - n * l * b - k1 * n**2 * b
            - 3 * k1 * n * b + k2 * n**2 * b + 4 * k2 * n * b + n**3 - 2 * k1 * k2 * n**2
            + k2 * n * l * b + 9 * a * k2 * n + 2 * a * k2 * n**2 - 8 * a * k1 * n - 2 * a * k1 * n**2
            + 2 * n * a * k2**2 + a * k1**2 * n - a * n * l - a**2 * k1 * n + n * a**2 * k2
            + 7 * n * a + n * a**2 + n * a * b + 2 * k1 * k2 * n * l + 2 * a * k1 * k2 * l
        )
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl1"], g["gnl"], g["ga1"], g["gabl3"]])
        return -s * p * r / ((n + k2 + 1) * (k1 - k2) * (b + 2 - k1))
    if (i, j) == (3, 4):
        p = b + 4 + a - k1 + n - l
        r = gr([g["gn1"], g["ga_l"], g["gab4"]], [g["gl1"], g["gnl"], g["ga2"], g["gabl4"]])
        return -s * p * r / (b + 2 - k1)
    if (i, j) == (4, 1):
        r = gr([g["gn1"], g["ga_l"], g["gab2"]], [g["glm1"], g["gnl"], g["ga0"], g["gabl4"]])
        return s * r / ((k1 + n) * (n + k2 + 1))
    if (i, j) == (4, 2):
        p = b + 3 + a - k2 + n - l
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl"], g["gnl"], g["ga1"], g["gabl4"]])
        return s * p * r / ((k1 + n) * (b + 1 - k2))
    if (i, j) == (4, 3):
        p = b + 4 + a - k1 + n - l
        r = gr([g["gn1"], g["ga_l"], g["gab3"]], [g["gl"], g["gnl"], g["ga1"], g["gabl4"]])
        return s * p * r / ((n + k2 + 1) * (b + 2 - k1))
    if (i, j) == (4, 4):
        p = (b + 3 + a - k2 + n - l) * (b + 4 + a - k1 + n - l)
        r = gr([g["gn1"], g["ga_l"], g["gab4"]], [g["gl1"], g["gnl"], g["ga2"], g["gabl4"]])
        return s * p * r / ((b + 1 - k2) * (b + 2 - k1))
    raise KeyError((i, j))


def one_step_matrix(n: int, l: int, alpha, beta, k) -> Matrix:
    return Matrix([[one_step_entry(i, j, n, l, alpha, beta, k) for j in (1, 2, 3)] for i in (1, 2, 3)])


def two_step_matrix(n: int, l: int, alpha, beta, k1, k2, corrected: bool = False) -> Matrix:
    return Matrix(
        [[two_step_entry(i, j, n, l, alpha, beta, k1, k2, corrected) for j in (1, 2, 3, 4)] for i in (1, 2, 3, 4)]
    )
