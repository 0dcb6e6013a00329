import random
from fractions import Fraction as Q

import mpmath
import pytest

from conftest import bundle, family
from mvop.core import Matrix, MatrixPoly, Poly
from mvop.diffops import MatDiffOp
from mvop.families import DEFAULT_ONE_STEP, OneStepParams, one_step_w, one_step_w_printed
from mvop.weights import (
    JacobiMatrixWeight,
    WeightError,
    conjugate_weight,
    diagonal_weight,
    inner_product,
    normalized_moment,
    positivity_probe,
    skew_bracket,
    symmetry_check,
    verify_weight_ode,
)


@pytest.mark.parametrize("a,b,m,p,expected", [(0, 0, 1, 0, Q(1, 2)), (0, 0, 1, 1, Q(1, 6)), (3, 5, 1, 0, Q(2, 5))])
def test_normalized_moment_examples(a, b, m, p, expected):
    assert normalized_moment(a, b, m, p) == expected


def test_moment_against_beta_function():
    mpmath.mp.dps = 40
    for a, b in ((Q(3), Q(5)), (Q(7, 2), Q(11, 2)), (Q(-1, 2), Q(1, 3))):
        base = mpmath.beta(a + 1, b + 1)
        for m in range(4):
            for p in range(3):
                ref = mpmath.beta(a + 1 + m, b + 1 + p) / base
                got = normalized_moment(a, b, m, p)
                assert abs(mpmath.mpf(got.numerator) / got.denominator - ref) < mpmath.mpf(10) ** -35


def test_weight_rejects_bad_exponents():
    with pytest.raises(WeightError):
        JacobiMatrixWeight(Q(-1), Q(0), MatrixPoly.identity(1))


def rand_poly(rng, size, deg):
    return MatrixPoly([Matrix([[Q(rng.randint(-3, 3)) for _ in range(size)] for _ in range(size)]) for _ in range(deg + 1)], size)


def test_inner_product_properties():
    w = bundle("one-step").W_tilde
    rng = random.Random(2)
    p, q, r = rand_poly(rng, 3, 2), rand_poly(rng, 3, 3), rand_poly(rng, 3, 1)
    assert inner_product(p, q, w) == inner_product(q, p, w).T
    a = Q(-5, 7)
    assert inner_product(p * a + q, r, w) == inner_product(p, r, w).scale(a) + inner_product(q, r, w)
    g = inner_product(MatrixPoly.identity(3), MatrixPoly.identity(3), w)
    assert g.is_symmetric() and all(Matrix([row[:k] for row in g.rows[:k]]).det() > 0 for k in (1, 2, 3))


def test_orthogonality_example():
    fam = family("one-step")
    assert inner_product(fam.p(2), fam.p(5), bundle("one-step").W_tilde).is_zero()


def test_skew_bracket():
    w = bundle("one-step").W_tilde
    i3 = MatrixPoly.identity(3)
    assert skew_bracket(i3, i3, w) == inner_product(i3, i3, w).T
    scalar = diagonal_weight(0, 0, [Poly([1]), Poly([1])])
    rng = random.Random(4)
    p, q = rand_poly(rng, 2, 2), rand_poly(rng, 2, 2)
    assert skew_bracket(p, q, scalar) == inner_product(q.T, p.T, scalar)


def test_symmetry_examples():
    b1, b2 = bundle("one-step"), bundle("two-step")
    assert symmetry_check(b1.operators["D_tilde"], b1.W_tilde, 8)
    assert symmetry_check(b2.operators["D3"], b2.W_tilde, 8)


def test_symmetry_failure_has_witness():
    b = bundle("one-step")
    op = b.operators["D1"] + MatDiffOp([Matrix.unit(3, 0, 1)], 3)
    r = symmetry_check(op, b.W_tilde, 2)
    assert not r and {"P", "Q", "lhs", "rhs"} <= set(r.witness)


def test_conjugate_weight():
    b = bundle("one-step")
    assert conjugate_weight(b.W, MatrixPoly.identity(3)) == b.W
    assert b.W_tilde.is_symmetric()


def test_positivity_probe():
    assert positivity_probe(bundle("one-step").W)
    assert positivity_probe(bundle("one-step").W_tilde)
    assert positivity_probe(diagonal_weight(0, 0, [Poly([1])] * 2))
    degenerate = diagonal_weight(0, 0, [Poly([1]), Poly()])
    assert not positivity_probe(degenerate)


def test_displayed_alpha_products():
    # the displayed products evaluate as stated, and vanish at alpha = 1
    assert one_step_w_printed(DEFAULT_ONE_STEP) == (3, 2, 1)
    assert one_step_w_printed(OneStepParams(Q(1), Q(5), 2))[0] == 0
    # the coefficients used for the family depend on beta and k only
    assert one_step_w(DEFAULT_ONE_STEP) == (6, 16, 20)
    assert one_step_w(OneStepParams(Q(1), Q(5), 2)) == (6, 16, 20)


def test_weight_ode():
    for kind in ("one-step", "two-step"):
        b = bundle(kind)
        assert verify_weight_ode(b.W_tilde, b.ode_A, b.ode_B)
    z = Matrix.zeros(3)
    assert not verify_weight_ode(bundle("one-step").W_tilde, z, z)
