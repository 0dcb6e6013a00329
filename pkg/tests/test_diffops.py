import random
from fractions import Fraction as Q

import pytest

from conftest import bundle, ef_ops, family
from mvop.core import Matrix, MatrixPoly, Poly
from mvop.diffops import (
    EigenSeq,
    MatDiffOp,
    NotPolynomial,
    apply,
    commutator,
    compose,
    conjugate_by,
    gamma_n,
    hypergeometric_data,
    is_hypergeometric_form,
    second_order,
)

T = Poly([0, 1])


def rand_poly(rng, size, deg):
    return MatrixPoly([Matrix([[Q(rng.randint(-3, 3)) for _ in range(size)] for _ in range(size)]) for _ in range(deg + 1)], size)


def rand_op(rng, size, order, deg):
    return MatDiffOp([rand_poly(rng, size, deg) for _ in range(order + 1)], size)


def test_apply_identity_and_derivative():
    p = MatrixPoly([Matrix([[1, 2], [3, 4]]), Matrix.identity(2)], 2)
    assert apply(MatDiffOp.identity(2), p) == p
    t2 = MatrixPoly([Matrix.zeros(2), Matrix.zeros(2), Matrix.identity(2)], 2)
    assert apply(MatDiffOp.derivative(1, 2), t2) == MatrixPoly([Matrix.zeros(2), Matrix.identity(2).scale(2)], 2)


def test_apply_one_step_d1_at_zero():
    b = bundle("one-step")
    p0 = family("one-step", N=2).pstar[0]
    s = b.params.alpha + b.params.beta - b.params.k
    assert apply(b.operators["D1"], p0) == p0 @ Matrix.diag([0, -(s + 2), -2 * (s + 3)])


def test_compose_basic():
    rng = random.Random(5)
    op = rand_op(rng, 2, 2, 2)
    assert compose(op, MatDiffOp.identity(2)) == op
    d = MatDiffOp.derivative(1, 2)
    assert compose(d, d) == MatDiffOp.derivative(2, 2)


def test_apply_compose_associative():
    rng = random.Random(9)
    for _ in range(4):
        a, b = rand_op(rng, 2, 2, 2), rand_op(rng, 2, 2, 1)
        p = rand_poly(rng, 2, 6)
        assert apply(compose(a, b), p) == apply(a, apply(b, p))


def test_commutators():
    b = bundle("one-step")
    assert commutator(b.operators["D1"], b.operators["D1"]).is_zero()
    assert commutator(b.operators["D1"], b.operators["D2"]).is_zero()
    t = bundle("two-step")
    e = ef_ops()["E"]
    k1, k2 = t.params.k1, t.params.k2
    assert commutator(e, t.operators["D1"]) == e * (k1 - k2 - 1)


def test_conjugate_by_identity():
    op = bundle("one-step").operators["D1"]
    assert conjugate_by(op, MatrixPoly.identity(3)) == op


def test_conjugation_one_step_reproduces_d_tilde():
    b = bundle("one-step")
    conj = conjugate_by(b.operators["D_original"], b.psi_star, require_polynomial=True)
    assert conj == b.operators["D_tilde"]
    assert conj.poly_coeff(2) == MatrixPoly.scalar(T * Poly([1, -1]), 3)


def test_conjugation_two_step_matches_generated_operator():
    b = bundle("two-step")
    assert conjugate_by(b.operators["D_original"], b.psi_star, require_polynomial=True) == b.operators["D_tilde"]


def test_conjugate_requires_polynomial():
    d = MatDiffOp.derivative(1, 1)
    psi = MatrixPoly([Matrix([[1]]), Matrix([[1]])], 1)  # 1 + t
    with pytest.raises(NotPolynomial):
        conjugate_by(d, psi, require_polynomial=True)


def test_hypergeometric_form():
    b = bundle("one-step")
    assert not is_hypergeometric_form(b.operators["D_original"]).ok
    assert is_hypergeometric_form(b.operators["D_original"]).violation == 0
    assert is_hypergeometric_form(b.operators["D_tilde"]).ok
    assert is_hypergeometric_form(MatDiffOp.zero(3)).ok


def test_gamma_n():
    op = bundle("one-step").operators["D1"]
    _, u, v = hypergeometric_data(op)
    assert gamma_n(op, 0) == v
    assert gamma_n(op, 1) == v - u
    # upper triangular, so the eigenvalues sit on the diagonal
    g1 = gamma_n(op, 1)
    assert g1.is_upper_triangular()
    assert g1.diagonal() == [-12, -21, -32]


def test_second_order_round_trip():
    x, u, v = Matrix.diag([1, 2]), Matrix([[3, 1], [0, 4]]), Matrix.diag([0, -1])
    assert hypergeometric_data(second_order(x, u, v)) == (x, u, v)


def test_eigenseq_algebra():
    a = EigenSeq.diag([Poly([0, 1]), Poly([1])])
    b = EigenSeq.diag([Poly([2]), Poly([0, 0, 1])])
    assert (a * b)(3) == a(3) @ b(3)
    assert (a + 2)(1) == a(1) + Matrix.identity(2).scale(2)
    assert (a - a).is_zero()
