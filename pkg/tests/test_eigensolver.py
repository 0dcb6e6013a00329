from dataclasses import replace
from fractions import Fraction as Q

import pytest

from conftest import bundle, family
from mvop.core import Matrix, MatrixPoly, Poly
from mvop.diffops import MatDiffOp
from mvop.eigensolver import (
    GenericityError,
    PolyFamily,
    SpectraOverlap,
    generate_family,
    generate_pstar,
    monic_orthogonal,
    sylvester_solve,
    verify_eigen_equation,
)
from mvop.weights import diagonal_weight, inner_product


def test_sylvester_homogeneous():
    assert sylvester_solve(Matrix.diag([1, 2]), Matrix.diag([3, 4]), Matrix.zeros(2)) == Matrix.zeros(2)


def test_sylvester_example():
    g, l, r = Matrix.diag([1, 2]), Matrix.diag([3, 4]), Matrix([[2, 3], [6, 2]])
    x = sylvester_solve(g, l, r)
    assert g @ x - x @ l == r
    # (2 - 3) x21 = 6
    assert x == Matrix([[-1, -1], [-6, -1]])


def test_sylvester_general():
    g = Matrix([[1, 2, 0], [0, 3, 1], [1, 0, 5]])
    l = Matrix([[-1, 1], [0, -2]])
    r = Matrix([[1, 0], [2, 1], [Q(1, 2), 3]])
    x = sylvester_solve(g, l, r)
    assert g @ x - x @ l == r


def test_sylvester_overlap():
    with pytest.raises(SpectraOverlap):
        sylvester_solve(Matrix.diag([1, 2]), Matrix.diag([2, 5]), Matrix.zeros(2))


def test_first_member_is_eigenvector_matrix():
    b = bundle("one-step")
    p0 = generate_pstar(b, "D_hyp", 0, "pstar-zero")
    assert p0.degree == 0 and p0.coeff(0) == Matrix.identity(3)
    v = b.hyp_data[2]
    assert v @ p0.coeff(0) == p0.coeff(0) @ b.eigen["D_hyp"](0)


@pytest.mark.parametrize("norm", ["appendix", "monic", "pstar-zero", "raw"])
def test_normalizations_agree_up_to_columns(norm):
    b = bundle("one-step")
    fam = generate_family(b, "D1", 3, norm)
    if norm == "monic":
        # eigenvalues become A_n Lambda_n A_n^{-1}; compare with the rescaled default family
        assert fam.pstar == family("one-step", N=3).monic().pstar
        assert all(fam.leading(n) == Matrix.identity(3) for n in range(4))
    else:
        assert verify_eigen_equation(fam, "D1")


def test_unknown_normalization():
    with pytest.raises(ValueError):
        generate_pstar(bundle("one-step"), "D1", 1, "weird")


def test_parallel_generation_identical():
    b = bundle("two-step")
    assert generate_family(b, "D1", 4, jobs=2).pstar == generate_family(b, "D1", 4).pstar


def test_monic_orthogonal_small():
    w = diagonal_weight(0, 0, [Poly([1])])
    q = monic_orthogonal(w, 2)
    assert q[0] == MatrixPoly.identity(1)
    assert q[1] == MatrixPoly([Matrix([[Q(-1, 2)]]), Matrix([[1]])], 1)
    assert q[2] == MatrixPoly([Matrix([[Q(1, 6)]]), Matrix([[-1]]), Matrix([[1]])], 1)


@pytest.mark.parametrize("kind", ["one-step", "two-step"])
def test_monic_oracle(kind):
    fam = family(kind)
    mon = fam.monic()
    for n, q in enumerate(monic_orthogonal(fam.bundle.W_tilde, 5)):
        assert q == mon.p(n)


@pytest.mark.parametrize("kind", ["one-step", "two-step"])
def test_orthogonality(kind):
    fam = family(kind)
    for n in range(7):
        for m in range(n):
            assert inner_product(fam.p(m), fam.p(n), fam.bundle.W_tilde).is_zero()


def test_eigen_equations_and_perturbation():
    fam = family("one-step", N=8)
    assert verify_eigen_equation(fam, "D1")
    assert verify_eigen_equation(fam, "D2")
    b = fam.bundle
    bent = b.operators["D1"] + MatDiffOp([Matrix.unit(3, 2, 0)], 3)
    b2 = replace(b, operators={**b.operators, "bent": bent})
    res = verify_eigen_equation(PolyFamily(b2, "D1", fam.normalization, fam.pstar), "bent", b.eigen["D1"])
    assert not res and res.witness["n"] == 0


def test_genericity_error_is_parameter_error():
    assert issubclass(GenericityError, ValueError)
