from fractions import Fraction as Q

import pytest

from conftest import bundle, family, generators, space
from mvop.algebra import (
    GeneratorExpr,
    NotInAlgebra,
    commutant,
    lambda_at,
    lambda_of_operator,
    one_step_factors,
    operator_space,
    partial_products_nonzero,
    relation_check,
    relation_set,
    solve_by_eigenvalue,
    span_contains,
)
from mvop.core import Matrix, NoSolution, Poly
from mvop.diffops import EigenSeq, MatDiffOp

G = GeneratorExpr.gen


@pytest.mark.parametrize("kind,r,dim", [("one-step", 1, 1), ("one-step", 2, 3), ("two-step", 1, 1), ("two-step", 2, 4)])
def test_small_spaces(kind, r, dim):
    sp = space(kind, "default", r)
    assert sp.dim == dim
    assert sp.new_dims()[1] == 0


def test_space_contains_named_operators():
    for kind in ("one-step", "two-step"):
        sp = space(kind, "default", 2)
        b = bundle(kind)
        for name in ("D1", "D2", "D3"):
            if name in b.operators:
                assert span_contains(sp.basis, b.operators[name], 2)
        assert not span_contains(sp.basis, MatDiffOp.derivative(1, b.size), 2)


def test_space_verification_window():
    sp = operator_space(family("one-step"), 2, n_max=6, verify_to=10)
    assert sp.verified_to == 10 and sp.dim == 3
    with pytest.raises(ValueError):
        operator_space(family("one-step"), -1)


def test_lambda_of_operator():
    fam = family("one-step")
    b = fam.bundle
    assert lambda_of_operator(fam, b.operators["D1"]) == b.eigen["D1"]
    assert lambda_of_operator(fam, b.operators["D2"]) == b.eigen["D2"]
    assert lambda_of_operator(fam, MatDiffOp.identity(3)) == EigenSeq.identity(3)
    with pytest.raises(NotInAlgebra):
        lambda_of_operator(fam, MatDiffOp.derivative(1, 3))


def test_generator_expr():
    e = (G("A") + 2) * G("B") - G("B") * G("A")
    lams = {"A": Matrix([[1, 1], [0, 2]]), "B": Matrix([[0, 1], [1, 0]])}
    a, b = lams["A"], lams["B"]
    assert e.eval_eigen(lams, 2) == (a + Matrix.identity(2).scale(2)) @ b - b @ a
    assert e.order({"A": 2, "B": 4}) == 6
    assert (G("A") ** 3).order({"A": 2}) == 6
    assert e.generators() == {"A", "B"}


def test_fact_relation_and_partial_products():
    fam = family("one-step")
    gens = generators("one-step")
    assert relation_check(fam, relation_set(fam.bundle, "fact")["fact"], 10, gens)
    assert partial_products_nonzero(fam, 10, gens)
    f = one_step_factors(fam.bundle.params)
    lam1 = (f[0]).eval_eigen({k: v(1) for k, v in gens.lams.items()}, 3)
    assert not lam1.is_zero()
    pair = (f[0] * f[1]).eval_eigen({k: v(2) for k, v in gens.lams.items()}, 3)
    assert not pair.is_zero()


def test_relation_failure_reports_witness():
    fam = family("one-step")
    f = one_step_factors(fam.bundle.params)
    r = relation_check(fam, f[0] * f[1] * (f[2] + 1), 10, generators("one-step"))
    assert not r and "n" in r.witness


def test_coef_relation():
    fam = family("one-step")
    assert relation_check(fam, relation_set(fam.bundle, "coef")["coef"], 12, generators("one-step"))


def test_relation_set_family_check():
    with pytest.raises(ValueError):
        relation_set(bundle("one-step"), "fe")
    with pytest.raises(ValueError):
        relation_set(bundle("two-step"), "fact")
    assert set(relation_set(bundle("two-step"), "fact-analogues")) == set(relation_set(bundle("two-step"), "two-step-list"))
    assert list(relation_set(bundle("two-step"), "fe")) == ["FE"]


def test_two_step_relations():
    fam = family("two-step")
    gens = generators("two-step")
    for name, expr in relation_set(fam.bundle, "all").items():
        assert relation_check(fam, expr, 12, gens), name


def test_solve_by_eigenvalue_recovers_d2():
    fam = family("one-step")
    assert solve_by_eigenvalue(fam, fam.bundle.eigen["D2"], 2) == fam.bundle.operators["D2"]


def test_solve_by_eigenvalue_no_solution():
    fam = family("one-step")
    bogus = EigenSeq.diag([Poly([0, 0, 0, 1]), Poly(), Poly()])
    with pytest.raises(NoSolution):
        solve_by_eigenvalue(fam, bogus, 2)


def test_commutants():
    f1 = family("one-step")
    assert commutant(f1, f1.bundle.operators["D1"], 2, space("one-step", "default", 2)).dim == 3
    assert commutant(f1, MatDiffOp.identity(3), 2, space("one-step", "default", 2)).dim == 3
    f2 = family("two-step")
    assert commutant(f2, f2.bundle.operators["D1"], 2, space("two-step", "default", 2)).dim == 4


def test_multiplicativity():
    fam = family("two-step")
    gens = generators("two-step")
    for a, c in (("D1", "D2"), ("D3", "E"), ("F", "D1")):
        op = gens.ops[a] @ gens.ops[c]
        for n in range(11):
            assert lambda_at(fam, op, n) == gens.lams[a](n) @ gens.lams[c](n)
