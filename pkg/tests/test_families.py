from fractions import Fraction as Q

import pytest

from conftest import bundle, ef_ops, family
from mvop.appendix import GammaPoleError, gamma_ratio, G
from mvop.core import Matrix, Poly
from mvop.diffops import apply
from mvop.eigensolver import verify_eigen_equation
from mvop.families import (
    OneStepParams,
    ParameterError,
    TwoStepParams,
    appendix_coeff,
    build_family,
    ef_leading,
    lambda_sequence,
    pstar_zero,
)

T = Poly([0, 1])


@pytest.mark.parametrize(
    "kw,expr",
    [
        (dict(alpha=Q(-1), beta=Q(5), k=2), "alpha > -1"),
        (dict(alpha=Q(3), beta=Q(5), k=0), "1 <= k <= beta"),
        (dict(alpha=Q(3), beta=Q(5), k=6), "1 <= k <= beta"),
    ],
)
def test_one_step_params_rejected(kw, expr):
    with pytest.raises(ParameterError) as exc:
        OneStepParams(**kw)
    assert exc.value.expression == expr


def test_two_step_params_rejected():
    with pytest.raises(ParameterError) as exc:
        TwoStepParams(Q(2), Q(6), 4, 2)
    assert "k1 < k2" in exc.value.expression


def test_build_family_keywords_and_kind():
    b = build_family("one-step", alpha=Q(3), beta=Q(5), k=2)
    assert b.size == 3
    with pytest.raises(ParameterError):
        build_family("two-step", OneStepParams(Q(3), Q(5), 2))
    with pytest.raises(ValueError):
        build_family("three-step", OneStepParams(Q(3), Q(5), 2))


def test_v_matrices():
    assert bundle("one-step").hyp_data[2] == Matrix.diag([0, -8, -18])
    # -(2a+2b-k1-k2+6) = -16 at (2, 6, 2, 4)
    assert bundle("two-step").hyp_data[2] == Matrix.diag([0, -9, -6, -16])


def test_lambda_examples():
    b = bundle("one-step")
    assert lambda_sequence(b, "D1")(1) == Matrix.diag([-12, -21, -32])
    assert lambda_sequence(b, "D2")(0) == Matrix.diag([0, 8, 18])
    e1 = lambda_sequence(bundle("two-step"), "E")(1)
    assert e1 == Matrix.unit(4, 1, 2).scale(960)
    with pytest.raises(KeyError):
        lambda_sequence(b, "E")


def test_conjugator_and_forms():
    for kind in ("one-step", "two-step"):
        b = bundle(kind)
        # invertible away from t = 1
        d = b.psi_star.det()
        assert not d.is_zero() and d(0) != 0
        assert b.W_tilde.is_symmetric()


def test_pstar_zero_values():
    b = bundle("one-step")
    p = pstar_zero(b, 1)
    assert p[0, 0] == Q(-5, 12)
    assert p[2, 2] == Q(-108, 7)
    with pytest.raises(ValueError):
        pstar_zero(b, 0)
    for n in range(1, 7):
        assert pstar_zero(bundle("two-step"), n)[1, 2] == 0


@pytest.mark.parametrize("which", ["default", "second"])
def test_pstar_zero_one_step_matches_generated_transpose(which):
    fam = family("one-step", which, "D_hyp", 6)
    for n in range(1, 7):
        assert fam.p(n).coeff(0) == pstar_zero(fam.bundle, n)
        assert fam.pstar[n].coeff(0) == pstar_zero(fam.bundle, n).T


@pytest.mark.parametrize("which", ["default", "second"])
def test_pstar_zero_two_step_mismatch_pattern(which):
    # only p24 and p34 differ; the ratios below are frozen from the generator
    fam = family("two-step", which, "D_hyp", 6)
    p = fam.bundle.params
    for n in range(1, 7):
        gen, shown = fam.p(n).coeff(0), pstar_zero(fam.bundle, n)
        for i in range(4):
            for j in range(4):
                if (i, j) not in ((1, 3), (2, 3)):
                    assert gen[i, j] == shown[i, j]
        s = n + p.alpha + p.beta - p.k2
        assert gen[1, 3] == shown[1, 3] * (s + 4) / (s + 3)
        assert gen[2, 3] == shown[2, 3] * n


def test_appendix_examples():
    b = bundle("one-step")
    assert appendix_coeff(b, 0, 0)[0, 0] == 1
    for n in range(4):
        assert appendix_coeff(b, n, 0)[1, 0] == 0
    with pytest.raises(ValueError):
        appendix_coeff(b, 2, 3)


@pytest.mark.parametrize("which", ["default", "second"])
def test_appendix_one_step_matches_recursion(which):
    fam = family("one-step", which, N=6)
    for n in range(7):
        for l in range(n + 1):
            assert fam.pstar[n].coeff(n - l) == appendix_coeff(fam.bundle, n, l)


@pytest.mark.parametrize("which", ["default", "second"])
def test_appendix_two_step_corrected_matches(which):
    fam = family("two-step", which, N=6)
    for n in range(7):
        for l in range(n + 1):
            gen = fam.pstar[n].coeff(n - l)
            assert gen == appendix_coeff(fam.bundle, n, l, corrected=True)
            shown = appendix_coeff(fam.bundle, n, l)
            diff = [(i, j) for i in range(4) for j in range(4) if gen[i, j] != shown[i, j]]
            assert diff in ([], [(1, 0)])


def test_gamma_ratio():
    assert gamma_ratio([G(5)], [G(3)], 0, 0) == 12
    assert gamma_ratio([G(2, 1)], [G(1, 1)], Q(1, 2), 0) == Q(3, 2)
    assert gamma_ratio([G(1)], [G(0)], 0, 0) == 0
    with pytest.raises(GammaPoleError):
        gamma_ratio([G(0)], [G(1)], 0, 0)


def test_ef_leading_display():
    b = bundle("two-step")
    p = b.params
    g4, h4 = ef_leading(b)
    k1, k2, be = p.k1, p.k2, p.beta
    c = -(be - k1 + 2) * (k1 - k2) / ((be - k2 + 1) * (k1 - k2 - 2))
    assert g4.entry(1, 0) == T * T * Poly([1, -1]) * c
    assert all(h4.entry(0, j).is_zero() for j in range(4))
    for m in (g4, h4):
        assert m.coeff(0).is_zero() and m.coeff(1).is_zero()


@pytest.mark.parametrize("which", ["default", "second"])
def test_ef_leading_corrected_matches_recovered(which):
    b = bundle("two-step", which)
    g4c, h4 = ef_leading(b, corrected=True)
    ops = ef_ops(which)
    assert ops["E"].poly_coeff(4) == g4c
    assert ops["F"].poly_coeff(4) == h4


def test_printed_operator_variants_fail_where_noted():
    one, two = bundle("one-step"), bundle("two-step")
    fam1, fam2 = family("one-step", N=4), family("two-step", N=4)
    assert verify_eigen_equation(fam1, "D2")
    printed_d2 = one.printed["D2"]
    assert printed_d2 != one.operators["D2"]
    assert apply(printed_d2, fam1.pstar[1]) != fam1.pstar[1] @ one.eigen["D2"](1)
    printed_d3 = two.printed["D3"]
    assert apply(printed_d3, fam2.pstar[1]) != fam2.pstar[1] @ two.eigen["D3"](1)
    assert two.printed["D_tilde"] != two.operators["D_tilde"]
    assert len(two.notes) >= 3 and one.notes
