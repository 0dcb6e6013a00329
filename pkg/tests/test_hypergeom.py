from fractions import Fraction as Q

import mpmath
import pytest

from conftest import bundle, family
from mvop.core import Matrix, rank, vec
from mvop.hypergeom import (
    annihilation_check,
    build_kron_system,
    diag_list,
    hg_series_apply,
    pochhammer_identity_residual,
    solve_ab_factorization,
)


def test_kron_system_one_step_n1():
    b = bundle("one-step")
    s = build_kron_system(b, 1)
    d = s.T_t.diagonal()
    assert d[:4] == [-12, -21, -32, -4]
    assert d == [p(1) for p in diag_list(b)]


def algebraic_multiplicity(m: Matrix, lam) -> int:
    n = m.shape[0]
    a = m.shift(-lam)
    p = Matrix.identity(n)
    for _ in range(n):
        p = p @ a
    return n - rank(p)


def test_c_spectrum():
    a1 = bundle("one-step").params.alpha
    c1 = build_kron_system(bundle("one-step"), 0).C
    assert [algebraic_multiplicity(c1, a1 + i) for i in (1, 2, 3)] == [3, 3, 3]
    a2 = bundle("two-step").params.alpha
    c2 = build_kron_system(bundle("two-step"), 0).C
    assert algebraic_multiplicity(c2, a2 + 2) == 8


def test_series_first_term():
    s = build_kron_system(bundle("one-step"), 2)
    v0 = [Q(i) for i in range(9)]
    assert hg_series_apply(s, v0, 1) == [v0]


def test_series_rebuilds_p2():
    b = bundle("one-step")
    p2 = family("one-step", opname="D_hyp", N=2).pstar[2]
    coeffs = hg_series_apply(build_kron_system(b, 2), vec(p2.coeff(0)), 4)
    assert [coeffs[i] for i in range(3)] == [vec(p2.coeff(i)) for i in range(3)]
    assert not any(coeffs[3])


@pytest.mark.parametrize("kind", ["one-step", "two-step"])
def test_annihilation(kind):
    for n in range(7):
        assert annihilation_check(bundle(kind), n, 4)


def test_annihilation_corrupted_vector():
    b = bundle("one-step")
    v = vec(family("one-step", opname="D_hyp", N=3).pstar[3].coeff(0))
    v[4] += 1
    assert not annihilation_check(b, 3, 4, v0=v)


def test_ab_factorization_one_step():
    s = build_kron_system(bundle("one-step"), 1)
    f = solve_ab_factorization(s, 256)
    eps = mpmath.mpf(10) ** -60
    assert f.residual_sum < eps and f.residual_product < eps
    assert abs(f.A[0, 0] + 1) < eps
    assert pochhammer_identity_residual(f, s, 5) < eps


def test_ab_factorization_two_step_block():
    b = bundle("two-step")
    for n in range(3):
        f = solve_ab_factorization(build_kron_system(b, n), 256)
        blk = f.block(2, 3, 4)
        assert all(blk[i, j] == 0 for i in range(4) for j in range(4))
        assert f.A[0, 0] == -n
