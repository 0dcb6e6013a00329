"""Rebuild P_n^* from the matrix hypergeometric series and factor A, B numerically."""
import mpmath

from mvop.core import vec
from mvop.families import default_bundle
from mvop.hypergeom import build_kron_system, hg_series_apply, reference_pstar, solve_ab_factorization

b = default_bundle("two-step")
n = 3
system = build_kron_system(b, n)
ps = reference_pstar(b, n)
coeffs = hg_series_apply(system, vec(ps.coeff(0)), n + 3)
print("series matches P_3^*:", all(coeffs[i] == vec(ps.coeff(i)) for i in range(n + 1)))
print("tail vanishes:", not any(any(c) for c in coeffs[n + 1:]))

fact = solve_ab_factorization(system, precision=256)
print("||A+B+I-Ut|| =", mpmath.nstr(fact.residual_sum, 3), " ||AB-Tt|| =", mpmath.nstr(fact.residual_product, 3))
print("A[1,1] =", mpmath.nstr(fact.A[0, 0], 5))
