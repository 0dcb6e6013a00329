"""The algebra of differential operators having a family as eigenfunctions.

An operator D = sum_j F_j d^j with deg F_j <= j is fixed by its values on
t^0 I, ..., t^r I.  Since the monic Q_m^* span the same module, D is fixed
by the matrices Lh_m with D Q_m^* = Q_m^* Lh_m, m <= r; these are the free
unknowns.  The eigen equations for n > r are then linear conditions on them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .core import (
    Matrix,
    MatrixPoly,
    NoSolution,
    ONE,
    Poly,
    ZERO,
    as_q,
    falling,
    nullspace_exact,
    rank,
    rref,
)
from .diffops import EigenSeq, MatDiffOp, apply, commutator
from .eigensolver import PolyFamily, generate_family
from .weights import CheckResult


class NotInAlgebra(ValueError):
    """The operator does not have the family as eigenfunctions."""


class NonUnique(ArithmeticError):
    """Two operators share an eigenvalue sequence (faithfulness violated)."""


class StabilizationError(RuntimeError):
    pass


# raw operators: tuple of MatrixPoly F_0..F_r, deg F_j <= j


def _combine(ops: Sequence[tuple], coeffs: Sequence[Fraction], size: int) -> tuple:
    r = len(ops[0]) - 1
    out = []
    for j in range(r + 1):
        acc = MatrixPoly.zero(size)
        for c, op in zip(coeffs, ops):
            if c:
                acc = acc + op[j] * c
        out.append(acc)
    return tuple(out)


def _apply_raw(op: tuple, p: MatrixPoly) -> MatrixPoly:
    acc = MatrixPoly.zero(p.size)
    d = p
    for f in op:
        if d.is_zero():
            break
        if not f.is_zero():
            acc = acc + f @ d
        d = d.deriv()
    return acc


def _lead_symbol(op: tuple, n: int, size: int) -> Matrix:
    acc = Matrix.zeros(size)
    for j, f in enumerate(op):
        if j <= n:
            acc = acc + f.coeff(j).scale(falling(n, j))
    return acc


def _to_matdiffop(op: tuple, size: int) -> MatDiffOp:
    return MatDiffOp(list(op), size)


def _from_matdiffop(op: MatDiffOp, r: int) -> tuple:
    if op.order > r:
        raise ValueError("operator order exceeds bound")
    cs = [op.poly_coeff(j) if j <= op.order else MatrixPoly.zero(op.size) for j in range(r + 1)]
    for j, c in enumerate(cs):
        if c.degree > j:
            raise NotInAlgebra(f"coefficient F_{j} has degree {c.degree} > {j}")
    return tuple(cs)


def _flat(op: tuple) -> list[Fraction]:
    """Coefficients with the highest-order block first."""
    out = []
    for j in range(len(op) - 1, -1, -1):
        f = op[j]
        for e in range(j + 1):
            for row in f.coeff(e).rows:
                out.extend(row)
    return out


def _unflat(v: Sequence[Fraction], r: int, size: int) -> tuple:
    pos = 0
    cs: list[MatrixPoly | None] = [None] * (r + 1)
    s2 = size * size
    for j in range(r, -1, -1):
        mats = []
        for _ in range(j + 1):
            chunk = v[pos:pos + s2]
            pos += s2
            mats.append(Matrix([chunk[i * size:(i + 1) * size] for i in range(size)]))
        cs[j] = MatrixPoly(mats, size)
    return tuple(cs)


def _block_len(j: int, size: int) -> int:
    return (j + 1) * size * size


def _monomial_expansion(q: list[MatrixPoly], r: int, size: int) -> list[list[Matrix]]:
    """C[i][m] with t^i I = sum_m Q_m^* C[i][m]."""
    out = []
    for i in range(r + 1):
        rem = MatrixPoly([Matrix.zeros(size)] * i + [Matrix.identity(size)], size)
        cs = [Matrix.zeros(size)] * (r + 1)
        for m in range(i, -1, -1):
            c = rem.coeff(m)
            cs[m] = c
            rem = rem - q[m] @ c
        out.append(cs)
    return out


def _initial_basis(q: list[MatrixPoly], r: int, size: int) -> list[tuple]:
    expand = _monomial_expansion(q, r, size)
    basis = []
    for m in range(r + 1):
        for a in range(size):
            for b in range(size):
                qe = q[m] @ Matrix.unit(size, a, b)
                images = [qe @ expand[i][m] for i in range(r + 1)]
                fs: list[MatrixPoly] = []
                for i in range(r + 1):
                    acc = images[i]
                    for j, f in enumerate(fs):
                        shift = MatrixPoly([Matrix.zeros(size)] * (i - j) + [Matrix.identity(size)], size)
                        acc = acc - (f @ shift) * falling(i, j)
                    fs.append(acc * Fraction(1, factorial(i)))
                basis.append(tuple(fs))
    return basis


def _residual(op: tuple, q: MatrixPoly, n: int, size: int) -> list[Fraction]:
    res = _apply_raw(op, q) - q @ _lead_symbol(op, n, size)
    out = []
    for d in range(n):
        for row in res.coeff(d).rows:
            out.extend(row)
    return out


@dataclass
class OperatorSpace:
    r: int
    basis: list[MatDiffOp]
    dims: dict[int, int]
    n_max: int
    history: list[tuple[int, int]] = field(default_factory=list)
    verified_to: int = -1

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def stable(self) -> bool:
        """Dimension unchanged over the last few constraint degrees."""
        if len(self.history) < 3:
            return False
        return len({d for _, d in self.history[-3:]}) == 1

    def new_dims(self) -> dict[int, int]:
        out, prev = {}, 0
        for o in range(self.r + 1):
            out[o] = self.dims[o] - prev
            prev = self.dims[o]
        return out


def _monic(family: PolyFamily) -> list[MatrixPoly]:
    return family.monic().pstar if family.normalization != "monic" else family.pstar


def _ensure(family: PolyFamily, n: int) -> PolyFamily:
    if family.N >= n:
        return family
    return generate_family(family.bundle, family.opname, n, family.normalization)


def operator_space(family: PolyFamily, r: int, n_max: int | None = None, verify_to: int | None = None) -> OperatorSpace:
    """All operators of order <= r with D P_n^* = P_n^* Lambda_n(D) for n <= n_max."""
    if r < 0:
        raise ValueError("order bound must be nonnegative")
    n_max = 2 * r + 4 if n_max is None else n_max
    family = _ensure(family, max(n_max, verify_to or 0))
    size = family.bundle.size
    q = _monic(family)
    basis = _initial_basis(q, r, size)
    history = []
    for n in range(r + 1, n_max + 1):
        cols = [_residual(op, q[n], n, size) for op in basis]
        rows = [list(x) for x in zip(*cols)]
        ns = nullspace_exact(rows, len(basis)) if rows else [[ONE if i == j else ZERO for i in range(len(basis))] for j in range(len(basis))]
        basis = [_combine(basis, v, size) for v in ns]
        history.append((n, len(basis)))
        if not basis:
            break
    if basis:
        red, pivots = rref([_flat(op) for op in basis])
        basis = [_unflat(v, r, size) for v in red]
    else:
        pivots = []
    # pivot position tells the order of each echelon row
    bounds, pos = [], 0
    for j in range(r, -1, -1):
        pos += _block_len(j, size)
        bounds.append((j, pos))
    orders = []
    for p in pivots:
        orders.append(next(j for j, end in bounds if p < end))
    dims = {o: sum(1 for x in orders if x <= o) for o in range(r + 1)}
    ops = [_to_matdiffop(op, size) for op in basis]
    space = OperatorSpace(r, ops, dims, n_max, history)
    if verify_to is not None:
        for n in range(n_max + 1, verify_to + 1):
            for op in basis:
                if any(_residual(op, q[n], n, size)):
                    raise StabilizationError(f"basis element fails the eigen equation at n={n}; raise n_max")
        space.verified_to = verify_to
    return space


def new_dims_table(family: PolyFamily, max_order: int, n_max: int | None = None) -> dict[int, int]:
    return operator_space(family, max_order, n_max).new_dims()


# ---------------------------------------------------------------------------
# eigenvalue map


def _interpolate(xs: Sequence[int], ys: Sequence[Fraction]) -> Poly:
    acc = Poly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = Poly.const(ONE)
        denom = ONE
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * Poly((-xj, 1))
                denom *= xi - xj
        acc = acc + basis * (yi / denom)
    return acc


def lambda_at(family: PolyFamily, op: MatDiffOp, n: int) -> Matrix:
    """Lambda_n(op) read off the leading coefficient, with the full equation checked."""
    ps = family.pstar[n]
    img = apply(op, ps)
    if not isinstance(img, MatrixPoly):
        raise NotInAlgebra(f"op P_{n}^* is not polynomial")
    lam = family.leading(n).inverse() @ img.coeff(n)
    if img != ps @ lam:
        raise NotInAlgebra(f"eigen equation fails at n={n}")
    return lam


def lambda_of_operator(family: PolyFamily, op: MatDiffOp, extra: int = 3) -> EigenSeq:
    """Lambda_n(op) as a matrix of polynomials in n."""
    deg = op.order
    npts = deg + 1 + extra
    family = _ensure(family, npts - 1)
    mats = [lambda_at(family, op, n) for n in range(npts)]
    size = op.size
    xs = list(range(deg + 1))
    entries = [[_interpolate(xs, [mats[n][i, j] for n in xs]) for j in range(size)] for i in range(size)]
    seq = EigenSeq(entries)
    for n in range(deg + 1, npts):
        if seq(n) != mats[n]:
            raise NotInAlgebra(f"eigenvalue entries are not polynomial of degree <= {deg} in n")
    return seq


# ---------------------------------------------------------------------------
# generator expressions


class GeneratorExpr:
    """Noncommutative polynomial in named generators; words are tuples of names."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[str, ...], Fraction] | None = None):
        self.terms = {w: as_q(c) for w, c in (terms or {}).items() if c != 0}

    @classmethod
    def gen(cls, name: str) -> "GeneratorExpr":
        return cls({(name,): ONE})

    @classmethod
    def const(cls, c) -> "GeneratorExpr":
        return cls({(): as_q(c)})

    def _coerce(self, other) -> "GeneratorExpr":
        return other if isinstance(other, GeneratorExpr) else GeneratorExpr.const(other)

    def __add__(self, other) -> "GeneratorExpr":
        other = self._coerce(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, ZERO) + c
        return GeneratorExpr(t)

    __radd__ = __add__

    def __neg__(self) -> "GeneratorExpr":
        return GeneratorExpr({w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> "GeneratorExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GeneratorExpr":
        return self._coerce(other) - self

    def __mul__(self, other) -> "GeneratorExpr":
        other = self._coerce(other)
        t: dict[tuple[str, ...], Fraction] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                t[w1 + w2] = t.get(w1 + w2, ZERO) + c1 * c2
        return GeneratorExpr(t)

    def __rmul__(self, other) -> "GeneratorExpr":
        return self._coerce(other) * self

    def __pow__(self, e: int) -> "GeneratorExpr":
        out = GeneratorExpr.const(1)
        for _ in range(e):
            out = out * self
        return out

    def generators(self) -> set[str]:
        return {g for w in self.terms for g in w}

    def order(self, orders: dict[str, int]) -> int:
        return max((sum(orders[g] for g in w) for w in self.terms), default=0)

    def eval_eigen(self, lams: dict[str, Matrix], size: int) -> Matrix:
        acc = Matrix.zeros(size)
        for w, c in self.terms.items():
            m = Matrix.identity(size)
            for g in w:
                m = m @ lams[g]
            acc = acc + m.scale(c)
        return acc

    def eval_operator(self, ops: dict[str, MatDiffOp], size: int) -> MatDiffOp:
        acc = MatDiffOp.zero(size)
        for w, c in self.terms.items():
            m = MatDiffOp.identity(size)
            for g in w:
                m = m @ ops[g]
            acc = acc + m * c
        return acc

    def __repr__(self) -> str:
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda x: (len(x[0]), x[0])):
            parts.append(f"{c}*{'.'.join(w) or 'I'}")
        return " + ".join(parts) or "0"


@dataclass
class Generators:
    """Named generators with operators (when known) and eigenvalue sequences."""

    size: int
    lams: dict[str, EigenSeq]
    ops: dict[str, MatDiffOp]
    orders: dict[str, int]


def family_generators(family: PolyFamily, extra_ops: dict[str, MatDiffOp] | None = None) -> Generators:
    """D1, D2 (and D3, E, F for the two-step family) with eigenvalues from the family itself."""
    b = family.bundle
    names = ["D1", "D2"] + (["D3"] if b.kind == "two-step" else [])
    ops = {k: b.operators[k] for k in names}
    ops.update(extra_ops or {})
    lams = {k: lambda_of_operator(family, op) for k, op in ops.items()}
    orders = {k: op.order for k, op in ops.items()}
    for k in ("E", "F"):
        if k in b.eigen and k not in lams:
            lams[k] = b.eigen[k]
            orders[k] = 4
    return Generators(b.size, lams, ops, orders)


def relation_check(
    family: PolyFamily, expr: GeneratorExpr, n_check: int, gens: Generators | None = None, compose_up_to: int = 6
) -> CheckResult:
    """Lambda_n(expr) = 0 for n <= n_check, plus an operator check for low order.

    Entries of Lambda_n(expr) are polynomials in n of degree at most the total
    order, so vanishing at that many + 1 points and faithfulness give the
    operator identity.
    """
    gens = gens or family_generators(family)
    unknown = expr.generators() - set(gens.lams)
    if unknown:
        raise KeyError(f"unknown generator(s): {sorted(unknown)}")
    deg = expr.order(gens.orders)
    n_top = max(n_check, deg)
    for n in range(n_top + 1):
        lam = expr.eval_eigen({k: v(n) for k, v in gens.lams.items()}, gens.size)
        if not lam.is_zero():
            return CheckResult(False, {"n": n, "lambda": lam}, f"Lambda_{n} of the relation is nonzero")
    detail = f"Lambda_n vanishes for n = 0..{n_top} (degree bound {deg})"
    if deg <= compose_up_to and expr.generators() <= set(gens.ops):
        op = expr.eval_operator(gens.ops, gens.size)
        if not op.is_zero():
            return CheckResult(False, {"operator": op}, "composed operator is nonzero")
        detail += "; composed operator is zero"
    return CheckResult(True, {"degree_bound": deg, "n_checked": n_top}, detail)


def one_step_factors(p) -> list[GeneratorExpr]:
    d1, d2 = GeneratorExpr.gen("D1"), GeneratorExpr.gen("D2")
    s = p.alpha + p.beta - p.k
    return [d1 - d2, d2 - p.k * (s + 3), d1 - 2 * d2 + (1 + p.k) * (s + 2)]


def one_step_coef(p) -> list[Fraction]:
    """s_1..s_9 of the order-six relation among D1, D2."""
    a, be, k = p.alpha, p.beta, p.k
    s = a + be - k
    third = Fraction(1, 3)
    s2 = -third * k * (k + 1) * (s + 3) * (s + 2)
    return [
        ZERO, s2, -s2, -third * k * (s + 3),
        -2 * third - a / 3 - k * (be + 1) + k * k - k * a - be / 3 - 4 * third * k,
        2 * third + a / 3 + 4 * third * k * (be + 1) - 4 * third * k * k + 4 * third * k * a + be / 3 + 2 * k,
        ZERO, 2 * third, third,
    ]


def two_step_relations(p) -> dict[str, GeneratorExpr]:
    g = GeneratorExpr.gen
    d1, d2, d3, e, f = g("D1"), g("D2"), g("D3"), g("E"), g("F")
    k1, k2 = p.k1, p.k2
    P = p.alpha + p.beta
    c = k1 * (P - k1 + 2) + 1 + k2
    return {
        "D2(D1+D3-k1(P-k1+3))": d2 * (d1 + d3 - k1 * (P - k1 + 3)),
        "quadratic in D2, D3": ((k1 - k2) * d2 + (k1 - k2 - 1) * d3)
        * (-d1 + (k1 - k2 - 1) * d2 + (k1 - k2 - 2) * d3 + (1 + k2) * (P - k2 + 2)),
        "D1E+ED3": d1 * e + e * d3 - c * e,
        "ED1-D1E": e * d1 - d1 * e - (k1 - k2 - 1) * e,
        "FD1+D3F": f * d1 + d3 * f - c * f,
        "D1F-FD1": d1 * f - f * d1 - (k1 - k2 - 1) * f,
        "D2E": d2 * e,
        "FD2": f * d2,
    }


def two_step_fe(p) -> GeneratorExpr:
    """FE written through D2, D3; vanishes as an element of the algebra."""
    g = GeneratorExpr.gen
    d2, d3, e, f = g("D2"), g("D3"), g("E"), g("F")
    k1, k2 = p.k1, p.k2
    P = p.alpha + p.beta
    pre = Fraction((k1 - k2 - 1) ** 3, (k1 - k2) ** 2)
    rhs = (d2 * ((k1 - k2) * d2 + (k1 - k2 - 1) * (P - 2 * k1 + 3))
           * ((k2 - k1) * d2 - (k1 - k2 - 1) ** 2 * (P - k1 - k2 + 1)) * (d2 + d3 - (P - k1 - k2 + 2)))
    return pre * f * e - rhs


def relation_set(bundle, which: str = "all") -> dict[str, GeneratorExpr]:
    """Named relations of a family; ``which`` is fact, coef, two-step-list (alias fact-analogues), fe or all."""
    p = bundle.params
    out: dict[str, GeneratorExpr] = {}
    if bundle.kind == "one-step":
        if which not in ("fact", "coef", "all"):
            raise ValueError(f"relation set {which!r} belongs to the two-step family")
        if which in ("fact", "all"):
            f = one_step_factors(p)
            out["fact"] = f[0] * f[1] * f[2]
        if which in ("coef", "all"):
            d1, d2 = GeneratorExpr.gen("D1"), GeneratorExpr.gen("D2")
            s = one_step_coef(p)
            out["coef"] = (s[0] + s[1] * d1 + s[2] * d2 + s[3] * d1 * d1 + s[4] * d2 * d2 + s[5] * d1 * d2
                           + s[6] * d1 ** 3 + s[7] * d2 ** 3 + s[8] * d1 * d1 * d2 - d1 * d2 * d2)
        return out
    if which not in ("two-step-list", "fact-analogues", "fe", "all"):
        raise ValueError(f"relation set {which!r} belongs to the one-step family")
    if which != "fe":
        out.update(two_step_relations(p))
    if which in ("fe", "all"):
        out["FE"] = two_step_fe(p)
    return out


def partial_products_nonzero(family: PolyFamily, n_check: int = 10, gens: Generators | None = None) -> CheckResult:
    """Each factor and each pair of factors is nonzero, the triple product vanishes."""
    if family.bundle.kind != "one-step":
        raise ValueError("the three-factor identity belongs to the one-step family")
    gens = gens or family_generators(family)
    f = one_step_factors(family.bundle.params)
    cases = {"f1": f[0], "f2": f[1], "f3": f[2], "f1f2": f[0] * f[1], "f1f3": f[0] * f[2], "f2f3": f[1] * f[2]}
    witnesses = {}
    for name, e in cases.items():
        hit = None
        for n in range(n_check + 1):
            lam = e.eval_eigen({k: v(n) for k, v in gens.lams.items()}, gens.size)
            if not lam.is_zero():
                hit = n
                break
        if hit is None:
            return CheckResult(False, {"product": name}, f"{name} vanishes for n <= {n_check}")
        witnesses[name] = hit
    full = relation_check(family, f[0] * f[1] * f[2], n_check, gens)
    if not full:
        return CheckResult(False, {"product": "f1f2f3", **(full.witness or {})}, "full product is nonzero")
    return CheckResult(True, witnesses, "all partial products nonzero; full product vanishes")


def solve_by_eigenvalue(family: PolyFamily, lam: EigenSeq, r: int, n_max: int | None = None) -> MatDiffOp:
    """The unique order-r operator with D P_n^* = P_n^* lam(n)."""
    n_max = 2 * r + 4 if n_max is None else n_max
    family = _ensure(family, n_max)
    size = family.bundle.size
    q = family.pstar
    # On the given family, D is fixed by lam(m) for m <= r; the rest must agree.
    basis = _initial_basis(_monic(family), r, size)
    # target eigenvalues for the monic family: A_n lam(n) A_n^{-1}
    targets = [family.leading(m) @ lam(m) @ family.leading(m).inverse() for m in range(n_max + 1)]
    coeffs = []
    for m in range(r + 1):
        for a in range(size):
            for b in range(size):
                coeffs.append(targets[m][a, b])
    op = _combine(basis, coeffs, size)
    for n in range(r + 1, n_max + 1):
        if _apply_raw(op, q[n]) != q[n] @ lam(n):
            raise NoSolution(f"no order-{r} operator has this eigenvalue sequence (fails at n={n})")
    return _to_matdiffop(op, size)


def commutant(family: PolyFamily, op: MatDiffOp, r: int, space: OperatorSpace | None = None) -> OperatorSpace:
    """Elements of operator_space(r) commuting with op."""
    space = space or operator_space(family, r)
    size = family.bundle.size
    gens = space.basis
    # [op, sum c_i B_i] = sum c_i [op, B_i]; stack flattened commutator coefficients
    vecs = []
    for b in gens:
        c = commutator(op, b)
        vecs.append(_flat_any(c, r + op.order, size))
    rows = [list(x) for x in zip(*vecs)] if vecs else []
    ns = nullspace_exact(rows, len(gens)) if rows else []
    if not rows:
        ns = [[ONE if i == j else ZERO for i in range(len(gens))] for j in range(len(gens))]
    raw = [_from_matdiffop(b, r) for b in gens]
    combos = [_combine(raw, v, size) for v in ns]
    ops = [_to_matdiffop(x, size) for x in combos]
    dims = {o: sum(1 for x in ops if x.order <= o) for o in range(r + 1)}
    return OperatorSpace(r, ops, dims, space.n_max, space.history)


def _flat_any(op: MatDiffOp, r: int, size: int) -> list[Fraction]:
    out = []
    for j in range(r + 1):
        f = op.poly_coeff(j) if j <= op.order else MatrixPoly.zero(size)
        for e in range(r + 1):
            for row in f.coeff(e).rows:
                out.extend(row)
    return out


def span_contains(space_ops: Sequence[MatDiffOp], op: MatDiffOp, r: int) -> bool:
    size = op.size
    vecs = [_flat_any(b, r, size) for b in space_ops]
    return rank(vecs + [_flat_any(op, r, size)]) == rank(vecs) if vecs else op.is_zero()
