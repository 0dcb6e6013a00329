"""mvop command line: generators and exact checks with JSON/CSV/Markdown reports."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from typing import Any, Callable

import mpmath

from . import __version__
from .algebra import (
    GeneratorExpr,
    NoSolution,
    NotInAlgebra,
    commutant,
    family_generators,
    operator_space,
    partial_products_nonzero,
    relation_set,
    relation_check,
    solve_by_eigenvalue,
)
from .core import Matrix, MatrixPoly, MatRatFn, fmt_q, parse_rational
from .diffops import EigenSeq, MatDiffOp, conjugate_by
from .eigensolver import GenericityError, generate_family, monic_orthogonal, verify_eigen_equation
from .families import FamilyBundle, OneStepParams, ParameterError, TwoStepParams, build_family, ef_leading
from .hypergeom import annihilation_check, build_kron_system, solve_ab_factorization
from .weights import WeightError, inner_product, positivity_probe, symmetry_check, verify_weight_ode

EXIT_OK, EXIT_FAIL, EXIT_PARAMS, EXIT_USAGE = 0, 1, 2, 3

PUBLISHED_DIMS = {
    "one-step": [1, 0, 2, 0, 3, 0, 3, 0, 3, 0, 3, 0, 3],
    "two-step": [1, 0, 3, 0, 6, 0, 6, 0, 6, 0, 6, 0, 6],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# encoding


def encode(x: Any) -> Any:
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Matrix):
        return [[fmt_q(v) for v in row] for row in x.rows]
    if isinstance(x, MatrixPoly):
        return [encode(c) for c in x.coeffs]
    if isinstance(x, MatRatFn):
        return {"num": encode(x.num), "den": [fmt_q(c) for c in x.den.c]}
    if isinstance(x, EigenSeq):
        return [[[fmt_q(c) for c in p.c] for p in row] for row in x.entries]
    if isinstance(x, MatDiffOp):
        return [encode(c.to_poly()) if c.is_polynomial() else encode(c) for c in x.coeffs]
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 8)
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    return str(x)


class Report:
    def __init__(self, bundle: FamilyBundle, command: str, timing: bool):
        self.kind = bundle.kind
        self.params = {k: fmt_q(Fraction(v)) for k, v in bundle.params.as_dict().items()}
        self.command = command
        self.timing = timing
        self.checks: list[dict] = []
        self.data: dict[str, Any] = {}

    def check(self, name: str, fn: Callable[[], tuple[str, Any]]) -> None:
        t0 = time.perf_counter()
        status, witness = fn()
        entry = {"name": name, "status": status}
        if witness is not None:
            entry["witness"] = encode(witness)
        if self.timing:
            entry["timing"] = round(time.perf_counter() - t0, 3)
        self.checks.append(entry)

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def as_dict(self) -> dict:
        out = {"family": self.kind, "params": self.params, "command": self.command, "checks": self.checks}
        if self.data:
            out["data"] = encode(self.data)
        return out


def render(report: Report, fmt: str) -> str:
    d = report.as_dict()
    if fmt == "json":
        return json.dumps(d, indent=2) + "\n"
    rows = [["check", "status", "detail"]]
    for c in d["checks"]:
        w = c.get("witness")
        rows.append([c["name"], c["status"], json.dumps(w) if w is not None else ""])
    table = d.get("data", {}).get("table")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(rows)
        if table:
            w.writerow([])
            w.writerows([list(r) for r in table])
        return buf.getvalue()
    lines = [f"# {d['family']} {d['command']}", "", "| " + " | ".join(rows[0]) + " |", "|---|---|---|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows[1:]]
    if table:
        lines += ["", "| " + " | ".join(table[0]) + " |", "|" + "---|" * len(table[0])]
        lines += ["| " + " | ".join(r) + " |" for r in table[1:]]
    return "\n".join(lines) + "\n"


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def poly_witness(a: MatrixPoly, b: MatrixPoly) -> dict | None:
    """First coefficient entry where two matrix polynomials differ."""
    for d in range(max(a.degree, b.degree) + 1):
        ca, cb = a.coeff(d), b.coeff(d)
        for i in range(a.size):
            for j in range(a.size):
                if ca[i, j] != cb[i, j]:
                    return {"t_power": d, "entry": f"({i + 1},{j + 1})", "lhs": ca[i, j], "rhs": cb[i, j]}
    return None


def op_witness(a: MatDiffOp, b: MatDiffOp) -> dict | None:
    for j in range(max(a.order, b.order) + 1):
        ca = a.coeff(j) if j <= a.order else MatRatFn.coerce(Matrix.zeros(a.size), a.size)
        cb = b.coeff(j) if j <= b.order else MatRatFn.coerce(Matrix.zeros(b.size), b.size)
        if ca != cb:
            if ca.is_polynomial() and cb.is_polynomial():
                return {"derivative": j, **poly_witness(ca.to_poly(), cb.to_poly())}
            return {"derivative": j, "lhs": ca, "rhs": cb}
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_polys(b, args, rep):
    fam = generate_family(b, "D1", args.n, args.normalization, jobs=args.jobs)
    rep.data["polynomials"] = {str(n): p for n, p in enumerate(fam.pstar)}
    rep.check("leading coefficients invertible", lambda: (_status(all(fam.leading(n).det() != 0 for n in range(args.n + 1))), None))


def cmd_check_eigen(b, args, rep):
    fam = generate_family(b, "D1", args.n, jobs=args.jobs)
    names = ["D1", "D2"] + (["D3"] if b.kind == "two-step" else [])
    for name in names:
        r = verify_eigen_equation(fam, name)
        rep.check(f"D1 family, {name}", lambda r=r: (_status(r.ok), r.witness))
    hyp = generate_family(b, "D_hyp", args.n, jobs=args.jobs)
    r = verify_eigen_equation(hyp, "D_hyp")
    rep.check("hypergeometric-form family, D_hyp", lambda: (_status(r.ok), r.witness))


def cmd_check_orth(b, args, rep):
    fam = generate_family(b, "D1", args.n, jobs=args.jobs)

    def orth():
        for n in range(args.n + 1):
            for m in range(n):
                g = inner_product(fam.p(m), fam.p(n), b.W_tilde)
                if not g.is_zero():
                    return "fail", {"m": m, "n": n, "gram": g}
        return "pass", None

    def oracle():
        qs = monic_orthogonal(b.W_tilde, min(args.n, 5))
        mon = fam.monic()
        for n, q in enumerate(qs):
            if q != mon.p(n):
                return "fail", {"n": n, **poly_witness(q, mon.p(n))}
        return "pass", None

    rep.check(f"(P_m, P_n) = 0 for m < n <= {args.n}", orth)
    rep.check("monic Gram-Schmidt agrees with rescaled family", oracle)


def cmd_check_symmetry(b, args, rep):
    if args.op not in b.operators:
        raise UsageError(f"unknown operator {args.op!r}; choose from {sorted(b.operators)}")
    op = b.operators[args.op]
    if not op.is_polynomial():
        raise UsageError(f"{args.op} has rational coefficients; symmetry is checked on polynomial operators")
    r = symmetry_check(op, b.W_tilde, args.degree)
    rep.check(f"{args.op} symmetric to degree {args.degree}", lambda: (_status(r.ok), r.witness))


def cmd_algebra_dims(b, args, rep):
    fam = generate_family(b, "D1", args.nmax or 2 * args.max_order + 4, jobs=args.jobs)
    sp = operator_space(fam, args.max_order, args.nmax)
    table = sp.new_dims()
    rep.data["table"] = [["order", "new"]] + [[str(o), str(c)] for o, c in table.items()]
    rep.data["history"] = sp.history
    pub = PUBLISHED_DIMS[b.kind]
    got = [table[o] for o in range(args.max_order + 1)]
    rep.check("dimension stabilized", lambda: (_status(sp.stable), {"history": sp.history}))
    if args.max_order < len(pub):
        rep.check("matches published table", lambda: (_status(got == pub[: len(got)]), {"computed": got}))


def _relations(b: FamilyBundle, which: str) -> dict[str, GeneratorExpr]:
    try:
        return relation_set(b, which)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _ef_ops(fam) -> dict[str, MatDiffOp]:
    b = fam.bundle
    return {k: solve_by_eigenvalue(fam, b.eigen[k], 4) for k in ("E", "F")}


def cmd_algebra_relations(b, args, rep):
    rels = _relations(b, args.which)
    fam = generate_family(b, "D1", max(args.n_check, 12), jobs=args.jobs)
    extra = _ef_ops(fam) if b.kind == "two-step" else None
    gens = family_generators(fam, extra)
    for name, expr in rels.items():
        r = relation_check(fam, expr, args.n_check, gens)
        rep.check(name, lambda r=r: (_status(r.ok), r.witness if not r.ok else {"detail": r.detail}))
    if b.kind == "one-step" and args.which in ("fact", "all"):
        r = partial_products_nonzero(fam, args.n_check, gens)
        rep.check("single factors and pairs nonzero", lambda: (_status(r.ok), r.witness))


def cmd_algebra_recover_ef(b, args, rep):
    if b.kind != "two-step":
        raise UsageError("E and F exist for the two-step family only")
    fam = generate_family(b, "D1", 12, jobs=args.jobs)
    ops = _ef_ops(fam)
    g4, h4 = ef_leading(b)
    g4c, _ = ef_leading(b, corrected=True)
    e4, f4 = ops["E"].poly_coeff(4), ops["F"].poly_coeff(4)
    rep.data["E_leading"] = e4
    rep.data["F_leading"] = f4
    rep.check("E has order 4", lambda: (_status(ops["E"].order == 4), None))
    rep.check("F has order 4", lambda: (_status(ops["F"].order == 4), None))
    rep.check("E leading coefficient equals displayed G4", lambda: (_status(e4 == g4), poly_witness(e4, g4)))
    rep.check("E leading coefficient equals corrected G4", lambda: (_status(e4 == g4c), poly_witness(e4, g4c)))
    rep.check("F leading coefficient equals displayed H4", lambda: (_status(f4 == h4), poly_witness(f4, h4)))
    for k in ("E", "F"):
        r = symmetry_check(ops[k], b.W_tilde, 4)
        rep.check(f"{k} is not symmetric", lambda r=r: (_status(not r.ok), r.witness))


def cmd_algebra_commutant(b, args, rep):
    if args.op not in ("D1", "D2", "D3") or args.op not in b.operators:
        raise UsageError(f"commutant is available for D1, D2{', D3' if b.kind == 'two-step' else ''}")
    fam = generate_family(b, "D1", 2 * args.order + 4, jobs=args.jobs)
    sp = operator_space(fam, args.order)
    cm = commutant(fam, b.operators[args.op], args.order, sp)
    rep.data["dimension"] = cm.dim
    rep.data["space_dimension"] = sp.dim
    rep.data["basis"] = cm.basis
    rep.check(f"commutant of {args.op} to order {args.order}", lambda: ("pass", {"dimension": cm.dim, "space": sp.dim}))


def cmd_hypergeom_verify(b, args, rep):
    for n in range(args.n + 1):
        r = annihilation_check(b, n, args.terms_extra)
        rep.check(f"series truncates and rebuilds P_{n}^*", lambda r=r: (_status(r.ok), r.witness if not r.ok else None))


def cmd_hypergeom_factor(b, args, rep):
    for n in range(args.n + 1):
        s = build_kron_system(b, n)

        def run(s=s):
            f = solve_ab_factorization(s, args.precision)
            w = {"A+B+I-Ut": f.residual_sum, "AB-Tt": f.residual_product, "A[1,1]": mpmath.re(f.A[0, 0])}
            ok = True
            if b.kind == "two-step":
                blk = f.block(2, 3, b.size)
                a23 = max(abs(blk[i, j]) for i in range(b.size) for j in range(b.size))
                w["max|A23|"] = a23
                ok = a23 == 0
            return _status(ok), w

        rep.check(f"A, B factorization at n={n}", run)


def cmd_weights_ode(b, args, rep):
    r = verify_weight_ode(b.W_tilde, b.ode_A, b.ode_B)
    rep.check("t(1-t)M' = ((1-t)A + tB)M + M((1-t)A + tB)^T", lambda: (_status(r.ok), None if r.ok else r.witness))
    p = positivity_probe(b.W_tilde)
    rep.check("weight positive definite at probe points", lambda: (_status(p.ok), p.witness))


def cmd_conjugate(b, args, rep):
    conj = conjugate_by(b.operators["D_original"], b.psi_star, require_polynomial=True)
    shown = b.printed.get("D_tilde", b.operators["D_tilde"])
    rep.check("conjugated operator equals displayed D_tilde", lambda: (_status(conj == shown), op_witness(conj, shown)))
    rep.check("conjugated operator equals D1", lambda: (_status(conj == b.operators["D1"]), op_witness(conj, b.operators["D1"])))


COMMANDS = {
    ("polys",): cmd_polys,
    ("check", "eigen"): cmd_check_eigen,
    ("check", "orthogonality"): cmd_check_orth,
    ("check", "symmetry"): cmd_check_symmetry,
    ("algebra", "dims"): cmd_algebra_dims,
    ("algebra", "relations"): cmd_algebra_relations,
    ("algebra", "recover-ef"): cmd_algebra_recover_ef,
    ("algebra", "commutant"): cmd_algebra_commutant,
    ("hypergeom", "verify"): cmd_hypergeom_verify,
    ("hypergeom", "factor-ab"): cmd_hypergeom_factor,
    ("weights", "verify-ode"): cmd_weights_ode,
    ("conjugate", "verify"): cmd_conjugate,
}


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mvop", description="Matrix-valued orthogonal polynomials: generators and exact checks.")
    ap.add_argument("--version", action="version", version=f"mvop {__version__}")
    fam = ap.add_subparsers(dest="family", required=True, parser_class=_Parser)
    for kind in ("one-step", "two-step"):
        f = fam.add_parser(kind)
        f.add_argument("--alpha", type=_rational, required=True)
        f.add_argument("--beta", type=_rational, required=True)
        if kind == "one-step":
            f.add_argument("--k", type=int, required=True)
        else:
            f.add_argument("--k1", type=int, required=True)
            f.add_argument("--k2", type=int, required=True)
        f.add_argument("--format", choices=("json", "csv", "md"), default="json")
        f.add_argument("--out")
        f.add_argument("--jobs", type=int, default=1)
        f.add_argument("--no-timing", action="store_true")
        cmd = f.add_subparsers(dest="command", required=True, parser_class=_Parser)

        c = cmd.add_parser("polys")
        c.add_argument("--n", type=int, required=True)
        c.add_argument("--normalization", choices=("appendix", "monic", "pstar-zero"), default="appendix")

        chk = cmd.add_parser("check").add_subparsers(dest="sub", required=True, parser_class=_Parser)
        c = chk.add_parser("eigen")
        c.add_argument("--n", type=int, required=True)
        c = chk.add_parser("orthogonality")
        c.add_argument("--n", type=int, required=True)
        c = chk.add_parser("symmetry")
        c.add_argument("--op", required=True)
        c.add_argument("--degree", type=int, required=True)

        alg = cmd.add_parser("algebra").add_subparsers(dest="sub", required=True, parser_class=_Parser)
        c = alg.add_parser("dims")
        c.add_argument("--max-order", type=int, required=True)
        c.add_argument("--nmax", type=int)
        c = alg.add_parser("relations")
        c.add_argument("--which", choices=("fact", "coef", "two-step-list", "fact-analogues", "fe", "all"), default="all")
        c.add_argument("--n-check", type=int, default=12)
        alg.add_parser("recover-ef")
        c = alg.add_parser("commutant")
        c.add_argument("--op", required=True)
        c.add_argument("--order", type=int, required=True)

        hg = cmd.add_parser("hypergeom").add_subparsers(dest="sub", required=True, parser_class=_Parser)
        c = hg.add_parser("verify")
        c.add_argument("--n", type=int, required=True)
        c.add_argument("--terms-extra", type=int, default=4)
        c = hg.add_parser("factor-ab")
        c.add_argument("--n", type=int, required=True)
        c.add_argument("--precision", type=int, default=256)

        w = cmd.add_parser("weights").add_subparsers(dest="sub", required=True, parser_class=_Parser)
        w.add_parser("verify-ode")
        cj = cmd.add_parser("conjugate").add_subparsers(dest="sub", required=True, parser_class=_Parser)
        cj.add_parser("verify")
    return ap


def _bundle(args) -> FamilyBundle:
    if args.family == "one-step":
        return build_family("one-step", OneStepParams(args.alpha, args.beta, args.k))
    return build_family("two-step", TwoStepParams(args.alpha, args.beta, args.k1, args.k2))


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    key = (args.command,) + ((args.sub,) if getattr(args, "sub", None) else ())
    for name in ("n", "degree", "max_order", "order", "jobs", "precision"):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) < 0:
            print(f"usage error: --{name.replace('_', '-')} must be nonnegative", file=stderr)
            return EXIT_USAGE
    try:
        bundle = _bundle(args)
        probe = positivity_probe(bundle.W)
        if not probe.ok:
            raise ParameterError(f"weight not positive definite: {probe.witness}", "positivity of W")
        rep = Report(bundle, " ".join(key), timing=not args.no_timing)
        COMMANDS[key](bundle, args, rep)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except (ParameterError, GenericityError, WeightError) as exc:
        expr = getattr(exc, "expression", "")
        print(f"invalid parameters: {exc}" + (f" [{expr}]" if expr else ""), file=stderr)
        return EXIT_PARAMS
    except (NotInAlgebra, NoSolution) as exc:
        print(f"check failed: {exc}", file=stderr)
        return EXIT_FAIL
    text = render(rep, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_FAIL if rep.failed else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
