from __future__ import annotations

from functools import lru_cache

import pytest

from mvop.algebra import family_generators, operator_space, solve_by_eigenvalue
from mvop.eigensolver import generate_family
from mvop.families import (
    DEFAULT_ONE_STEP,
    DEFAULT_TWO_STEP,
    SECOND_ONE_STEP,
    SECOND_TWO_STEP,
    build_family,
)

PARAMS = {
    ("one-step", "default"): DEFAULT_ONE_STEP,
    ("one-step", "second"): SECOND_ONE_STEP,
    ("two-step", "default"): DEFAULT_TWO_STEP,
    ("two-step", "second"): SECOND_TWO_STEP,
}


@lru_cache(maxsize=None)
def bundle(kind: str, which: str = "default"):
    return build_family(kind, PARAMS[kind, which])


@lru_cache(maxsize=None)
def family(kind: str, which: str = "default", opname: str = "D1", N: int = 14):
    return generate_family(bundle(kind, which), opname, N)


@lru_cache(maxsize=None)
def space(kind: str, which: str, r: int):
    return operator_space(family(kind, which, N=2 * r + 4), r)


@lru_cache(maxsize=None)
def ef_ops(which: str = "default"):
    fam = family("two-step", which)
    b = fam.bundle
    return {k: solve_by_eigenvalue(fam, b.eigen[k], 4) for k in ("E", "F")}


@lru_cache(maxsize=None)
def generators(kind: str, which: str = "default"):
    extra = ef_ops(which) if kind == "two-step" else None
    return family_generators(family(kind, which), extra)


@pytest.fixture(params=["one-step", "two-step"])
def kind(request):
    return request.param


@pytest.fixture(params=["default", "second"])
def which(request):
    return request.param


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[tuple[int, str], tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted({n for n, _ in ACCEPTANCE}):
        rows = {w: ACCEPTANCE[(num, w)] for n, w in ACCEPTANCE if n == num}
        ok = all(v[0] for v in rows.values())
        detail = "; ".join(f"{w}: {d}" for w, (_, d) in sorted(rows.items()) if d)
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else ""))
