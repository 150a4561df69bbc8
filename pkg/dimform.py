# dimform.py
# Closed-form relative dimensions for the D and K families, exact threshold
# scans, the depth-4 edge bound for the D2 family, and cross-checks of every
# formula against the eigen-relation on a concrete graph.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np
import sympy

from bigraph import parse
from qarith import (
    AlgebraicReal,
    QRational,
    exact_compare,
    index_to_q,
    parse_bound,
    q,
    q_to_index,
    quantum_int,
)
from schema import CheckResult
from spectral import DimensionInconsistency, Vertex, norm_squared, relative_value

log = logging.getLogger(__name__)

Target = Union[AlgebraicReal, str, int, Fraction]

# the univalence lemma used by the D2 edge bound holds below this index
UNIVALENT_INDEX = 6.245

CROSS_CHECK_SAMPLES = 20
CROSS_CHECK_SEED = 20140131
CROSS_CHECK_RANGE = (1.6, 2.2)

D_PLUS = "bwd1v1p1v1x0p1x1p0x1duals1v1x2"


class FormulaError(ValueError):
    """Unknown formula id, or a threshold scan without exactly one crossing."""


@dataclass(frozen=True)
class Oracle:
    """Where a formula can be read off the eigen-relation: graph, weighted vertices, assumptions."""

    graph: str
    weights: dict[Vertex, float]
    closed: Optional[frozenset[Vertex]] = None
    fixed: dict[Vertex, float] = field(default_factory=dict)


@dataclass(frozen=True)
class NamedFormula:
    id: str
    family: str
    description: str
    value: QRational
    printed: Optional[QRational] = None
    oracle: Optional[Oracle] = None

    def __call__(self, qv: float) -> float:
        return self.value(qv)


# -----------------------------
# Dimension bookkeeping along the D family
# -----------------------------
def fact_table(dim_p: QRational) -> dict[str, QRational]:
    """Dimensions of Q, R, P', Q' given dim(P), valid while R has no depth-4 neighbour."""
    two, three = quantum_int(2), quantum_int(3)
    r = three / two
    dim_q = three - dim_p
    return {
        "P": dim_p,
        "Q": dim_q,
        "R": r,
        "P'": two * dim_p - r - two,
        "Q'": two * dim_q - r - two,
    }


def next_dimension(dim_prev: QRational, dim_here: QRational) -> QRational:
    """Dimension of the unique upward neighbour of a vertex with one vertex below it."""
    return quantum_int(2) * dim_here - dim_prev


def _d1_p_prime() -> QRational:
    # P' univalent upward: dim P = [2] dim P', and dim P' = [2] dim P - [R] - [2]
    two, three = quantum_int(2), quantum_int(3)
    return (three / two + two) / three


def _d2_p() -> QRational:
    # P' is attached to a univalent vertex of dimension 1, so dim P' = [2]
    two, three = quantum_int(2), quantum_int(3)
    return (two + three / two + two) / two


def _from(expr: str) -> QRational:
    return QRational.from_expr(sympy.sympify(expr, locals={"q": q}))


_D_WEED = "bwd1v1p1v1x0p1x1p0x1v0x0x1duals1v1x2v1"
_D2_WEED = "bwd1v1p1v1x0p1x1p0x1v1x0x0p0x0x1duals1v1x2v1x2"
_D2_ASSUMED = frozenset({(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (4, 0)})


@lru_cache(maxsize=1)
def formulas() -> dict[str, NamedFormula]:
    two, three, five = quantum_int(2), quantum_int(3), quantum_int(5)
    p1 = _d1_p_prime()
    d2 = fact_table(_d2_p())
    table = [
        NamedFormula(
            "factPplusQ", "D", "dim P + dim Q", three,
            oracle=Oracle(_D_WEED, {(2, 0): 1.0, (2, 1): 1.0}),
        ),
        NamedFormula("factR", "D", "dim R", three / two, oracle=Oracle(_D_WEED, {(3, 1): 1.0})),
        NamedFormula(
            "dimPPrimeD1", "D1", "dim P' when P' has no depth-4 neighbour", p1,
            printed=_from("q*(2*q**4 + 3*q**2 + 2)/((q**2 + 1)*(q**2 - q + 1)*(q**2 + q + 1))"),
            oracle=Oracle(_D_WEED, {(3, 0): 1.0}),
        ),
        NamedFormula(
            "dimPPrimeD1Derivative", "D1", "d/dq of dim P' in the D1 family", p1.derivative(),
            printed=_from("(-2*q**10 - 5*q**8 - 4*q**6 + 4*q**4 + 5*q**2 + 2)/(q**6 + 2*q**4 + 2*q**2 + 1)**2"),
        ),
        NamedFormula(
            "dimPD2", "D2", "dim P when P' meets a univalent dimension-1 vertex", d2["P"],
            printed=(2 + 3 * three) / two**2,
            oracle=Oracle(_D2_WEED, {(2, 0): 1.0}, _D2_ASSUMED, {(4, 0): 1.0}),
        ),
        NamedFormula(
            "dimQD2", "D2", "dim Q in the same situation", d2["Q"],
            printed=(five - three - 1) / two**2,
            oracle=Oracle(_D2_WEED, {(2, 1): 1.0}, _D2_ASSUMED, {(4, 0): 1.0}),
        ),
        NamedFormula(
            "dimQPrimeD2", "D2", "dim Q' in the same situation", d2["Q'"],
            printed=_from("(q**8 - 2*q**6 - 4*q**4 - 2*q**2 + 1)/(q**3*(q**2 + 1))"),
            oracle=Oracle(_D2_WEED, {(3, 2): 1.0}, _D2_ASSUMED, {(4, 0): 1.0}),
        ),
        NamedFormula(
            "sumDoublePrimeD2", "D2", "total dimension at depth 4 above P' and Q'",
            two * (d2["P'"] + d2["Q'"]) - three,
            printed=_from("(q**8 - 2*q**6 - 3*q**4 - 2*q**2 + 1)/q**4"),
            oracle=Oracle(_D2_WEED, {(4, 0): 1.0, (4, 1): 1.0}),
        ),
        NamedFormula(
            "dD3", "D3", "univalent depth-4 vertex away from R, with R meeting a univalent vertex",
            three - 2 - 2 * two**2 / three,
            printed=_from(
                "(q**16 - q**14 - 5*q**12 - 6*q**10 + 6*q**6 + 5*q**4 + q**2 - 1)"
                "/(q**2*(q**4 - 1)*(q**4 + q**2 + 1)**2)"
            ),
            oracle=Oracle(
                "bwd1v1p1v1x0p1x1p0x1v1x0x0p1x0x0p0x1x0v1x0x0p1x0x0duals1v1x2v2x1x3",
                {(4, 1): 1.0},
            ),
        ),
        NamedFormula(
            "dK", "K", "univalent depth-3 vertex of a non-cylinder K weed", five / two**3,
            printed=_from("(q**10 - 1)/(q*(q**2 - 1)*(q**2 + 1)**3)"),
            oracle=Oracle("bwd1v1p1v1x1p0x1p0x1v0x1x0p0x1x0duals1v1x2v2x1", {(3, 2): 1.0}),
        ),
        NamedFormula(
            "dKprime", "Kprime", "depth-6 vertex of the K' plus graph",
            _from(
                "(q**18 - 3*q**16 - 3*q**14 - q**12 + 2*q**10 - 2*q**8 + q**6 + 3*q**4 + 3*q**2 - 1)"
                "/(2*q**6*(q**2 - 1)*(q**2 + 1)**2)"
            ),
            oracle=Oracle("bwd1v1p1v0x1p1x1p0x1v1x0x0p0x0x1v1x1v1duals1v1x2v1x2v1", {(6, 0): 1.0}),
        ),
    ]
    return {f.id: f for f in table}


def get_formula(formula_id: str) -> NamedFormula:
    try:
        return formulas()[formula_id]
    except KeyError:
        raise FormulaError(f"unknown formula {formula_id!r}; known: {', '.join(sorted(formulas()))}") from None


def eval_formula(formula_id: str, qv: float) -> float:
    return get_formula(formula_id)(qv)


def derivative(formula_id: str) -> QRational:
    return get_formula(formula_id).value.derivative()


# -----------------------------
# Exact threshold scans
# -----------------------------
def _target(t: Target) -> AlgebraicReal:
    if isinstance(t, AlgebraicReal):
        return t
    if isinstance(t, str):
        return parse_bound(t)
    return AlgebraicReal.rational(t)


def _sign(f: QRational, qv: Fraction, target: AlgebraicReal) -> int:
    """Exact sign of f(qv) - target."""
    return {"LT": 1, "EQ": 0, "GT": -1}[exact_compare(target, f.exact_at(qv))]


def scan_threshold(
    formula_id: str,
    target: Target,
    lo: float,
    hi: float,
    samples: int = 64,
    tol: float = 1e-10,
) -> float:
    """The unique q in [lo, hi] where the formula crosses `target`."""
    f = get_formula(formula_id).value
    t = _target(target)
    a, b = Fraction(lo).limit_denominator(10**9), Fraction(hi).limit_denominator(10**9)
    if a >= b:
        raise FormulaError(f"empty scan interval [{lo}, {hi}]")
    grid = [a + (b - a) * k / samples for k in range(samples + 1)]
    signs = [_sign(f, g, t) for g in grid]
    brackets = []
    for k in range(samples):
        if signs[k] == 0:
            brackets.append((grid[k], grid[k]))
        elif signs[k] * signs[k + 1] < 0:
            brackets.append((grid[k], grid[k + 1]))
    if signs[-1] == 0:
        brackets.append((grid[-1], grid[-1]))
    if not brackets:
        raise FormulaError(f"{formula_id} does not cross {float(t):.9g} on [{lo}, {hi}]")
    if len(brackets) > 1:
        raise FormulaError(f"{formula_id} crosses {float(t):.9g} {len(brackets)} times on [{lo}, {hi}]")

    x0, x1 = brackets[0]
    s0 = _sign(f, x0, t)
    while x1 - x0 > tol:
        mid = (x0 + x1) / 2
        sm = _sign(f, mid, t)
        if sm == 0:
            return float(mid)
        if sm == s0:
            x0 = mid
        else:
            x1 = mid
    return float((x0 + x1) / 2)


# -----------------------------
# D2: how many edges run from depth 3 to depth 4
# -----------------------------
def edge_bound_d2(qv: float) -> int:
    """Upper bound on depth-4 vertices above P' and Q' (each of dimension >= 1).

    A depth-4 vertex of dimension other than 1 has dimension at least sqrt 2;
    below UNIVALENT_INDEX a dimension-1 vertex there forces a contradiction.
    """
    s = eval_formula("sumDoublePrimeD2", qv)
    n = max(2, math.floor(s))
    univalent = q_to_index(qv) < UNIVALENT_INDEX
    if s < 5:
        n = min(n, 4)
    if univalent and s < 3 + math.sqrt(2):
        n = min(n, 3)
    if univalent and s < 3 * math.sqrt(2):
        n = min(n, 2)
    return n


# -----------------------------
# Cross-checks
# -----------------------------
def oracle_value(formula_id: str, qv: float) -> float:
    nf = get_formula(formula_id)
    if nf.oracle is None:
        raise FormulaError(f"{formula_id} has no graph to check against")
    o = nf.oracle
    delta = qv + 1.0 / qv
    return relative_value(parse(o.graph), delta, o.weights, closed=o.closed, fixed=o.fixed)


def sample_q(n: int = CROSS_CHECK_SAMPLES, seed: int = CROSS_CHECK_SEED) -> tuple[float, ...]:
    rng = np.random.default_rng(seed)
    return tuple(float(x) for x in rng.uniform(*CROSS_CHECK_RANGE, size=n))


def cross_check(formula_id: str, q_samples: Optional[tuple[float, ...]] = None, tol: float = 1e-10) -> list[CheckResult]:
    """Printed form vs derived form (exactly) and formula vs eigen-relation at random q (numerically)."""
    q_samples = sample_q() if q_samples is None else q_samples
    nf = get_formula(formula_id)
    out = []
    if nf.printed is not None:
        same = nf.printed == nf.value
        out.append(CheckResult(name=f"{formula_id}:printed", max_deviation=0.0 if same else 1.0, passed=same,
                               detail=None if same else f"{nf.printed} != {nf.value}"))
    if nf.id == "dimPPrimeD1Derivative":
        base = get_formula("dimPPrimeD1").value.derivative()
        same = base == nf.value
        out.append(CheckResult(name=f"{formula_id}:derivative", max_deviation=0.0 if same else 1.0, passed=same))
    if nf.oracle is not None:
        worst, detail = 0.0, None
        for qv in q_samples:
            try:
                dev = abs(nf(qv) - oracle_value(formula_id, qv))
            except DimensionInconsistency as e:
                dev, detail = math.inf, str(e)
            worst = max(worst, dev)
        out.append(CheckResult(name=f"{formula_id}:graph", max_deviation=worst, passed=worst <= tol, detail=detail))
    return out


def d1_norm_q() -> float:
    """q at the norm of the D graph; every D1 graph has at least this q."""
    return index_to_q(float(norm_squared(parse(D_PLUS))))


# -----------------------------
# Family arguments
# -----------------------------
def window_q(index_min: str = "3+sqrt5", index_max: str = "31/5") -> tuple[float, float]:
    return index_to_q(float(parse_bound(index_min))), index_to_q(float(parse_bound(index_max)))


def family_argument(family: str, index_min: str = "3+sqrt5", index_max: str = "31/5") -> tuple[list[str], bool]:
    """The closed-form part of a family elimination: report lines and whether it closes."""
    q_lo, q_hi = window_q(index_min, index_max)
    lines = [f"window q in [{q_lo:.6f}, {q_hi:.6f}]"]
    if family == "D1":
        q_min = max(q_lo, d1_norm_q())
        cut = scan_threshold("dimPPrimeD1", 1, 1.2, 1.75)
        slope = get_formula("dimPPrimeD1Derivative").value.num
        start = sympy.Rational(Fraction(q_min).limit_denominator(10**6))
        decreasing = slope.count_roots(start, 100) == 0 and eval_formula("dimPPrimeD1Derivative", q_min) < 0
        lines.append(f"D norm gives q >= {q_min:.6f}; dim P' = 1 at q = {cut:.6f}, decreasing past q_min")
        ok = decreasing and q_min > cut
        lines.append("dim P' < 1 throughout" if ok else "dim P' reaches 1 inside the window")
        return lines, ok
    if family == "D2":
        cut = scan_threshold("sumDoublePrimeD2", "3sqrt2", 1.9, 2.05)
        bound = max(edge_bound_d2(q_lo), edge_bound_d2(q_hi))
        lines.append(f"P''+Q'' < 3sqrt2 below q = {cut:.6f}; depth 3-4 edge count <= {bound}")
        qp = scan_threshold("dimQPrimeD2", "sqrt2", 1.9, 2.05)
        lines.append(f"dim Q' < sqrt2 below q = {qp:.6f}")
        ok = bound == 2 and q_hi < cut
        return lines, ok
    if family == "D3":
        cut = scan_threshold("dD3", 1, 1.9, 2.1)
        lines.append(f"univalent depth-4 vertex has dimension < 1 below q = {cut:.6f} (index {q_to_index(cut):.5f})")
        return lines, q_hi < cut
    if family == "K":
        lo_cut = scan_threshold("dK", 1, 1.5, 1.8)
        hi_cut = scan_threshold("dK", "sqrt2", 1.9, 2.2)
        lines.append(f"dimension strictly between 1 and sqrt2 for {lo_cut:.6f} < q < {hi_cut:.6f}")
        return lines, lo_cut < q_lo and q_hi < hi_cut
    if family == "Kprime":
        cut = scan_threshold("dKprime", 1, 1.9, 2.05)
        lines.append(f"depth-6 vertex has dimension < 1 below q = {cut:.6f}")
        return lines, q_hi < cut
    raise FormulaError(f"unknown family {family!r}")


def formula_table_json(q_samples: tuple[float, ...] = (1.7, 1.8, 1.9)) -> list[dict]:
    out = []
    for nf in formulas().values():
        out.append({
            "id": nf.id,
            "family": nf.family,
            "description": nf.description,
            "expression": str(nf.value),
            "values": {f"{qv:g}": nf(qv) for qv in q_samples},
        })
    return out


__all__ = (
    "FormulaError",
    "NamedFormula",
    "Oracle",
    "cross_check",
    "d1_norm_q",
    "derivative",
    "edge_bound_d2",
    "eval_formula",
    "fact_table",
    "family_argument",
    "formula_table_json",
    "formulas",
    "get_formula",
    "next_dimension",
    "sample_q",
    "oracle_value",
    "scan_threshold",
    "window_q",
)
