# gpa/suite.py
# Relation suites: calibration of the loop-basis conventions, the generator
# relations for each family, the braid and octahedron diagrams, and
# phase-independence of closed diagrams.

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np

from gpa.bricks import Brick, BrickDiagram, eval_brick, load_diagrams
from gpa.context import GraphContext, Shading
from gpa.element import GpaElement, jones_projection, jones_wenzl2
from gpa.generators import (
    GeneratorSpec,
    braiding,
    build_b,
    dual_a,
    dual_b,
    generator,
)
from schema import CheckResult, SuiteReport

log = logging.getLogger(__name__)

TOLERANCE = 1e-9

OCTAHEDRON_REFERENCE = 16 * (1 - math.sqrt(2))

# letters: a = X on strands 1-2, A = its inverse, b = X drawn on strands 2-3, B = inverse of b
_LETTERS = {
    "a": Brick(position=1, element="X", clicks=0),
    "A": Brick(position=1, element="Xinv", clicks=0),
    "b": Brick(position=2, element="Xinv", clicks=1),
    "B": Brick(position=2, element="X", clicks=1),
}
WORDS = ("a", "b", "ab", "aB", "abab", "aab", "abA", "aabb", "abAB", "aaabbb")


def _check(name: str, deviation: float, tol: float, detail: Optional[str] = None) -> CheckResult:
    return CheckResult(name=name, max_deviation=float(deviation), passed=bool(deviation <= tol), detail=detail)


def random_element(ctx: GraphContext, n: int, shading: Shading, rng: np.random.Generator) -> GpaElement:
    z = GpaElement.zero(ctx, n, shading)
    return z._with({k: rng.normal(size=m.shape) + 1j * rng.normal(size=m.shape) for k, m in z.blocks.items()})


def word_diagram(word: str, shading: Shading = "+") -> BrickDiagram:
    return BrickDiagram(strands=3, bricks=[_LETTERS[c] for c in word], closed=True, shading=shading)


# -----------------------------
# Calibration
# -----------------------------
def calibration_checks(ctx: GraphContext, tol: float = TOLERANCE, seed: int = 7, samples: int = 5) -> list[CheckResult]:
    d = ctx.delta
    e1 = jones_projection(ctx, 1, 2)
    f2 = jones_wenzl2(ctx)
    one1 = GpaElement.identity(ctx, 1, "+")
    out = [
        _check("e1-anchor", max(abs(e1.coeff("0707") - 1), abs(e1.coeff("0767")), abs(e1.coeff("0747"))), tol),
        _check("e1-idempotent", (e1 @ e1).distance(e1), tol),
        _check("trace-identity", abs(GpaElement.identity(ctx, 2).trace() - d * d), tol),
        _check("trace-f2", abs(f2.trace() - (d * d - 1)), tol),
        _check("f2-idempotent", (f2 @ f2).distance(f2), tol),
        _check("f2-top-caps", max(f2.cap(2).norm(), f2.cap(4).norm()), tol),
        _check("f2-partial-trace", max(f2.cap(1).distance((d - 1 / d) * one1), f2.cap(3).distance((d - 1 / d) * one1)), tol),
        _check("coproduct-e1", e1.coproduct(e1).distance(e1 / d), tol),
        _check("rotation-identity", GpaElement.identity(ctx, 2, "+").rotate(1).distance(d * jones_projection(ctx, 1, 2, "-")), tol),
    ]
    for shading in ("+", "-"):
        e = [jones_projection(ctx, i, 3, shading) for i in (1, 2)]
        out.append(_check(f"tl-e1e2e1[{shading}]", (e[0] @ e[1] @ e[0]).distance(e[0] / d**2), tol))
        out.append(_check(f"tl-e2e1e2[{shading}]", (e[1] @ e[0] @ e[1]).distance(e[1] / d**2), tol))
        out.append(_check(f"tl-e2-idempotent[{shading}]", (e[1] @ e[1]).distance(e[1]), tol))
    e4 = [jones_projection(ctx, i, 4) for i in (1, 3)]
    out.append(_check("tl-far-commute", (e4[0] @ e4[1]).distance(e4[1] @ e4[0]), tol))

    rng = np.random.default_rng(seed)
    assoc = adj = period = 0.0
    for n in (1, 2, 3):
        for shading in ("+", "-"):
            for _ in range(samples):
                x, y, z = (random_element(ctx, n, shading, rng) for _ in range(3))
                assoc = max(assoc, ((x @ y) @ z).distance(x @ (y @ z)) / (1 + x.norm() * y.norm() * z.norm()))
                adj = max(adj, (x @ y).adjoint().distance(y.adjoint() @ x.adjoint()) / (1 + x.norm() * y.norm()))
            x = random_element(ctx, n, shading, rng)
            period = max(period, x.rotate(2 * n).distance(x), x.rotate(1).adjoint().distance(x.adjoint().rotate(-1)))
    out += [
        _check("associativity", assoc, tol),
        _check("adjoint-antimultiplicative", adj, tol),
        _check("rotation-period-and-adjoint", period, tol),
    ]
    return out


# -----------------------------
# Generators and braidings
# -----------------------------
def _generator_checks(x: GpaElement, omega: int, label: str, tol: float) -> list[CheckResult]:
    f2 = jones_wenzl2(x.ctx, x.shading)
    return [
        _check(f"{label}-self-adjoint", x.adjoint().distance(x), tol),
        _check(f"{label}-rotation-eigenvalue", x.rotate(2).distance(omega * x), tol),
        _check(f"{label}-uncappable", max(x.cap(k).norm() for k in (1, 2, 3, 4)), tol),
        _check(f"{label}-squares-to-f2", (x @ x).distance(f2), tol),
    ]


def _braiding_checks(
    x: GpaElement, xinv: GpaElement, spec: GeneratorSpec, label: str, tol: float, diagrams: dict
) -> list[CheckResult]:
    ctx = x.ctx
    d = ctx.delta
    one = GpaElement.identity(ctx, 2, x.shading)
    e1 = jones_projection(ctx, 1, 2, x.shading)
    one1 = GpaElement.identity(ctx, 1, x.shading)
    out = [
        _check(f"{label}-inverse-right", (x @ xinv).distance(one), tol),
        _check(f"{label}-inverse-left", (xinv @ x).distance(one), tol),
        _check(f"{label}-biinvertible", x.coproduct(xinv.rotate(2)).distance(d * e1), tol),
        _check(f"{label}-cap", x.cap_right().distance(spec.a * one1), tol),
    ]
    if spec.omega == 1:
        out.append(_check(f"{label}-rotation-fixed", x.rotate(2).distance(x), tol))
        quad = 1j * math.sqrt(2) * one - 1j * (2 + math.sqrt(2)) * e1
    else:
        s2 = math.sqrt(2 - math.sqrt(2))
        quad = spec.eps * 1j * s2 * one
        expected = spec.eps * 1j * s2 * one + math.sqrt(2 + math.sqrt(2)) * e1
        out.append(_check(f"{label}-rotation-sum", (x + x.rotate(2)).distance(expected), tol))
    out.append(_check(f"{label}-quadratic", (x - xinv).distance(quad), tol))
    if x.shading == "+":
        bind = {"X": x, "Xinv": xinv}
        left = eval_brick(diagrams["sigma_braid_left"], bind)
        right = eval_brick(diagrams["sigma_braid_right"], bind)
        out.append(_check(f"{label}-sigma-braid", (spec.sigma * left).distance(spec.sigma**2 * right), tol))
    return out


def word_traces(x: GpaElement, xinv: GpaElement, words: Sequence[str] = WORDS) -> list[complex]:
    bind = {"X": x, "Xinv": xinv}
    return [complex(eval_brick(word_diagram(w, x.shading), bind)) for w in words]


def octahedron(ctx: GraphContext, lam: complex, eps: int, diagrams: Optional[dict] = None, sign: int = 1) -> complex:
    """Closed octahedron with B on strands 1-2 and its dual -i F(B) on strands 2-3."""
    diagrams = diagrams or load_diagrams()
    b = sign * build_b(ctx, lam, eps)
    return complex(eval_brick(diagrams["octahedron"], {"B": b, "Bdual": dual_b(b)}))


def run_suite(
    ctx: GraphContext,
    spec: GeneratorSpec,
    tol: float = TOLERANCE,
    diagrams: Optional[dict] = None,
) -> list[CheckResult]:
    """All single-sample relations for one generator and its braiding, on both sides."""
    diagrams = diagrams or load_diagrams()
    tag = f"[lam={spec.lam:.4g}" + (f",eps={spec.eps:+d}]" if spec.eps is not None else "]")
    g = generator(ctx, spec)
    name = "A" if spec.omega == 1 else "B"
    out = _generator_checks(g, spec.omega, name + tag, tol)
    if spec.omega == 1:
        out.append(_check("A-anchor" + tag, max(abs(g.coeff("0767") - 1), abs(g.coeff("6745") - spec.lam)), tol))
        out += _generator_checks(dual_a(g), 1, "A-dual" + tag, tol)
    else:
        inv = 1 / ctx.delta
        anchor = max(abs(g.coeff("6747") - inv), abs(dual_b(g).coeff("7454") + spec.eps * inv))
        out.append(_check("B-anchor" + tag, anchor, tol))
        flipped = build_b(ctx, spec.lam.conjugate(), -spec.eps)
        out.append(_check("B-conjugation" + tag, g.conj().distance(flipped), tol))
        out += _generator_checks(dual_b(g), -1, "B-dual" + tag, tol)
    label = "R" if spec.omega == 1 else "S"
    x, xinv = braiding(ctx, spec)
    out += _braiding_checks(x, xinv, spec, label + tag, tol, diagrams)
    y, yinv = braiding(ctx, spec, dual=True)
    out += _braiding_checks(y, yinv, spec, label + "-dual" + tag, tol, diagrams)
    return out


def verify_generator_family(
    ctx: GraphContext,
    omega: int,
    samples: Iterable[complex],
    tol: float = TOLERANCE,
    calibrate: bool = True,
) -> SuiteReport:
    """Every relation for every sampled phase (both signs when omega = -1), plus phase independence."""
    diagrams = load_diagrams()
    samples = list(samples)
    report = SuiteReport(tolerance=tol)
    if calibrate:
        report.checks += calibration_checks(ctx, tol)
    signs: tuple = (None,) if omega == 1 else (1, -1)
    for eps in signs:
        traces = []
        for lam in samples:
            spec = GeneratorSpec.for_family(omega, lam, eps)
            log.info("relation suite omega=%d lam=%s eps=%s", omega, lam, eps)
            report.checks += run_suite(ctx, spec, tol, diagrams)
            traces.append(word_traces(*braiding(ctx, spec)))
        spread = max((abs(t[k] - traces[0][k]) for t in traces for k in range(len(WORDS))), default=0.0)
        suffix = "" if eps is None else f"[eps={eps:+d}]"
        report.checks.append(_check("phase-independent-word-traces" + suffix, spread, tol))

    if omega == -1 and samples:
        values = {}
        for eps in (1, -1):
            vals = [octahedron(ctx, lam, eps, diagrams) for lam in samples]
            values[eps] = vals[0]
            report.checks.append(_check(f"octahedron-phase-independent[eps={eps:+d}]",
                                        max(abs(v - vals[0]) for v in vals), tol))
            report.octahedron[f"eps={eps:+d}"] = [values[eps].real, values[eps].imag]
        report.checks.append(_check("octahedron-sign-flip", abs(values[1] + values[-1]), tol))
        report.checks.append(_check("octahedron-nonzero", 0.0 if abs(values[1]) > 1e-6 else 1.0, 0.5))
        negated = octahedron(ctx, samples[0], 1, diagrams, sign=-1)
        report.checks.append(_check("octahedron-even-under-negation", abs(negated - values[1]), tol))
        ratio = values[1] / OCTAHEDRON_REFERENCE
        report.checks.append(_check("octahedron-ratio-real", abs(ratio.imag), max(tol, 1e-6)))
        report.checks.append(_check("octahedron-ratio-positive", 0.0 if ratio.real > 0 else 1.0, 0.5))
        report.octahedron_ratio = ratio.real
    return report


__all__ = (
    "OCTAHEDRON_REFERENCE",
    "TOLERANCE",
    "WORDS",
    "calibration_checks",
    "octahedron",
    "random_element",
    "run_suite",
    "verify_generator_family",
    "word_diagram",
    "word_traces",
)
