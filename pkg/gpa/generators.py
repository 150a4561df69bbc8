# gpa/generators.py
# The two families of uncappable self-adjoint generators on the graph with
# edges GAMMA_EDGES, and the braidings R (omega = 1) and S (omega = -1)
# built from them.
#
# Coefficients are written per block (a, c) of grade 2: the entry [v1, v3]
# is the loop a v1 c v3. Off-diagonal blocks are fixed scalars or a 2x2
# matrix carrying the phase; the two 3x3 corners (blocks (4,4) and (6,6))
# are completed from their diagonal data.

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from gpa.context import GAMMA_EDGES, GraphContext, Shading
from gpa.element import GpaElement, jones_projection

log = logging.getLogger(__name__)

Sign = Literal[1, -1]

SIN8 = math.sin(math.pi / 8)
COS8 = math.cos(math.pi / 8)


@dataclass(frozen=True)
class GeneratorSpec:
    """Rotational eigenvalue, braiding scalar, capping scalar, phase and sign of one generator."""

    omega: Sign
    sigma: complex
    a: complex
    lam: complex
    eps: Optional[Sign] = None

    @classmethod
    def for_family(cls, omega: int, lam: complex, eps: Optional[int] = None) -> "GeneratorSpec":
        _check_phase(lam)
        if omega == 1:
            return cls(1, 1 + 0j, 1j, lam)
        if omega == -1:
            _check_sign(eps)
            return cls(-1, eps * 1j, cmath.exp(eps * 3j * math.pi / 8), lam, eps)
        raise ValueError(f"rotational eigenvalue must be +1 or -1, got {omega}")


def _check_phase(lam: complex) -> None:
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError(f"phase must have modulus 1, got |{lam}| = {abs(lam)}")


def _check_sign(eps) -> None:
    if eps not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {eps}")


def _require_gamma(ctx: GraphContext) -> None:
    have = sorted(tuple(sorted(e)) for e in ctx.edges)
    want = sorted(tuple(sorted(e)) for e in GAMMA_EDGES)
    if have != want or sorted(ctx.even) != [0, 2, 4, 6]:
        raise ValueError("generator tables are written for the graph with edges " + ", ".join(f"{a}-{b}" for a, b in GAMMA_EDGES))


# -----------------------------
# Corner completion
# -----------------------------
def _unit(ctx: GraphContext, basis: tuple[int, ...]) -> np.ndarray:
    u = np.array([math.sqrt(ctx.d(v)) for v in basis])
    return u / np.linalg.norm(u)


def reflection_corner(u: np.ndarray, diag: tuple[float, ...], signs: tuple[int, ...]) -> np.ndarray:
    """The involution on u-perp with the given diagonal: I - u u^T - 2 z z^T, z a unit vector in u-perp.

    The diagonal fixes z up to signs; `signs` picks them.
    """
    z = np.array([s * math.sqrt(max((1.0 - uk * uk - dk) / 2.0, 0.0)) for uk, dk, s in zip(u, diag, signs)])
    if abs(np.linalg.norm(z) - 1.0) > 1e-9 or abs(z @ u) > 1e-9:
        raise ValueError("diagonal data does not come from a reflection on the complement of u")
    return np.eye(len(u)) - np.outer(u, u) - 2.0 * np.outer(z, z)


def cross_corner(u: np.ndarray) -> np.ndarray:
    """i [u]x: Hermitian, kills u, squares to I - u u^T."""
    ux = np.array([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]])
    return 1j * ux


def _corner_coeffs(a: int, basis: tuple[int, ...], block: np.ndarray) -> dict[tuple[int, ...], complex]:
    return {
        (a, basis[r], a, basis[c]): complex(block[r, c])
        for r in range(len(basis))
        for c in range(len(basis))
        if abs(block[r, c]) > 0
    }


CORNER_4 = (7, 5, 3)
CORNER_6 = (7, 5, 1)


# -----------------------------
# A (omega = 1) and B (omega = -1)
# -----------------------------
def build_a(ctx: GraphContext, lam: complex) -> GpaElement:
    _require_gamma(ctx)
    _check_phase(lam)
    inv = 1.0 / ctx.delta
    coeffs: dict = {
        "0747": -1, "4707": -1, "0767": 1, "6707": 1,
        "2545": 1, "4525": 1, "2565": -1, "6525": -1,
        "6745": lam, "6547": lam.conjugate(),
        "4765": lam.conjugate(), "4567": lam,
    }
    coeffs.update(_corner_coeffs(4, CORNER_4, reflection_corner(_unit(ctx, CORNER_4), (inv, -inv, 0.0), (1, -1, 1))))
    coeffs.update(_corner_coeffs(6, CORNER_6, reflection_corner(_unit(ctx, CORNER_6), (-inv, inv, 0.0), (-1, 1, 1))))
    return GpaElement.from_coefficients(ctx, 2, "+", coeffs)


def build_b(ctx: GraphContext, lam: complex, eps: int) -> GpaElement:
    _require_gamma(ctx)
    _check_phase(lam)
    _check_sign(eps)
    inv = 1.0 / ctx.delta
    c = math.sqrt(1.0 - inv * inv)
    lb = lam.conjugate()
    coeffs: dict = {
        "0747": -1, "4707": 1, "0767": 1, "6707": -1,
        "2545": 1, "4525": -1, "2565": -1, "6525": 1,
        "6747": inv, "6745": lam * c, "6547": lb * c, "6545": -inv,
        "4767": -inv, "4765": -lb * c, "4567": -lam * c, "4565": inv,
    }
    coeffs.update(_corner_coeffs(4, CORNER_4, eps * cross_corner(_unit(ctx, CORNER_4))))
    coeffs.update(_corner_coeffs(6, CORNER_6, -eps * cross_corner(_unit(ctx, CORNER_6))))
    return GpaElement.from_coefficients(ctx, 2, "+", coeffs)


def dual_a(a: GpaElement) -> GpaElement:
    return a.rotate(1)


def dual_b(b: GpaElement) -> GpaElement:
    return -1j * b.rotate(1)


# -----------------------------
# Braidings
# -----------------------------
def _e1(ctx: GraphContext, shading: Shading) -> GpaElement:
    return jones_projection(ctx, 1, 2, shading)


def braiding_r(a: GpaElement) -> GpaElement:
    """(sqrt2/2)(i(1 - delta e1) + A), in whichever shading A lives."""
    ctx = a.ctx
    one = GpaElement.identity(ctx, 2, a.shading)
    return (math.sqrt(2) / 2) * (1j * (one - ctx.delta * _e1(ctx, a.shading)) + a)


def braiding_s(b: GpaElement, eps: int) -> GpaElement:
    """sin(pi/8) eps i + cos(pi/8)(e1 + B)."""
    _check_sign(eps)
    ctx = b.ctx
    one = GpaElement.identity(ctx, 2, b.shading)
    return eps * 1j * SIN8 * one + COS8 * (_e1(ctx, b.shading) + b)


def build_r(ctx: GraphContext, lam: complex) -> GpaElement:
    return braiding_r(build_a(ctx, lam))


def build_s(ctx: GraphContext, lam: complex, eps: int) -> GpaElement:
    return braiding_s(build_b(ctx, lam, eps), eps)


def inverse_r(r: GpaElement) -> GpaElement:
    """From R - R^-1 = i sqrt2 - i(2 + sqrt2) e1."""
    e1 = _e1(r.ctx, r.shading)
    return r - 1j * math.sqrt(2) + 1j * (2 + math.sqrt(2)) * e1


def inverse_s(s: GpaElement, eps: int) -> GpaElement:
    """From S - S^-1 = eps i sqrt(2 - sqrt2)."""
    _check_sign(eps)
    return s - eps * 1j * math.sqrt(2 - math.sqrt(2))


def generator(ctx: GraphContext, spec: GeneratorSpec) -> GpaElement:
    return build_a(ctx, spec.lam) if spec.omega == 1 else build_b(ctx, spec.lam, spec.eps)


def braiding(ctx: GraphContext, spec: GeneratorSpec, dual: bool = False) -> tuple[GpaElement, GpaElement]:
    """(X, X^-1) for the generator family, on the + side or (dual=True) built from the rotated generator."""
    if spec.omega == 1:
        a = build_a(ctx, spec.lam)
        x = braiding_r(dual_a(a) if dual else a)
        return x, inverse_r(x)
    b = build_b(ctx, spec.lam, spec.eps)
    x = braiding_s(dual_b(b) if dual else b, spec.eps)
    return x, inverse_s(x, spec.eps)


__all__ = (
    "GeneratorSpec",
    "braiding",
    "braiding_r",
    "braiding_s",
    "build_a",
    "build_b",
    "build_r",
    "build_s",
    "cross_corner",
    "dual_a",
    "dual_b",
    "generator",
    "inverse_r",
    "inverse_s",
    "reflection_corner",
)
