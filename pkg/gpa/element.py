# gpa/element.py
# Elements of the graph planar algebra in the loop basis.
#
# A loop v0 v1 ... v(2n-1) of grade n is stored as the matrix entry [P, Q]
# of block (v0, vn), with P = (v0 ... vn) and Q = (v0, v(2n-1), ..., vn).
# Multiplication is blockwise matrix product, the adjoint is the conjugate
# transpose, and the trace is normalised so that trace(1_n) = delta^n.

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

import numpy as np

from gpa.context import GraphContext, Path, Shading, flip

log = logging.getLogger(__name__)

Loop = tuple[int, ...]
Scalar = Union[int, float, complex]


class GradeError(ValueError):
    """Operands live in different grades, or the grade is wrong for the operation."""


class ShadingError(ValueError):
    """A brick or operand does not match the shading of the region it sits in."""


# -----------------------------
# Loops
# -----------------------------
def loop_of(p: Path, q: Path) -> Loop:
    return tuple(p) + tuple(reversed(q[1:-1]))


def split_loop(loop: Loop) -> tuple[Path, Path]:
    n = len(loop) // 2
    return tuple(loop[: n + 1]), (loop[0],) + tuple(reversed(loop[n:]))


def loop_key(loop: Loop) -> str:
    if all(v < 10 for v in loop):
        return "".join(str(v) for v in loop)
    return ".".join(str(v) for v in loop)


def parse_loop(key: str) -> Loop:
    if "." in key:
        return tuple(int(t) for t in key.split("."))
    return tuple(int(c) for c in key)


def loops(ctx: GraphContext, n: int, shading: Shading) -> list[Loop]:
    """All closed alternating walks of length 2n based on the given side, deterministic order."""
    out = []
    for a, b in ctx.blocks(n, shading):
        ps = ctx.block_paths(a, b, n)
        out += [loop_of(p, q) for p in ps for q in ps]
    return out


# -----------------------------
# Elements
# -----------------------------
@dataclass(frozen=True, eq=False)
class GpaElement:
    ctx: GraphContext
    n: int
    shading: Shading
    blocks: Mapping[tuple[int, int], np.ndarray]

    # construction
    @classmethod
    def zero(cls, ctx: GraphContext, n: int, shading: Shading = "+") -> "GpaElement":
        blocks = {}
        for a, b in ctx.blocks(n, shading):
            k = len(ctx.block_paths(a, b, n))
            blocks[(a, b)] = np.zeros((k, k), dtype=complex)
        return cls(ctx, n, shading, blocks)

    @classmethod
    def identity(cls, ctx: GraphContext, n: int, shading: Shading = "+") -> "GpaElement":
        z = cls.zero(ctx, n, shading)
        return z._with({key: np.eye(m.shape[0], dtype=complex) for key, m in z.blocks.items()})

    @classmethod
    def from_coefficients(
        cls, ctx: GraphContext, n: int, shading: Shading, coeffs: Mapping[Union[str, Loop], Scalar]
    ) -> "GpaElement":
        z = cls.zero(ctx, n, shading)
        blocks = {key: m.copy() for key, m in z.blocks.items()}
        for loop, c in coeffs.items():
            loop = parse_loop(loop) if isinstance(loop, str) else tuple(loop)
            if len(loop) != 2 * n:
                raise GradeError(f"loop {loop_key(loop)} does not have grade {n}")
            if ctx.parity(loop[0]) != shading:
                raise ShadingError(f"loop {loop_key(loop)} is not based on the {shading} side")
            p, q = split_loop(loop)
            _, index = ctx.block_index(p[0], p[-1], n)
            if p not in index or q not in index:
                raise ValueError(f"{loop_key(loop)} is not a loop on the graph")
            blocks[(p[0], p[-1])][index[p], index[q]] = c
        return cls(ctx, n, shading, blocks)

    @classmethod
    def from_json(cls, ctx: GraphContext, n: int, shading: Shading, data: Mapping[str, list[float]]) -> "GpaElement":
        return cls.from_coefficients(ctx, n, shading, {k: complex(re, im) for k, (re, im) in data.items()})

    def _with(self, blocks: Mapping[tuple[int, int], np.ndarray]) -> "GpaElement":
        return GpaElement(self.ctx, self.n, self.shading, dict(blocks))

    # coefficients
    def coeff(self, loop: Union[str, Loop]) -> complex:
        loop = parse_loop(loop) if isinstance(loop, str) else tuple(loop)
        if len(loop) != 2 * self.n or self.ctx.parity(loop[0]) != self.shading:
            return 0j
        p, q = split_loop(loop)
        key = (p[0], p[-1])
        if key not in self.blocks:
            return 0j
        _, index = self.ctx.block_index(p[0], p[-1], self.n)
        if p not in index or q not in index:
            return 0j
        return complex(self.blocks[key][index[p], index[q]])

    def items(self) -> Iterator[tuple[Loop, complex]]:
        for (a, b), m in self.blocks.items():
            ps = self.ctx.block_paths(a, b, self.n)
            for i, p in enumerate(ps):
                for j, q in enumerate(ps):
                    yield loop_of(p, q), complex(m[i, j])

    def to_json(self, tol: float = 0.0) -> dict[str, list[float]]:
        return {loop_key(lp): [c.real, c.imag] for lp, c in self.items() if abs(c) > tol}

    # linear structure
    def _check(self, other: "GpaElement") -> None:
        if (self.n, self.shading) != (other.n, other.shading):
            raise GradeError(f"grade ({self.n},{self.shading}) vs ({other.n},{other.shading})")

    def __add__(self, other):
        if isinstance(other, GpaElement):
            self._check(other)
            return self._with({k: m + other.blocks[k] for k, m in self.blocks.items()})
        return self + other * GpaElement.identity(self.ctx, self.n, self.shading)

    __radd__ = __add__

    def __neg__(self):
        return self._with({k: -m for k, m in self.blocks.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c: Scalar):
        if isinstance(c, GpaElement):
            raise TypeError("use @ for the product of two elements")
        return self._with({k: m * c for k, m in self.blocks.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: Scalar):
        return self * (1.0 / c)

    def __matmul__(self, other: "GpaElement") -> "GpaElement":
        self._check(other)
        return self._with({k: m @ other.blocks[k] for k, m in self.blocks.items()})

    def adjoint(self) -> "GpaElement":
        return self._with({k: m.conj().T for k, m in self.blocks.items()})

    def conj(self) -> "GpaElement":
        """Entrywise complex conjugate in the loop basis."""
        return self._with({k: m.conj() for k, m in self.blocks.items()})

    def norm(self) -> float:
        return max((float(np.abs(m).max()) for m in self.blocks.values() if m.size), default=0.0)

    def distance(self, other: "GpaElement") -> float:
        return (self - other).norm()

    # planar operations
    def rotate(self, clicks: int = 1) -> "GpaElement":
        """The one-click rotation, applied `clicks` times (negative turns the other way)."""
        if self.n == 0:
            return self
        clicks %= 2 * self.n
        out = self
        for _ in range(clicks):
            out = out._rotate_once()
        return out

    def _rotate_once(self) -> "GpaElement":
        ctx, n = self.ctx, self.n
        target = GpaElement.zero(ctx, n, flip(self.shading))
        blocks = {}
        for (a, b), m in target.blocks.items():
            ps = ctx.block_paths(a, b, n)
            m = m.copy()
            for i, p in enumerate(ps):
                for j, q in enumerate(ps):
                    w = loop_of(p, q)
                    src = (w[-1],) + w[:-1]
                    c = self.coeff(src)
                    if c:
                        spin = np.sqrt(ctx.d(w[-1]) * ctx.d(w[n - 1]) / (ctx.d(w[0]) * ctx.d(w[n])))
                        m[i, j] = c * spin
            blocks[(a, b)] = m
        return target._with(blocks)

    def cap_right(self) -> "GpaElement":
        """Join the last two boundary points on the right: grade n -> n-1."""
        if self.n < 1:
            raise GradeError("nothing to cap in grade 0")
        ctx, n = self.ctx, self.n
        out = GpaElement.zero(ctx, n - 1, self.shading)
        blocks = {}
        for (a, b), m in out.blocks.items():
            ps = ctx.block_paths(a, b, n - 1)
            m = m.copy()
            for c in ctx.neighbours(b):
                if (a, c) not in self.blocks:
                    continue
                _, index = ctx.block_index(a, c, n)
                big = self.blocks[(a, c)]
                w = ctx.d(c) / ctx.d(b)
                for i, p in enumerate(ps):
                    for j, q in enumerate(ps):
                        m[i, j] += big[index[p + (c,)], index[q + (c,)]] * w
            blocks[(a, b)] = m
        return out._with(blocks)

    def cap(self, position: int) -> "GpaElement":
        """One of the four caps of a grade-2 element, position 1..4."""
        if self.n != 2:
            raise GradeError("caps are taken on grade 2")
        if position not in (1, 2, 3, 4):
            raise ValueError("cap position must be 1..4")
        return self.rotate(position - 1).cap_right()

    def is_uncappable(self, tol: float = 1e-10) -> bool:
        return all(self.cap(k).norm() <= tol for k in (1, 2, 3, 4))

    def coproduct(self, other: "GpaElement") -> "GpaElement":
        """Side-by-side composition with the two middle strands joined."""
        self._check(other)
        return (self.rotate(-1) @ other.rotate(-1)).rotate(1)

    def trace(self) -> complex:
        ctx = self.ctx
        z = ctx.partition(self.shading)
        return complex(sum(ctx.d(a) * ctx.d(b) / z * np.trace(m) for (a, b), m in self.blocks.items()))

    def embed(self, position: int, strands: int) -> "GpaElement":
        """Place a grade-2 element on strands (position, position+1) of `strands` parallel strings."""
        if self.n != 2:
            raise GradeError("only grade-2 bricks are embedded")
        if not 1 <= position <= strands - 1:
            raise ValueError(f"position {position} out of range for {strands} strands")
        base = self.shading if position % 2 == 1 else flip(self.shading)
        ctx = self.ctx
        out = GpaElement.zero(ctx, strands, base)
        blocks = {k: m.copy() for k, m in out.blocks.items()}
        i = position
        for (a, b), m in blocks.items():
            ps, index = ctx.block_index(a, b, strands)
            for r, p in enumerate(ps):
                left, right = p[i - 1], p[i + 1]
                small = self.blocks.get((left, right))
                if small is None:
                    continue
                _, sidx = ctx.block_index(left, right, 2)
                for mid in ctx.neighbours(left):
                    if (left, mid, right) not in sidx:
                        continue
                    q = p[:i] + (mid,) + p[i + 1:]
                    m[r, index[q]] = small[sidx[(left, p[i], right)], sidx[(left, mid, right)]]
        return out._with(blocks)


def brick_shading(base: Shading, position: int) -> Shading:
    """Shading of the region left of strand `position` when the leftmost region is `base`."""
    return base if position % 2 == 1 else flip(base)


def jones_projection(ctx: GraphContext, i: int = 1, n: int = 2, shading: Shading = "+") -> GpaElement:
    """e_i on n strands; e_1 in grade 2 has coefficient delta^-1 sqrt(d(v1) d(v1')) / d(v0) on v0 v1 v0 v1'."""
    e1 = GpaElement.zero(ctx, 2, brick_shading(shading, i))
    blocks = {}
    for (a, b), m in e1.blocks.items():
        m = m.copy()
        if a == b:
            ps = ctx.block_paths(a, a, 2)
            for r, p in enumerate(ps):
                for c, q in enumerate(ps):
                    m[r, c] = np.sqrt(ctx.d(p[1]) * ctx.d(q[1])) / (ctx.delta * ctx.d(a))
        blocks[(a, b)] = m
    e1 = e1._with(blocks)
    return e1 if n == 2 and i == 1 else e1.embed(i, n)


def jones_wenzl2(ctx: GraphContext, shading: Shading = "+") -> GpaElement:
    return GpaElement.identity(ctx, 2, shading) - jones_projection(ctx, 1, 2, shading)


__all__ = (
    "GpaElement",
    "GradeError",
    "Loop",
    "ShadingError",
    "brick_shading",
    "jones_projection",
    "jones_wenzl2",
    "loop_key",
    "loop_of",
    "loops",
    "parse_loop",
    "split_loop",
)
