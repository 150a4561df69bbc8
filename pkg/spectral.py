# spectral.py
# Graph norms, dimension vectors at a given index, duality consistency and
# the numerical acceptance test for vines.
#
# Dimensions live in K = Q(t), t = index = norm^2. Even vertices store their
# dimension; odd vertices store dim/delta, so every quantity stays in K even
# when delta itself is not.

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sympy import Poly, ZZ
from sympy.polys.matrices import DomainMatrix

from bigraph import Bigraph, BigraphPair
from qarith import (
    AlgebraicReal,
    FieldElement,
    NumberField,
    Ordering,
    compare,
    field_of,
    is_algebraic_integer,
    x,
)

log = logging.getLogger(__name__)

Vertex = tuple[int, int]


class DimensionInconsistency(ValueError):
    """The eigen-relation has no (or no unique) solution with dim(root) = 1."""

    def __init__(self, message: str, vertex: Optional[Vertex] = None):
        super().__init__(message)
        self.vertex = vertex


# -----------------------------
# Norms
# -----------------------------
def _gram(g: Bigraph) -> np.ndarray:
    a = g.bipartite_adjacency()
    # even and odd Gram matrices share their nonzero spectrum; use the smaller
    return a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a


def norm_squared(g: Bigraph) -> AlgebraicReal:
    """Largest eigenvalue of the Gram matrix of the bipartite adjacency, exactly."""
    m = _gram(g)
    if m.size == 0 or not m.any():
        return AlgebraicReal.rational(0)
    n = m.shape[0]
    dm = DomainMatrix([[ZZ(int(v)) for v in row] for row in m.tolist()], (n, n), ZZ)
    char = Poly([ZZ.to_sympy(c) for c in dm.charpoly()], x)
    return AlgebraicReal.largest_root(char)


def norm_squared_float(g: Bigraph) -> float:
    m = _gram(g)
    if m.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(m.astype(float))[-1])


# -----------------------------
# Dimension vectors
# -----------------------------
@dataclass
class DimensionVector:
    graph: Bigraph
    index: AlgebraicReal
    field: NumberField
    values: dict[Vertex, FieldElement]

    @property
    def t(self) -> FieldElement:
        return self.field.gen()

    def squared(self, v: Vertex) -> FieldElement:
        """dim(v)^2, always inside Q(t)."""
        val = self.values[v]
        return val * val if v[0] % 2 == 0 else self.t * val * val

    def compare_one(self, v: Vertex) -> Ordering:
        val = self.values[v]
        if val.sign() <= 0:
            return "LT"
        if v[0] % 2 == 0:
            return val.compare_to(1)
        return self.squared(v).compare_to(1)

    def is_integral(self, v: Vertex) -> bool:
        # dim is an algebraic integer iff dim^2 is
        if v[0] % 2 == 0:
            return is_algebraic_integer(self.values[v])
        return is_algebraic_integer(self.squared(v))

    def as_float(self, v: Vertex) -> float:
        val = float(self.values[v])
        return val if v[0] % 2 == 0 else val * float(self.index) ** 0.5

    def floats(self) -> dict[Vertex, float]:
        return {v: self.as_float(v) for v in self.values}

    def describe(self, v: Vertex) -> str:
        val = self.values[v]
        return f"{val} (~{self.as_float(v):.9g})"


def _equations(g: Bigraph, t: FieldElement):
    """One equation per vertex, ordered by depth: (vertex, {unknown: coeff}, rhs)."""
    one, zero = t.field.one(), t.field.zero()
    eqs = [((0, 0), {(0, 0): one}, one)]
    for d, i in g.vertices():
        row: dict[Vertex, FieldElement] = {}
        nbrs = []
        if d >= 1:
            nbrs += [((d - 1, j), m) for j, m in enumerate(g.rows(d)[i]) if m]
        nbrs += [((d + 1, j), r[i]) for j, r in enumerate(g.up_rows(d)) if r[i]]
        # even u: x_u = sum m y_w ; odd w: t y_w = sum m x_u
        row[(d, i)] = one if d % 2 == 0 else t
        for w, m in nbrs:
            row[w] = row.get(w, zero) - m
        eqs.append(((d, i), row, zero))
    return eqs


def dimension_vector(g: Bigraph, index: AlgebraicReal) -> DimensionVector:
    """Solve the eigen-relation over Q(index) with dim(root) = 1.

    Gaussian elimination runs over the equations in depth order, so the first
    contradictory equation names the vertex where the relation fails.
    """
    k = field_of(index)
    t = k.gen()
    unknowns = g.vertices()
    pivots: list[tuple[Vertex, dict[Vertex, FieldElement], FieldElement]] = []
    for vertex, row, rhs in _equations(g, t):
        row = {c: v for c, v in row.items() if not v.is_zero}
        for col, prow, prhs in pivots:
            f = row.get(col)
            if f is None:
                continue
            for c, v in prow.items():
                nv = row.get(c, k.zero()) - f * v
                if nv.is_zero:
                    row.pop(c, None)
                else:
                    row[c] = nv
            rhs = rhs - f * prhs
        if not row:
            if not rhs.is_zero:
                raise DimensionInconsistency(
                    f"eigen-relation fails at depth {vertex[0]} vertex {vertex[1]} for index {index.minpoly_str()}",
                    vertex,
                )
            continue
        col = min(row)
        inv = row[col].inverse()
        pivots.append((col, {c: v * inv for c, v in row.items()}, rhs * inv))

    if len(pivots) < len(unknowns):
        raise DimensionInconsistency(f"dimensions under-determined ({len(pivots)} of {len(unknowns)} fixed)")

    values: dict[Vertex, FieldElement] = {}
    for col, prow, prhs in reversed(pivots):
        acc = prhs
        for c, v in prow.items():
            if c != col:
                acc = acc - v * values[c]
        values[col] = acc
    return DimensionVector(g, index, k, {v: values[v] for v in unknowns})


def dimension_vector_float(g: Bigraph) -> dict[Vertex, float]:
    """Perron eigenvector at the graph's own norm, normalised so dim(root) = 1."""
    a = g.bipartite_adjacency().astype(float)
    evens, odds = g.even_vertices(), g.odd_vertices()
    if not odds:
        return {(0, 0): 1.0}
    w, vecs = np.linalg.eigh(a @ a.T)
    xv = vecs[:, -1]
    xv = xv / xv[evens.index((0, 0))]
    delta = float(np.sqrt(w[-1]))
    yv = (a.T @ xv) / delta
    out = {v: float(xv[k]) for k, v in enumerate(evens)}
    out.update({v: float(yv[k]) for k, v in enumerate(odds)})
    return out


def relative_value(
    g: Bigraph,
    delta: float,
    weights: dict[Vertex, float],
    closed: Optional[set[Vertex]] = None,
    fixed: Optional[dict[Vertex, float]] = None,
    tol: float = 1e-9,
) -> float:
    """sum(w_v * dim(v)) at an arbitrary delta, using only the eigen-relation at `closed` vertices.

    Vertices whose neighbourhood may still grow are left open. `closed`
    defaults to every vertex above the last depth. Raises
    DimensionInconsistency when the equations contradict each other or do
    not pin the requested combination.
    """
    verts = g.vertices()
    col = {v: k for k, v in enumerate(verts)}
    closed = {v for v in verts if v[0] < g.max_depth} if closed is None else set(closed)
    rows, rhs = [], []

    root = np.zeros(len(verts))
    root[col[(0, 0)]] = 1.0
    rows.append(root)
    rhs.append(1.0)
    for d, i in sorted(closed):
        row = np.zeros(len(verts))
        row[col[(d, i)]] = delta
        if d >= 1:
            for j, m in enumerate(g.rows(d)[i]):
                row[col[(d - 1, j)]] -= m
        for j, r in enumerate(g.up_rows(d)):
            row[col[(d + 1, j)]] -= r[i]
        rows.append(row)
        rhs.append(0.0)
    for v, val in (fixed or {}).items():
        row = np.zeros(len(verts))
        row[col[v]] = 1.0
        rows.append(row)
        rhs.append(float(val))

    m, b = np.array(rows), np.array(rhs)
    sol, *_ = np.linalg.lstsq(m, b, rcond=None)
    if np.abs(m @ sol - b).max() > tol * max(1.0, np.abs(b).max()):
        raise DimensionInconsistency(f"eigen-relation is inconsistent at delta={delta:.12g}")
    w = np.zeros(len(verts))
    for v, c in weights.items():
        w[col[v]] = c
    _, s, vt = np.linalg.svd(m)
    rank = int((s > tol * s[0]).sum())
    null = vt[rank:]
    if null.size and np.abs(null @ w).max() > 1e-7:
        raise DimensionInconsistency("requested combination is not determined by the closed vertices")
    return float(w @ sol)


# -----------------------------
# Duality and vine acceptance
# -----------------------------
def _dual_mismatch(plus: DimensionVector, minus: DimensionVector) -> Optional[str]:
    for name, vec in (("plus", plus), ("minus", minus)):
        g = vec.graph
        for d, i in g.even_vertices():
            j = g.dual(d, i)
            if vec.values[(d, i)] != vec.values[(d, j)]:
                return f"{name} depth {d}: vertex {i} and its dual {j}"
    for d, i in plus.graph.odd_vertices():
        if (d, i) in minus.values and plus.values[(d, i)] != minus.values[(d, i)]:
            return f"odd depth {d}: vertex {i} of plus and of minus"
    return None


def dual_dimension_consistency(p: BigraphPair, index: AlgebraicReal) -> bool:
    try:
        plus = dimension_vector(p.plus, index)
        minus = dimension_vector(p.minus, index)
    except DimensionInconsistency:
        return False
    return _dual_mismatch(plus, minus) is None


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[str] = None
    witness: Optional[str] = None
    index: Optional[AlgebraicReal] = None


def vine_status(
    p: BigraphPair,
    window: Optional[tuple[AlgebraicReal, AlgebraicReal]] = None,
) -> Verdict:
    """Numerical obstructions for a finite pair; literature exclusions are applied elsewhere."""
    t_plus, t_minus = norm_squared(p.plus), norm_squared(p.minus)
    if compare(t_plus, t_minus) != "EQ":
        return Verdict(False, "norm-mismatch", f"{t_plus.minpoly_str()} vs {t_minus.minpoly_str()}", t_plus)
    if window is not None:
        lo, hi = window
        if compare(t_plus, lo) == "LT" or compare(t_plus, hi) == "GT":
            return Verdict(False, "index-window", str(t_plus), t_plus)

    vectors = {}
    for name, g in (("plus", p.plus), ("minus", p.minus)):
        try:
            vectors[name] = dimension_vector(g, t_plus)
        except DimensionInconsistency as e:
            return Verdict(False, "inconsistent", f"{name}: {e}", t_plus)

    for name, vec in vectors.items():
        g = vec.graph
        for v in g.vertices():
            c = vec.compare_one(v)
            where = f"{name} depth {v[0]} vertex {v[1]}"
            if c == "LT":
                log.debug("dimension below 1 at %s", where)
                return Verdict(False, "dimension<1", f"{where}: {vec.describe(v)}", t_plus)
            if c == "EQ" and g.degree(*v) >= 2:
                return Verdict(False, "univalence", f"{where} has dimension 1 and degree {g.degree(*v)}", t_plus)
        for v in g.vertices():
            if not vec.is_integral(v):
                return Verdict(False, "not-algebraic-integer", f"{name} depth {v[0]} vertex {v[1]}: {vec.describe(v)}", t_plus)

    bad = _dual_mismatch(vectors["plus"], vectors["minus"])
    if bad is not None:
        return Verdict(False, "dual-dimension-mismatch", bad, t_plus)
    return Verdict(True, index=t_plus)


__all__ = (
    "DimensionInconsistency",
    "DimensionVector",
    "Verdict",
    "dimension_vector",
    "dimension_vector_float",
    "dual_dimension_consistency",
    "norm_squared",
    "norm_squared_float",
    "relative_value",
    "vine_status",
)
