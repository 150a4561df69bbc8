# gpa/context.py
# A bipartite graph with Perron dimensions: the data a graph planar algebra
# is built over. Path enumeration is cached per context.

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Literal, Optional

import numpy as np

from bigraph import Bigraph, parse
from spectral import dimension_vector_float

Shading = Literal["+", "-"]
Path = tuple[int, ...]

# the principal graph shared by the two subfactors built here, with its vertex labels
GAMMA_GRAPH = "bwd1v1p1v1x0p1x1p0x1v0x1x0duals1v1x2v1"
GAMMA_LABELS = {(0, 0): 0, (1, 0): 7, (2, 0): 4, (2, 1): 6, (3, 0): 3, (3, 1): 5, (3, 2): 1, (4, 0): 2}
GAMMA_EDGES = ((0, 7), (7, 4), (7, 6), (4, 3), (4, 5), (5, 6), (6, 1), (5, 2))


def flip(s: Shading) -> Shading:
    return "-" if s == "+" else "+"


class GraphContext:
    """Undirected bipartite graph, vertex dimensions and delta.

    Vertex labels are small non-negative ints; `even` holds the labels of
    the + side. Dimensions satisfy delta * d(v) = sum over neighbours.
    """

    def __init__(self, edges: Iterable[tuple[int, int]], even: Iterable[int], dims: Optional[dict[int, float]] = None):
        self.edges = tuple(tuple(e) for e in edges)
        self.vertices = tuple(sorted({v for e in self.edges for v in e}))
        self.even = frozenset(even)
        idx = {v: k for k, v in enumerate(self.vertices)}
        adj = np.zeros((len(self.vertices),) * 2, dtype=int)
        for a, b in self.edges:
            if (a in self.even) == (b in self.even):
                raise ValueError(f"edge {a}-{b} joins two vertices of the same parity")
            adj[idx[a], idx[b]] += 1
            adj[idx[b], idx[a]] += 1
        if (adj > 1).any():
            raise ValueError("multiple edges are not supported: loops are read as vertex sequences")
        self.adjacency = adj
        self._idx = idx
        self._paths: dict[tuple[int, int], list[Path]] = {}
        self._index: dict[tuple[int, int, int], tuple[list[Path], dict[Path, int]]] = {}
        w, vecs = np.linalg.eigh(adj.astype(float))
        self.delta = float(w[-1])
        if dims is None:
            perron = np.abs(vecs[:, -1])
            perron = perron / perron.min()
            dims = {v: float(perron[idx[v]]) for v in self.vertices}
        self.dims = dict(dims)
        bad = self.eigen_residual()
        if bad > 1e-9:
            raise ValueError(f"dimensions violate the eigen-relation (residual {bad:.3g})")

    @classmethod
    def from_bigraph(cls, g: Bigraph, labels: Optional[dict[tuple[int, int], int]] = None) -> "GraphContext":
        """Context on a principal graph, vertices relabelled by `labels` (default: enumeration order)."""
        verts = g.vertices()
        labels = labels or {v: k for k, v in enumerate(verts)}
        edges = []
        for d in range(1, g.max_depth + 1):
            for i, row in enumerate(g.rows(d)):
                for j, m in enumerate(row):
                    edges += [(labels[(d - 1, j)], labels[(d, i)])] * m
        even = [labels[v] for v in verts if v[0] % 2 == 0]
        dims = {labels[v]: val for v, val in dimension_vector_float(g).items()}
        return cls(edges, even, dims)

    @classmethod
    def gamma(cls) -> "GraphContext":
        return _gamma()

    def parity(self, v: int) -> Shading:
        return "+" if v in self.even else "-"

    def d(self, v: int) -> float:
        return self.dims[v]

    def neighbours(self, v: int) -> list[int]:
        """Neighbours with multiplicity, in label order."""
        row = self.adjacency[self._idx[v]]
        out = []
        for k, m in enumerate(row):
            out += [self.vertices[k]] * int(m)
        return out

    def eigen_residual(self) -> float:
        return max(abs(self.delta * self.dims[v] - sum(self.dims[w] for w in self.neighbours(v))) for v in self.vertices)

    def base_vertices(self, shading: Shading) -> list[int]:
        return [v for v in self.vertices if self.parity(v) == shading]

    def paths(self, start: int, length: int) -> list[Path]:
        """Walks of `length` edges from `start`, lexicographic."""
        key = (start, length)
        if key not in self._paths:
            if length == 0:
                out = [(start,)]
            else:
                out = [p + (w,) for p in self.paths(start, length - 1) for w in self.neighbours(p[-1])]
            self._paths[key] = out
        return self._paths[key]

    def block_paths(self, start: int, end: int, length: int) -> list[Path]:
        return self.block_index(start, end, length)[0]

    def block_index(self, start: int, end: int, length: int) -> tuple[list[Path], dict[Path, int]]:
        key = (start, end, length)
        if key not in self._index:
            ps = [p for p in self.paths(start, length) if p[-1] == end]
            self._index[key] = (ps, {p: k for k, p in enumerate(ps)})
        return self._index[key]

    def blocks(self, n: int, shading: Shading) -> list[tuple[int, int]]:
        """(start, end) pairs joined by at least one path of length n."""
        out = []
        for a in self.base_vertices(shading):
            ends = sorted({p[-1] for p in self.paths(a, n)})
            out += [(a, b) for b in ends]
        return out

    def partition(self, shading: Shading) -> float:
        return sum(self.d(v) ** 2 for v in self.base_vertices(shading))


@lru_cache(maxsize=1)
def _gamma() -> GraphContext:
    ctx = GraphContext.from_bigraph(parse(GAMMA_GRAPH), GAMMA_LABELS)
    if sorted(tuple(sorted(e)) for e in ctx.edges) != sorted(tuple(sorted(e)) for e in GAMMA_EDGES):
        raise RuntimeError("principal graph labels do not reproduce the expected edge list")
    return ctx
