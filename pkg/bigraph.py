# bigraph.py
# Principal graph pairs with dual data: the string codec used everywhere
# (CLI arguments, journals, fixtures), structural validation, truncation,
# supertransitivity and the canonical form used for deduplication.

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

log = logging.getLogger(__name__)

Row = tuple[int, ...]
Block = tuple[Row, ...]

_ENTRY = re.compile(r"^\d+$")


class CodecError(ValueError):
    """A graph string that cannot be read; the message names the offending depth."""


# -----------------------------
# Single graphs
# -----------------------------
@dataclass(frozen=True)
class Bigraph:
    """Depth-stratified bipartite graph.

    depths[d-1] lists the vertices at depth d (d >= 1); each vertex is its
    row of edge multiplicities to the vertices at depth d-1. The depth-0
    root is implicit. duals[k] is the involution on depth 2k (0-based), or
    None for graphs read without dual data.
    """

    depths: tuple[Block, ...]
    duals: Optional[tuple[tuple[int, ...], ...]] = None

    @property
    def max_depth(self) -> int:
        return len(self.depths)

    def count(self, d: int) -> int:
        if d == 0:
            return 1
        if d < 0 or d > self.max_depth:
            return 0
        return len(self.depths[d - 1])

    def rows(self, d: int) -> Block:
        return self.depths[d - 1]

    def up_rows(self, d: int) -> Block:
        """Rows of depth d+1 (empty past the last depth)."""
        return self.depths[d] if d < self.max_depth else ()

    def edge(self, d: int, i: int, j: int) -> int:
        """Multiplicity between vertex i at depth d and vertex j at depth d-1."""
        return self.depths[d - 1][i][j]

    def degree(self, d: int, i: int) -> int:
        down = sum(self.depths[d - 1][i]) if d >= 1 else 0
        up = sum(row[i] for row in self.up_rows(d))
        return down + up

    def dual(self, d: int, i: int) -> int:
        if d % 2:
            raise ValueError("even-depth duals only; odd vertices pair across the graph pair")
        if self.duals is None:
            return i
        return self.duals[d // 2][i]

    def self_dual_count(self, d: int) -> int:
        return sum(1 for i in range(self.count(d)) if self.dual(d, i) == i)

    def vertices(self) -> list[tuple[int, int]]:
        return [(d, i) for d in range(self.max_depth + 1) for i in range(self.count(d))]

    def even_vertices(self) -> list[tuple[int, int]]:
        return [v for v in self.vertices() if v[0] % 2 == 0]

    def odd_vertices(self) -> list[tuple[int, int]]:
        return [v for v in self.vertices() if v[0] % 2 == 1]

    def bipartite_adjacency(self) -> np.ndarray:
        """Even x odd multiplicity matrix, vertices in depth-then-listed order."""
        ev = {v: k for k, v in enumerate(self.even_vertices())}
        od = {v: k for k, v in enumerate(self.odd_vertices())}
        a = np.zeros((len(ev), len(od)), dtype=np.int64)
        for d in range(1, self.max_depth + 1):
            for i, row in enumerate(self.rows(d)):
                for j, m in enumerate(row):
                    if not m:
                        continue
                    if d % 2:
                        a[ev[(d - 1, j)], od[(d, i)]] += m
                    else:
                        a[ev[(d, i)], od[(d - 1, j)]] += m
        return a

    def violations(self, name: str = "graph") -> list[str]:
        out: list[str] = []
        for d in range(1, self.max_depth + 1):
            for i, row in enumerate(self.rows(d)):
                if len(row) != self.count(d - 1):
                    out.append(f"row-length mismatch at depth {d} of {name}")
                elif sum(row) == 0:
                    out.append(f"vertex {i} at depth {d} of {name} has no edge to depth {d - 1}")
                if any(m < 0 for m in row):
                    out.append(f"negative multiplicity at depth {d} of {name}")
        if self.duals is not None:
            if len(self.duals) != self.max_depth // 2 + 1:
                out.append(f"duals of {name} cover {len(self.duals)} even depths")
            for k, perm in enumerate(self.duals):
                if sorted(perm) != list(range(self.count(2 * k))):
                    out.append(f"non-permutation duals at depth {2 * k} of {name}")
                elif any(perm[perm[i]] != i for i in range(len(perm))):
                    out.append(f"non-involution duals at depth {2 * k} of {name}")
        return out

    def truncate(self, n: int) -> "Bigraph":
        n = max(0, min(n, self.max_depth))
        duals = None if self.duals is None else self.duals[: n // 2 + 1]
        return Bigraph(self.depths[:n], duals)

    def with_identity_duals(self) -> "Bigraph":
        return Bigraph(
            self.depths,
            tuple(tuple(range(self.count(2 * k))) for k in range(self.max_depth // 2 + 1)),
        )

    def extended(self, block: Block, duals: Optional[tuple[int, ...]] = None) -> "Bigraph":
        """Append one depth; duals is required when the new depth is even."""
        new_depths = self.depths + (block,)
        new_duals = self.duals
        if (len(new_depths)) % 2 == 0 and self.duals is not None:
            new_duals = self.duals + (duals if duals is not None else tuple(range(len(block))),)
        return Bigraph(new_depths, new_duals)

    def __str__(self) -> str:
        return render(self)


def parse(s: str) -> Bigraph:
    s = s.strip()
    prefix, rest = s[:3], s[3:]
    if prefix not in ("bwd", "gbg"):
        raise CodecError(f"graph string must start with 'bwd' or 'gbg': {s!r}")
    if "duals" in rest:
        if prefix == "gbg":
            raise CodecError("'gbg' strings carry no duals section")
        body, duals_text = rest.split("duals", 1)
    else:
        if prefix == "bwd":
            raise CodecError("'bwd' string without a duals section")
        body, duals_text = rest, None

    depths: list[Block] = []
    if body:
        for d, block_text in enumerate(body.split("v"), start=1):
            prev = 1 if d == 1 else len(depths[-1])
            rows: list[Row] = []
            for i, vertex_text in enumerate(block_text.split("p")):
                tokens = vertex_text.split("x")
                if not all(_ENTRY.match(t) for t in tokens):
                    raise CodecError(f"malformed token {vertex_text!r} at depth {d}")
                row = tuple(int(t) for t in tokens)
                if len(row) != prev:
                    raise CodecError(f"row-length mismatch at depth {d}: vertex {i} has {len(row)} entries, expected {prev}")
                if sum(row) == 0:
                    raise CodecError(f"vertex {i} at depth {d} is disconnected from depth {d - 1}")
                rows.append(row)
            depths.append(tuple(rows))

    duals = None
    if duals_text is not None:
        blocks = duals_text.split("v")
        expected = len(depths) // 2 + 1
        if len(blocks) != expected:
            raise CodecError(f"duals section has {len(blocks)} blocks, expected {expected} (depths 0..{2 * (expected - 1)})")
        perms = []
        for k, block in enumerate(blocks):
            d = 2 * k
            n = 1 if d == 0 else len(depths[d - 1])
            tokens = block.split("x")
            if not all(_ENTRY.match(t) for t in tokens):
                raise CodecError(f"malformed duals token {block!r} at depth {d}")
            perm = tuple(int(t) - 1 for t in tokens)
            if sorted(perm) != list(range(n)):
                raise CodecError(f"non-permutation duals at depth {d}: {block!r}")
            perms.append(perm)
        duals = tuple(perms)
    return Bigraph(tuple(depths), duals)


def render(g: Bigraph) -> str:
    body = "v".join("p".join("x".join(str(m) for m in row) for row in block) for block in g.depths)
    if g.duals is None:
        return "gbg" + body
    duals = "v".join("x".join(str(i + 1) for i in perm) for perm in g.duals)
    return "bwd" + body + "duals" + duals


# -----------------------------
# Pairs
# -----------------------------
@dataclass(frozen=True)
class BigraphPair:
    plus: Bigraph
    minus: Bigraph

    @property
    def max_depth(self) -> int:
        return max(self.plus.max_depth, self.minus.max_depth)

    def graphs(self) -> tuple[Bigraph, Bigraph]:
        return (self.plus, self.minus)

    def swapped(self) -> "BigraphPair":
        return BigraphPair(self.minus, self.plus)

    def __str__(self) -> str:
        return render_pair(self)


def parse_pair(s: str, assume_identity_duals: bool = False) -> BigraphPair:
    parts = [t for t in s.strip().strip("()").split(",") if t.strip()]
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise CodecError(f"pair string must hold two graphs separated by ',': {s!r}")
    plus, minus = parse(parts[0]), parse(parts[1])
    if assume_identity_duals:
        plus = plus if plus.duals is not None else plus.with_identity_duals()
        minus = minus if minus.duals is not None else minus.with_identity_duals()
    return BigraphPair(plus, minus)


def render_pair(p: BigraphPair) -> str:
    return f"{render(p.plus)},{render(p.minus)}"


def validate_pair(p: BigraphPair) -> list[str]:
    out = p.plus.violations("plus") + p.minus.violations("minus")
    for name, g in (("plus", p.plus), ("minus", p.minus)):
        if g.duals is None:
            out.append(f"missing dual data on {name}")
    for d in range(1, min(p.plus.max_depth, p.minus.max_depth) + 1, 2):
        if p.plus.count(d) != p.minus.count(d):
            out.append(f"odd-count mismatch at depth {d}")
    if abs(p.plus.max_depth - p.minus.max_depth) > 1:
        out.append("depth profiles differ by more than one")
    return out


def truncate(p: BigraphPair, n: int) -> BigraphPair:
    return BigraphPair(p.plus.truncate(n), p.minus.truncate(n))


def supertransitivity(p: BigraphPair) -> int:
    g = p.plus
    k = 0
    for d in range(1, g.max_depth + 1):
        if g.count(d) == 1 and g.rows(d)[0] == (1,):
            k = d
        else:
            break
    return k


# -----------------------------
# Canonical form
# -----------------------------
# Relabelings act within each depth. Even depths of the two graphs move
# independently; odd depths move both graphs together, since odd vertices
# are paired across the pair by listed order.

def _group(g: int, d: int, p: BigraphPair) -> tuple:
    if d % 2 == 1 and p.plus.count(d) and p.minus.count(d):
        return ("o", d)
    return ("e" if d % 2 == 0 else "o1", g, d)


def _relabel(p: BigraphPair, order: dict[tuple, list[int]]) -> BigraphPair:
    out = []
    for gi, g in enumerate(p.graphs()):
        perm = {d: order.get(_group(gi, d, p), list(range(g.count(d)))) for d in range(g.max_depth + 1)}
        depths = []
        for d in range(1, g.max_depth + 1):
            below = perm[d - 1]
            depths.append(tuple(tuple(g.rows(d)[o][b] for b in below) for o in perm[d]))
        duals = None
        if g.duals is not None:
            duals = []
            for k, sigma in enumerate(g.duals):
                pk = perm[2 * k]
                inv = {old: new for new, old in enumerate(pk)}
                duals.append(tuple(inv[sigma[old]] for old in pk))
            duals = tuple(duals)
        out.append(Bigraph(tuple(depths), duals))
    return BigraphPair(out[0], out[1])


def _refined_colors(p: BigraphPair) -> dict[tuple, int]:
    """Iterated neighbourhood refinement over (graph, depth, index) objects."""
    objs: dict[tuple, tuple] = {}
    nbrs: dict[tuple, list[tuple]] = {}

    def key(gi: int, d: int, i: int) -> tuple:
        grp = _group(gi, d, p)
        return grp + (i,)

    for gi, g in enumerate(p.graphs()):
        for d, i in g.vertices():
            k = key(gi, d, i)
            if d % 2 == 0:
                objs[k] = (0, gi, d, int(g.dual(d, i) == i))
            else:
                objs.setdefault(k, (1, -1 if _group(gi, d, p)[0] == "o" else gi, d, 0))
            lst = nbrs.setdefault(k, [])
            if d >= 1:
                for j, m in enumerate(g.rows(d)[i]):
                    if m:
                        lst.append((0, gi, m, key(gi, d - 1, j)))
            for j, row in enumerate(g.up_rows(d)):
                if row[i]:
                    lst.append((1, gi, row[i], key(gi, d + 1, j)))
            if d % 2 == 0 and g.duals is not None:
                lst.append((2, gi, 1, key(gi, d, g.dual(d, i))))

    ranks = {v: r for r, v in enumerate(sorted(set(objs.values())))}
    color = {k: ranks[v] for k, v in objs.items()}
    n_colors = len(ranks)
    while True:
        sig = {
            k: (color[k], tuple(sorted((t, gi, m, color[nb]) for t, gi, m, nb in nbrs[k])))
            for k in objs
        }
        ranks = {v: r for r, v in enumerate(sorted(set(sig.values())))}
        color = {k: ranks[sig[k]] for k in objs}
        if len(ranks) == n_colors:
            return color
        n_colors = len(ranks)


def _cells(p: BigraphPair, color: dict[tuple, int]) -> dict[tuple, list[list[int]]]:
    groups: dict[tuple, list[int]] = {}
    for k in color:
        groups.setdefault(k[:-1], []).append(k[-1])
    out = {}
    for grp, members in groups.items():
        members.sort(key=lambda i: (color[grp + (i,)], i))
        cells: list[list[int]] = []
        for i in members:
            if cells and color[grp + (cells[-1][-1],)] == color[grp + (i,)]:
                cells[-1].append(i)
            else:
                cells.append([i])
        out[grp] = cells
    return out


def _orderings(cells: dict[tuple, list[list[int]]], fixed: set[tuple]) -> Iterator[dict[tuple, list[int]]]:
    slots = []
    for grp in sorted(cells, key=repr):
        for ci, cell in enumerate(cells[grp]):
            if len(cell) > 1 and (grp, ci) not in fixed:
                slots.append((grp, ci))
    choices = [itertools.permutations(cells[g][ci]) for g, ci in slots]
    for combo in itertools.product(*choices):
        chosen = dict(zip(slots, combo))
        yield {
            grp: [i for ci, cell in enumerate(cs) for i in chosen.get((grp, ci), cell)]
            for grp, cs in cells.items()
        }


def canonicalize(p: BigraphPair) -> str:
    """Least rendered string over all admissible relabelings consistent with the refined colouring."""
    color = _refined_colors(p)
    cells = _cells(p, color)
    base = {grp: [i for cell in cs for i in cell] for grp, cs in cells.items()}
    base_str = render_pair(_relabel(p, base))

    # a cell whose adjacent transpositions all fix the structure can stay put
    fixed: set[tuple] = set()
    for grp, cs in cells.items():
        for ci, cell in enumerate(cs):
            if len(cell) < 2:
                continue
            trivial = True
            for a in range(len(cell) - 1):
                swapped = list(cell)
                swapped[a], swapped[a + 1] = swapped[a + 1], swapped[a]
                trial = dict(base)
                trial[grp] = [i for cj, c in enumerate(cs) for i in (swapped if cj == ci else c)]
                if render_pair(_relabel(p, trial)) != base_str:
                    trivial = False
                    break
            if trivial:
                fixed.add((grp, ci))

    best = None
    for order in _orderings(cells, fixed):
        s = render_pair(_relabel(p, order))
        if best is None or s < best:
            best = s
    return best if best is not None else base_str


def canonical_pair(p: BigraphPair) -> BigraphPair:
    return parse_pair(canonicalize(p))


def pair_key(p: BigraphPair) -> str:
    """Canonical string up to relabeling and up to exchanging the two graphs.

    The dual subfactor exchanges Gamma+ and Gamma-, so enumeration and table
    lookups identify a pair with its swap; canonicalize keeps the order.
    """
    return min(canonicalize(p), canonicalize(p.swapped()))
