# odometer.py
# Depth-by-depth growth of principal graph pairs from a seed weed, with the
# pruning filters (index bound, associativity, walk counts, supertransitivity,
# self-dual counts), the intermediate-subfactor filter, stability
# classification and the exclusion table. Produces a ClassificationTree whose
# nodes are what the journal and DOT exporters write out.

from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Literal, Optional, Sequence

import numpy as np

from bigraph import (
    Bigraph,
    BigraphPair,
    Row,
    pair_key,
    parse_pair,
    supertransitivity,
    truncate,
)
from qarith import AlgebraicReal, compare
from schema import ClassificationNode, ExclusionRule, Restriction
from spectral import norm_squared, norm_squared_float, vine_status

log = logging.getLogger(__name__)

FLOAT_GUARD = float(os.getenv("ODOMETER_FLOAT_GUARD", "1e-6"))
INTERMEDIATE_CITATION = "biprojection criterion via thickness (arXiv:1308.5656)"

Kind = Literal["weed", "cylinder", "dead"]


class OdometerAssertion(RuntimeError):
    """An internal invariant of the enumeration failed."""


# -----------------------------
# Structural tests
# -----------------------------
def thickness(g: Bigraph, v: int, w: int) -> int:
    """Number of length-2 paths between depth-2 vertices v and w."""
    rows2 = g.rows(2)
    total = sum(a * b for a, b in zip(rows2[v], rows2[w]))
    for row in g.up_rows(2):
        total += row[v] * row[w]
    return total


def thin_central_vertex(g: Bigraph) -> Optional[int]:
    """A central depth-2 vertex of dimension > 1 at thickness 1 from every other depth-2 vertex."""
    if g.max_depth < 2 or g.count(1) != 1:
        return None
    n = g.count(2)
    for v in range(n):
        if g.rows(2)[v] != (1,):
            continue
        # degree >= 2 stands in for dim > 1: a dimension-1 vertex is univalent
        if g.degree(2, v) < 2:
            continue
        if all(thickness(g, v, w) == 1 for w in range(n) if w != v):
            return v
    return None


def intermediate_filter(p: BigraphPair) -> bool:
    """True when either graph has a vertex forcing an intermediate subfactor.

    N < M has an intermediate exactly when the dual inclusion does, so the
    test reads Gamma- as well as Gamma+.
    """
    return any(thin_central_vertex(g) is not None for g in p.graphs())


def is_stable_at_depth(g: Bigraph, n: int) -> bool:
    if n >= g.max_depth:
        raise ValueError(f"depth {n} has no successor in a graph of depth {g.max_depth}")
    met = [0] * g.count(n)
    for row in g.rows(n + 1):
        down = [i for i, m in enumerate(row) if m]
        if len(down) != 1 or row[down[0]] != 1:
            return False
        met[down[0]] += 1
    return all(c <= 1 for c in met)


def _norm_within(g: Bigraph, bound: AlgebraicReal, guard: float = FLOAT_GUARD) -> bool:
    f, b = norm_squared_float(g), float(bound)
    if f < b - guard:
        return True
    if f > b + guard:
        return False
    return compare(norm_squared(g), bound) != "GT"


def classify_pair(p: BigraphPair, bound: AlgebraicReal) -> Kind:
    if not all(_norm_within(g, bound) for g in p.graphs()):
        return "dead"
    d = p.max_depth
    # stability only counts past the branch point
    if d - 1 > supertransitivity(p) and all(
        g.max_depth == d and is_stable_at_depth(g, d - 1) for g in p.graphs()
    ):
        return "cylinder"
    return "weed"


# -----------------------------
# Pair compatibility
# -----------------------------
def _adjacency(g: Bigraph) -> tuple[list[tuple[int, int]], np.ndarray]:
    verts = g.vertices()
    idx = {v: k for k, v in enumerate(verts)}
    a = np.zeros((len(verts), len(verts)), dtype=object)
    for d in range(1, g.max_depth + 1):
        for i, row in enumerate(g.rows(d)):
            for j, m in enumerate(row):
                if m:
                    a[idx[(d, i)], idx[(d - 1, j)]] += m
                    a[idx[(d - 1, j)], idx[(d, i)]] += m
    return verts, a


def root_walks(g: Bigraph, upto: int) -> tuple[int, ...]:
    """Closed walks of length 2j at the root, j = 1..upto (exact integers)."""
    verts, a = _adjacency(g)
    v = np.zeros(len(verts), dtype=object)
    v[0] = 1
    out = []
    for _ in range(upto):
        v = a.dot(v)
        out.append(int(v.dot(v)))
    return tuple(out)


def _associativity_ok(p: BigraphPair, skip_depth: Optional[int] = None) -> bool:
    plus, minus = p.plus, p.minus
    a_plus, a_minus = plus.bipartite_adjacency(), minus.bipartite_adjacency()
    common = min(a_plus.shape[1], a_minus.shape[1])
    prod = a_plus[:, :common] @ a_minus[:, :common].T
    ev_p, ev_m = plus.even_vertices(), minus.even_vertices()
    pos_p = {v: k for k, v in enumerate(ev_p)}
    pos_m = {v: k for k, v in enumerate(ev_m)}
    for x_ in ev_p:
        xb = (x_[0], plus.dual(*x_))
        for z in ev_m:
            if skip_depth is not None and x_[0] == skip_depth and z[0] == skip_depth:
                continue
            zb = (z[0], minus.dual(*z))
            if prod[pos_p[x_], pos_m[z]] != prod[pos_p[xb], pos_m[zb]]:
                return False
    return True


def _self_dual_counts_ok(p: BigraphPair) -> bool:
    if p.plus.max_depth < 2 or p.minus.max_depth < 2:
        return True
    simple = all(r == (1,) for g in p.graphs() for r in g.rows(2))
    return not simple or p.plus.self_dual_count(2) == p.minus.self_dual_count(2)


def is_finite_pair(p: BigraphPair) -> bool:
    """Whether the pair, read as complete finite graphs, passes the compatibility checks."""
    if p.plus.max_depth != p.minus.max_depth:
        return False
    if any(p.plus.count(d) != p.minus.count(d) for d in range(1, p.max_depth + 1, 2)):
        return False
    if not _associativity_ok(p):
        return False
    # walk sequences obey a recurrence of order <= vertex count
    n = len(p.plus.vertices()) + len(p.minus.vertices())
    return root_walks(p.plus, n) == root_walks(p.minus, n)


# -----------------------------
# Extension
# -----------------------------
def _candidate_rows(width: int, mmax: int) -> list[Row]:
    return sorted(r for r in itertools.product(range(mmax + 1), repeat=width) if any(r))


def _row_multisets(g: Bigraph, bound: AlgebraicReal, mmax: int) -> list[tuple[Row, ...]]:
    """Nonempty multisets of new rows for g whose norm stays within bound."""
    width = g.count(g.max_depth)
    ok = [r for r in _candidate_rows(width, mmax) if _norm_within(Bigraph(g.depths + ((r,),)), bound)]
    out: list[tuple[Row, ...]] = []

    def grow(start: int, acc: list[Row]) -> None:
        for k in range(start, len(ok)):
            block = tuple(acc) + (ok[k],)
            if not _norm_within(Bigraph(g.depths + (block,)), bound):
                continue
            out.append(block)
            acc.append(ok[k])
            grow(k, acc)
            acc.pop()

    grow(0, [])
    return out


def involutions(n: int) -> Iterator[tuple[int, ...]]:
    def rec(rest: list[int]) -> Iterator[dict[int, int]]:
        if not rest:
            yield {}
            return
        a = rest[0]
        for m in rec(rest[1:]):
            yield {**m, a: a}
        for k in range(1, len(rest)):
            b = rest[k]
            for m in rec(rest[1:k] + rest[k + 1:]):
                yield {**m, a: b, b: a}

    for m in rec(list(range(n))):
        yield tuple(m[i] for i in range(n))


def _graph_options(g: Bigraph, bound: AlgebraicReal, mmax: int, n_new: int) -> list[Bigraph]:
    opts = []
    for block in _row_multisets(g, bound, mmax):
        if n_new % 2:
            opts.append(Bigraph(g.depths + (block,), g.duals))
        else:
            opts.extend(g.extended(block, inv) for inv in involutions(len(block)))
    return opts


def _by_walks(graphs: Iterable[Bigraph], upto: int) -> dict[tuple[int, ...], list[Bigraph]]:
    groups: dict[tuple[int, ...], list[Bigraph]] = {}
    for g in graphs:
        groups.setdefault(root_walks(g, upto), []).append(g)
    return groups


def _admissible(child: BigraphPair, n_new: int) -> bool:
    st = supertransitivity(child)
    if 1 < st < child.max_depth:
        return False
    if not _associativity_ok(child, skip_depth=n_new if n_new % 2 == 0 else None):
        return False
    return _self_dual_counts_ok(child)


def extend_one_depth(p: BigraphPair, bound: AlgebraicReal) -> list[BigraphPair]:
    """All one-depth extensions of a weed up to relabeling and swap, keyed and sorted."""
    if p.plus.max_depth != p.minus.max_depth:
        raise ValueError("extension needs both graphs at the same depth")
    n_new = p.max_depth + 1
    mmax = int(float(bound) ** 0.5 + FLOAT_GUARD)
    plus_opts = _by_walks(_graph_options(p.plus, bound, mmax, n_new), n_new)
    minus_opts = _by_walks(_graph_options(p.minus, bound, mmax, n_new), n_new)

    seen: dict[str, BigraphPair] = {}
    for walks, plus_list in plus_opts.items():
        for gp in plus_list:
            for gm in minus_opts.get(walks, ()):
                if n_new % 2:
                    k = gp.count(n_new)
                    if gm.count(n_new) != k:
                        continue
                    # odd vertices pair by listed order: try every ordering of the minus rows
                    orders = sorted(set(itertools.permutations(gm.rows(n_new))))
                    cands = [BigraphPair(gp, Bigraph(gm.depths[:-1] + (o,), gm.duals)) for o in orders]
                else:
                    cands = [BigraphPair(gp, gm)]
                for child in cands:
                    if not _admissible(child, n_new):
                        continue
                    key = pair_key(child)
                    if key not in seen:
                        seen[key] = parse_pair(key)
    return [seen[k] for k in sorted(seen)]


# -----------------------------
# Restrictions for family runs
# -----------------------------
def _dart_graph(p: BigraphPair) -> Optional[Bigraph]:
    """The graph whose first three depths have the P', [R], Q' shape, if any."""
    for g in p.graphs():
        if g.max_depth < 3 or g.count(1) != 1 or g.count(2) != 2 or g.count(3) != 3:
            continue
        if any(r != (1,) for r in g.rows(2)):
            continue
        shapes = sorted(tuple(j for j, m in enumerate(r) if m) for r in g.rows(3))
        if shapes == [(0,), (0, 1), (1,)] and all(m <= 1 for r in g.rows(3) for m in r):
            return g
    return None


def _depth3_reach(g: Bigraph) -> tuple[list[bool], list[bool]]:
    """(side vertices reaching depth 4, middle vertices reaching depth 4)."""
    up = g.rows(4)
    side, middle = [], []
    for i, row in enumerate(g.rows(3)):
        reaches = any(r[i] for r in up)
        (middle if sum(1 for m in row if m) == 2 else side).append(reaches)
    return side, middle


def _restriction_ok(p: BigraphPair, name: str) -> bool:
    if name == "drop-cylinders":
        return True
    if p.max_depth < 4:
        return True
    g = _dart_graph(p)
    if g is None:
        return False
    side, middle = _depth3_reach(g)
    if name == "d1":
        return sum(side) == 1 and not any(middle)
    if name == "d2":
        return all(side) and not any(middle)
    if name == "d3":
        return any(middle)
    if name == "two-edges-3-4":
        return sum(sum(r) for r in g.rows(4)) == 2
    raise ValueError(f"unknown restriction {name!r}")


# -----------------------------
# Exclusion table
# -----------------------------
def _two_supertransitive(p: BigraphPair) -> bool:
    return supertransitivity(p) >= 2


def _self_dual_mismatch(p: BigraphPair) -> bool:
    return not _self_dual_counts_ok(p)


PREDICATES: dict[str, Callable[[BigraphPair], bool]] = {
    "two-supertransitive": _two_supertransitive,
    "self-dual-count-mismatch": _self_dual_mismatch,
}


@dataclass(frozen=True)
class _Matcher:
    depth: int
    canonical: str

    @classmethod
    @lru_cache(maxsize=None)
    def of(cls, pair_string: str) -> "_Matcher":
        pair = parse_pair(pair_string, assume_identity_duals=True)
        return cls(pair.max_depth, pair_key(pair))

    def matches(self, p: BigraphPair) -> bool:
        return p.max_depth >= self.depth and pair_key(truncate(p, self.depth)) == self.canonical


def match_rule(rules: Sequence[ExclusionRule], p: BigraphPair, kind: str = "exclusion") -> Optional[ExclusionRule]:
    for rule in rules:
        if rule.kind != kind:
            continue
        if rule.predicate is not None:
            if PREDICATES[rule.predicate](p):
                return rule
        elif _Matcher.of(rule.match).matches(p):
            return rule
    return None


# -----------------------------
# Breadth-first run
# -----------------------------
@dataclass
class ClassificationTree:
    nodes: list[ClassificationNode] = field(default_factory=list)

    def level(self, depth: int) -> list[ClassificationNode]:
        return [n for n in self.nodes if n.depth == depth]

    def grown(self, depth: int) -> list[ClassificationNode]:
        """Nodes at a depth that the exclusion table did not set aside."""
        return [n for n in self.level(depth) if n.rule is None]

    def with_status(self, *statuses: str) -> list[ClassificationNode]:
        return [n for n in self.nodes if n.status in statuses]

    def summary(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for n in self.nodes:
            out[n.status] = out.get(n.status, 0) + 1
        out["intermediates"] = sum(1 for n in self.nodes if n.reason == "intermediate")
        out["vines+cylinders"] = out.get("vine", 0) + out.get("cylinder", 0)
        out["weeds"] = out.get("weed-active", 0)
        return dict(sorted(out.items()))


def _both_stable_before(p: BigraphPair) -> Optional[int]:
    st = supertransitivity(p)
    for d in range(st + 1, p.max_depth - 1):
        if all(g.max_depth > d and is_stable_at_depth(g, d) for g in p.graphs()):
            return d
    return None


@lru_cache(maxsize=4096)
def _exact_norm(g: Bigraph) -> AlgebraicReal:
    return norm_squared(g)


def pair_norm(p: BigraphPair) -> AlgebraicReal:
    """The larger of the two exact squared norms."""
    a, b = (_exact_norm(g) for g in p.graphs())
    return b if compare(a, b) == "LT" else a


def run(
    seed: BigraphPair,
    max_depth: int,
    bound: AlgebraicReal,
    rules: Sequence[ExclusionRule] = (),
    ignore: Sequence[str] = (),
    restrict: Sequence[Restriction] = (),
    index_min: Optional[AlgebraicReal] = None,
) -> ClassificationTree:
    """Grow the seed breadth-first to max_depth under the index bound.

    With index_min given, vines and cylinders carry the verdict of the
    numerical vine tests over the window [index_min, bound].
    """
    tree = ClassificationTree()
    ignore_m = [_Matcher.of(s) for s in ignore]
    drop_cylinders = "drop-cylinders" in restrict
    filters = [r for r in restrict if r != "drop-cylinders"]
    window = (index_min, bound) if index_min is not None else None

    level: dict[str, tuple[BigraphPair, Optional[str]]] = {}
    key = pair_key(seed)
    level[key] = (parse_pair(key), None)

    while level:
        nxt: dict[str, tuple[BigraphPair, Optional[str]]] = {}
        depth = next(iter(level.values()))[0].max_depth
        for key in sorted(level):
            p, parent = level[key]
            node = dict(depth=p.max_depth, pair=key.split(","), parent=parent)
            extend = False

            rule = match_rule(rules, p)
            if rule is not None:
                node.update(status="excluded", reason=rule.reason, citation=rule.citation, rule=rule.id)
            elif intermediate_filter(p):
                node.update(status="excluded", reason="intermediate", citation=INTERMEDIATE_CITATION)
            else:
                kind = classify_pair(p, bound)
                if kind == "dead":
                    node.update(status="excluded", reason="index-bound")
                elif kind == "cylinder":
                    if drop_cylinders:
                        continue
                    node.update(status="cylinder")
                elif any(m.matches(p) for m in ignore_m):
                    node.update(status="weed-ignored")
                else:
                    finite = is_finite_pair(p)
                    if p.max_depth >= max_depth:
                        node.update(status="vine" if finite else "weed-active")
                    else:
                        node.update(status="vine" if finite else "weed-extended")
                        extend = True
            if window is not None and node.get("status") in ("vine", "cylinder"):
                verdict = vine_status(p, window)
                node.update(verdict="accepted" if verdict.accepted else verdict.reason)
            tree.nodes.append(ClassificationNode(**node))

            if not extend:
                continue
            parent_norm = pair_norm(p)
            for child in extend_one_depth(p, bound):
                if not all(_restriction_ok(child, r) for r in filters):
                    continue
                bad = _both_stable_before(child)
                if bad is not None:
                    raise OdometerAssertion(f"{child} is stable at depth {bad} yet still growing")
                if compare(pair_norm(child), parent_norm) == "LT":
                    raise OdometerAssertion(f"norm decreased from {key} to {child}")
                ckey = pair_key(child)
                if ckey not in nxt:
                    nxt[ckey] = (child, key)

        counts: dict[str, int] = {}
        for n in tree.level(depth):
            counts[n.status] = counts.get(n.status, 0) + 1
        log.info("depth %d: %s", depth, ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
        level = nxt
    return tree


__all__ = (
    "ClassificationTree",
    "OdometerAssertion",
    "PREDICATES",
    "classify_pair",
    "extend_one_depth",
    "intermediate_filter",
    "involutions",
    "is_finite_pair",
    "is_stable_at_depth",
    "match_rule",
    "pair_norm",
    "root_walks",
    "run",
    "thickness",
    "thin_central_vertex",
)
