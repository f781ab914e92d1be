"""Continuous piecewise-linear functions on a geometric tree."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .geometry import (
    EdgeKey,
    GeometricTree,
    InvalidInputError,
    Refinement,
    TreePoint,
    TreeSubset,
    as_fraction,
)


@dataclass(frozen=True)
class PLFunction:
    """Vertex values plus, per edge, interior breakpoints ``(t, value)``.

    Use :meth:`build` to construct; it accepts edge names in either
    orientation and validates the breakpoints.
    """

    tree: GeometricTree = field(compare=False, repr=False)
    vertex_values: Mapping[str, Fraction]
    breakpoints: Mapping[EdgeKey, tuple[tuple[Fraction, Fraction], ...]]

    @classmethod
    def build(cls, tree: GeometricTree, vertex_values: Mapping, breakpoints: Mapping | None = None) -> "PLFunction":
        values = {}
        for v in tree.vertices:
            if v not in vertex_values:
                raise InvalidInputError(f"missing value for vertex {v!r}")
            values[v] = as_fraction(vertex_values[v])
        extra = set(vertex_values) - set(tree.vertices)
        if extra:
            raise InvalidInputError(f"values given for unknown vertices {sorted(extra)}")
        bps: dict[EdgeKey, tuple] = {}
        for name, pts in (breakpoints or {}).items():
            key, flipped = tree.resolve_edge(name)
            clean = []
            for t, val in pts:
                t, val = as_fraction(t), as_fraction(val)
                if flipped:
                    t = 1 - t
                if not 0 < t < 1:
                    raise InvalidInputError(f"breakpoint parameter {t} on {name} not inside (0, 1)")
                clean.append((t, val))
            clean.sort()
            if any(a[0] == b[0] for a, b in zip(clean, clean[1:])):
                raise InvalidInputError(f"repeated breakpoint parameter on edge {name}")
            if clean:
                bps[key] = tuple(clean)
        return cls(tree, values, bps)

    @classmethod
    def from_refinement(cls, ref: Refinement, node_values: Mapping[int, Fraction]) -> "PLFunction":
        tree = ref.tree
        values = {v: node_values[ref.index[TreePoint(vertex=v)]] for v in tree.vertices}
        bps: dict[EdgeKey, list] = {}
        for i, p in enumerate(ref.nodes):
            if p.vertex is None:
                bps.setdefault(p.edge, []).append((p.t, node_values[i]))
        return cls(tree, values, {k: tuple(sorted(v)) for k, v in bps.items()})

    def knots(self, key: EdgeKey) -> list[tuple[Fraction, Fraction]]:
        return (
            [(Fraction(0), self.vertex_values[key[0]])]
            + list(self.breakpoints.get(key, ()))
            + [(Fraction(1), self.vertex_values[key[1]])]
        )

    def breakpoint_points(self) -> list[TreePoint]:
        return [TreePoint(edge=k, t=t) for k, pts in self.breakpoints.items() for t, _ in pts]

    def __call__(self, p: TreePoint) -> Fraction:
        return evaluate(self, p)

    def __add__(self, other: "PLFunction") -> "PLFunction":
        ref, a = refined_values(self, other.breakpoint_points())
        b = [evaluate(other, p) for p in ref.nodes]
        return PLFunction.from_refinement(ref, {i: a[i] + b[i] for i in range(len(a))})

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        ref, a = refined_values(self, other.breakpoint_points())
        b = [evaluate(other, p) for p in ref.nodes]
        return PLFunction.from_refinement(ref, {i: a[i] - b[i] for i in range(len(a))})

    def shifted(self, c) -> "PLFunction":
        c = as_fraction(c)
        return PLFunction(
            self.tree,
            {v: x + c for v, x in self.vertex_values.items()},
            {k: tuple((t, x + c) for t, x in pts) for k, pts in self.breakpoints.items()},
        )

    def values(self) -> list[Fraction]:
        return list(self.vertex_values.values()) + [x for pts in self.breakpoints.values() for _, x in pts]


@dataclass(frozen=True)
class LocalMinimum:
    region: TreeSubset
    value: Fraction


def evaluate(f: PLFunction, p: TreePoint) -> Fraction:
    if p.vertex is not None:
        return f.vertex_values[p.vertex]
    knots = f.knots(p.edge)
    k = bisect.bisect_left(knots, (p.t,))
    t1, v1 = knots[k]
    if t1 == p.t:
        return v1
    t0, v0 = knots[k - 1]
    return v0 + (v1 - v0) * (p.t - t0) / (t1 - t0)


def refined_values(f: PLFunction, extra: Iterable[TreePoint] = ()) -> tuple[Refinement, list[Fraction]]:
    """Refinement at the breakpoints of ``f`` (plus ``extra``) and f at every node.

    ``f`` is linear on each segment of the returned refinement.
    """
    ref = Refinement(f.tree, f.breakpoint_points() + list(extra))
    return ref, [evaluate(f, p) for p in ref.nodes]


class _UnionFind:
    def __init__(self, items: Iterable[int]):
        self.parent = {i: i for i in items}

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i in self.parent:
            out.setdefault(self.find(i), []).append(i)
        return out


def local_minima(f: PLFunction) -> list[LocalMinimum]:
    """All set-valued local minima, sorted by value then position.

    A plateau (maximal connected set of constant value) is a local minimum
    exactly when every edge leaving it goes up.
    """
    ref, val = refined_values(f)
    uf = _UnionFind(range(len(ref.nodes)))
    for a, b, *_ in ref.segments:
        if val[a] == val[b]:
            uf.union(a, b)
    out = []
    for members in uf.groups().values():
        mset = set(members)
        level = val[members[0]]
        if all(val[j] > level for i in members for j, _ in ref.adj[i] if j not in mset):
            out.append(LocalMinimum(ref.subset(mset), level))
    out.sort(key=lambda m: (m.value, m.region.points()[0].key))
    return out


def max_on_path(f: PLFunction, P: TreeSubset) -> tuple[Fraction, list[TreeSubset]]:
    """Maximum of ``f`` over the connected set ``P`` and the maximal connected
    subsets where it is attained, ordered by distance from the first extreme
    point of ``P``."""
    if not P.is_connected():
        raise InvalidInputError("max_on_path needs a connected subset")
    ref, val = refined_values(f, P.points())
    nodes, segs = ref.members(P)
    top = max(val[i] for i in nodes)
    hits = {i for i in nodes if val[i] == top}
    uf = _UnionFind(hits)
    for s in segs:
        a, b = ref.segments[s][:2]
        if a in hits and b in hits:
            uf.union(a, b)
    origin = P.points()[0]
    regions = []
    for members in uf.groups().values():
        mset = set(members)
        segs_in = [s for s in segs if ref.segments[s][0] in mset and ref.segments[s][1] in mset]
        region = ref.subset(mset, segs_in)
        regions.append((min(ref.tree.distance(origin, ref.nodes[i]) for i in members), region))
    regions.sort(key=lambda item: item[0])
    return top, [r for _, r in regions]


def sublevel_components(f: PLFunction, t) -> list[TreeSubset]:
    """Connected components of the closed sublevel set ``f <= t``."""
    t = as_fraction(t)
    ref, val = refined_values(f)
    low = {i for i, x in enumerate(val) if x <= t}
    uf = _UnionFind(low)
    for a, b, *_ in ref.segments:
        if a in low and b in low:
            uf.union(a, b)
    comps = []
    for members in uf.groups().values():
        mset = set(members)
        pieces = []
        for s, (a, b, key, t0, t1) in enumerate(ref.segments):
            if a in mset and b in mset:
                pieces.append((key, t0, t1))
            elif a in mset or b in mset:
                # linear edge leaving the sublevel set: keep the part up to the crossing
                inside, outside = (a, b) if a in mset else (b, a)
                ti = t0 if inside == a else t1
                to = t1 if inside == a else t0
                cross = ti + (to - ti) * (t - val[inside]) / (val[outside] - val[inside])
                pieces.append((key, ti, cross))
        vertices = [ref.nodes[i].vertex for i in mset if ref.nodes[i].vertex is not None]
        pieces += [(ref.nodes[i].edge, ref.nodes[i].t, ref.nodes[i].t) for i in mset if ref.nodes[i].vertex is None]
        comps.append(TreeSubset.build(f.tree, vertices, pieces, check=False))
    comps.sort(key=lambda c: c.points()[0].key)
    return comps


def sup_distance(f: PLFunction, g: PLFunction) -> Fraction:
    """Exact sup-norm of ``f - g``."""
    ref, a = refined_values(f, g.breakpoint_points())
    return max(abs(a[i] - evaluate(g, p)) for i, p in enumerate(ref.nodes))


def critical_values(f: PLFunction) -> list[Fraction]:
    return sorted(set(f.values()))
