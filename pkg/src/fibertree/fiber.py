"""Barcodes and the inverse problem at the merge-tree level."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    Arc,
    GeometricTree,
    InvalidInputError,
    Refinement,
    TreePoint,
    bridge,
    convex_hull,
    project,
)
from .mergetree import (
    CellularMergeTree,
    barcode_intervals,
    canonical_form,
    compute_merge_tree,
    is_generic,
    is_isomorphic,
)
from .plfunc import PLFunction, local_minima, refined_values

INF = math.inf


class NotRealizableError(ValueError):
    """The barcode cannot come from a continuous function on a tree."""


class UnsupportedDomainError(ValueError):
    """The tree has no branch point, which the fiber results exclude."""


@dataclass(frozen=True)
class Barcode:
    """Multiset of half-open intervals ``[b, d)``; ``d`` may be ``math.inf``."""

    intervals: tuple[tuple[Fraction, Fraction | float], ...]

    def __init__(self, intervals: Iterable[Sequence]):
        clean = []
        for b, d in intervals:
            b = Fraction(b)
            d = INF if d in (INF, "inf", None) else Fraction(d)
            if not b < d:
                raise InvalidInputError(f"interval [{b}, {d}) is empty")
            clean.append((b, d))
        object.__setattr__(self, "intervals", tuple(sorted(clean, key=_bar_key)))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def finite(self) -> list[tuple[Fraction, Fraction]]:
        return [bar for bar in self.intervals if bar[1] != INF]

    @property
    def unbounded(self) -> list[tuple[Fraction, float]]:
        return [bar for bar in self.intervals if bar[1] == INF]


def _bar_key(bar):
    b, d = bar
    return (b, math.inf if d == INF else d)


def barcode_of(T: CellularMergeTree) -> Barcode:
    return Barcode(barcode_intervals(T))


def barcode_of_function(f: PLFunction) -> Barcode:
    return barcode_of(compute_merge_tree(f)[0])


def is_generic_barcode(D: Barcode) -> bool:
    ends = [b for b, _ in D] + [d for _, d in D if d != INF]
    return len(set(ends)) == len(ends)


def _min_gap(values: Iterable) -> Fraction | float:
    vals = sorted(set(values))
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    return min(gaps) if gaps else INF


def separation_thresholds(D: Barcode) -> tuple[Fraction | float, Fraction | float]:
    """(delta_L, delta_R): smallest gaps between distinct left / finite right endpoints."""
    return _min_gap(b for b, _ in D), _min_gap(d for _, d in D if d != INF)


def separation(D: Barcode) -> Fraction | float:
    return min(separation_thresholds(D))


def contains(outer, inner, strict: bool = False) -> bool:
    (b1, d1), (b2, d2) = outer, inner
    if strict:
        return b1 < b2 and d2 < d1
    return b1 <= b2 and d2 <= d1


def check_realizable(D: Barcode) -> None:
    unbounded = D.unbounded
    if len(unbounded) != 1:
        raise NotRealizableError(f"need exactly one unbounded interval, found {len(unbounded)}")
    if any(not contains(unbounded[0], bar) for bar in D):
        raise NotRealizableError("every interval must lie inside the unbounded one")


def _check_generic_realizable(D: Barcode) -> None:
    if not is_generic_barcode(D):
        raise InvalidInputError("barcode is not generic (repeated endpoints)")
    check_realizable(D)


def containment_product(D: Barcode) -> int:
    """prod over bars of #{bars containing it}, each bar counting itself."""
    return math.prod(sum(contains(other, bar) for other in D) for bar in D)


def count_components(D: Barcode) -> int:
    """Number of non-isomorphic merge trees with barcode ``D``.

    Each finite bar dies by merging into an older bar still alive at its death,
    i.e. a bar that strictly contains it; the choices are independent.
    """
    _check_generic_realizable(D)
    return math.prod(sum(contains(other, bar, strict=True) for other in D) for bar in D.finite)


def enumerate_merge_trees(D: Barcode) -> list[CellularMergeTree]:
    """All generic merge trees with barcode ``D``, one per isomorphism class,
    in canonical-form order."""
    _check_generic_realizable(D)
    bars = sorted(D, key=lambda bar: (-_bar_key(bar)[1], bar[0]))
    root_bar, finite = bars[0], bars[1:]
    options = [[other for other in bars if contains(other, bar, strict=True)] for bar in finite]
    seen = {}
    for choice in itertools.product(*options):
        T = _assemble(root_bar, finite, choice)
        seen.setdefault(canonical_form(T), T)
    return [seen[k] for k in sorted(seen)]


def _assemble(root_bar, finite, hosts) -> CellularMergeTree:
    """Tree where each finite bar's branch joins its host bar's branch at its death."""
    bars = sorted([root_bar, *finite], key=_bar_key)
    leaf = {bar: f"l{k + 1}" for k, bar in enumerate(bars)}
    by_death = sorted(finite, key=lambda bar: bar[1])
    death = {bar: f"v{k + 1}" for k, bar in enumerate(by_death)}
    attached = {bar: [] for bar in bars}
    for bar, host in zip(finite, hosts):
        attached[host].append(bar)
    height = {leaf[bar]: bar[0] for bar in bars}
    height.update({death[bar]: bar[1] for bar in finite})
    parent: dict[str, str | None] = {}
    for bar in bars:
        chain = [leaf[bar]] + [death[c] for c in sorted(attached[bar], key=lambda c: c[1])]
        for lo, hi in zip(chain, chain[1:]):
            parent[lo] = hi
        parent[chain[-1]] = None if bar == root_bar else death[bar]
    return CellularMergeTree(height, parent, tuple(leaf[bar] for bar in bars))


# -- fiber membership ---------------------------------------------------


@dataclass(frozen=True)
class FiberCheck:
    ok: bool
    diagnostic: str | None = None

    def __bool__(self):
        return self.ok


def verify_fiber_membership(f: PLFunction, T: CellularMergeTree) -> FiberCheck:
    """Decide MT(f) = T through minima values and the saddle condition at
    every internal node (maximum along the bridge between child hulls)."""
    if not is_generic(T):
        raise InvalidInputError("fiber membership is decided for generic merge trees")
    minima = local_minima(f)
    if len(minima) != T.n_leaves:
        return FiberCheck(False, f"minima count mismatch: f has {len(minima)}, tree has {T.n_leaves} leaves")
    by_value = {m.value: m for m in minima}
    regions = {}
    for leaf in T.leaves:
        m = by_value.get(T.height[leaf])
        if m is None:
            return FiberCheck(False, f"minima value mismatch: no minimum at height {T.height[leaf]}")
        regions[leaf] = m.region
    # one refinement carries f, the minimum regions and every bridge; hulls
    # are Steiner subtrees of node sets and f is linear on refined segments
    ref, val = refined_values(f, [p for r in regions.values() for p in r.points()])
    hull = {leaf: ref.members(regions[leaf])[0] for leaf in T.leaves}
    for v in T.internal_nodes:
        left, right = T.children[v]
        path = ref.node_path(min(hull[left]), min(hull[right]))
        start = max(k for k, node in enumerate(path) if node in hull[left])
        stop = min(k for k, node in enumerate(path) if node in hull[right])
        if start > stop:
            return FiberCheck(False, f"hulls of the children of {v} meet")
        bridge_vals = [val[node] for node in path[start : stop + 1]]
        top = max(bridge_vals)
        if top != T.height[v]:
            return FiberCheck(False, f"node height mismatch at {v}: max {top} on the bridge, expected {T.height[v]}")
        runs = sum(1 for k, x in enumerate(bridge_vals) if x == top and (k == 0 or bridge_vals[k - 1] != top))
        if runs != 1:
            return FiberCheck(False, f"saddle not unique at {v}: maximum attained on {runs} pieces")
        hull[v] = ref.steiner(hull[left] | hull[right])
    return FiberCheck(True)


# -- realization --------------------------------------------------------


def default_configuration(T: CellularMergeTree, X: GeometricTree) -> tuple[TreePoint, ...]:
    """Points spread along the longest edge with each node's leaves contiguous."""
    order: list[int] = []

    def walk(v):
        kids = T.children[v]
        if not kids:
            order.append(T.leaves.index(v))
        for c in kids:
            walk(c)

    walk(T.root)
    if not X.lengths:
        if T.n_leaves != 1:
            raise InvalidInputError("a one-point space carries a single minimum")
        return (X.at(X.vertices[0]),)
    edge = max(X.lengths, key=lambda k: (X.lengths[k], k))
    n = T.n_leaves
    pts = [None] * n
    for pos, i in enumerate(order):
        pts[i] = X.point(edge, Fraction(pos + 1, n + 1))
    return tuple(pts)


class _Piece:
    """Linear ramp of values along an arc."""

    def __init__(self, arc: Arc, v0: Fraction, v1: Fraction):
        self.arc, self.v0, self.v1 = arc, v0, v1

    def value(self, p: TreePoint) -> Fraction | None:
        s = self.arc.coordinate(p)
        if s is None:
            return None
        return self.v0 + (self.v1 - self.v0) * s / self.arc.length


def realize_function(
    T: CellularMergeTree, X: GeometricTree, Z: Sequence[TreePoint] | None = None
) -> PLFunction:
    """PL function with merge tree ``T`` whose minima sit at the points ``Z``.

    Values rise linearly from each child hull to a saddle at the midpoint of
    the bridge between the two child hulls, and grow with distance outside
    the hull of all points.
    """
    from .confspace import is_member

    if not is_generic(T):
        raise InvalidInputError("realization needs a generic merge tree")
    if Z is None:
        Z = default_configuration(T, X)
    Z = tuple(Z)
    check = is_member(X, T, Z)
    if not check:
        raise InvalidInputError(f"configuration is not in Conf(X,T): {check.witness}")
    point_values = {Z[i]: T.height[leaf] for i, leaf in enumerate(T.leaves)}
    pieces: list[_Piece] = []
    special = list(Z)

    def value_at(p):
        if p in point_values:
            return point_values[p]
        for piece in pieces:
            val = piece.value(p)
            if val is not None:
                return val
        raise AssertionError(f"no value assigned at {p!r}")

    def hull(v):
        return convex_hull(X, [Z[i] for i in sorted(T.leaf_indices(v))])

    for v in T.internal_nodes:
        left, right = T.children[v]
        route = bridge(X, hull(left), hull(right))
        p, q = route[0], route[-1]
        whole = Arc(X, p, q)
        y = whole.point_at(whole.length / 2)
        fp, fq, fy = value_at(p), value_at(q), T.height[v]
        pieces.append(_Piece(Arc(X, p, y), fp, fy))
        pieces.append(_Piece(Arc(X, y, q), fy, fq))
        special += [p, q, y]

    ref = Refinement(X, special)
    H = convex_hull(X, list(Z))
    values = {}
    for i, node in enumerate(ref.nodes):
        if H.contains(node):
            values[i] = value_at(node)
        else:
            foot = project(X, node, H)
            values[i] = value_at(foot) + X.distance(node, foot)
    return PLFunction.from_refinement(ref, values)


# -- components ---------------------------------------------------------


def same_component(f: PLFunction, g: PLFunction, X: GeometricTree | None = None) -> bool:
    """Whether ``f`` and ``g`` lie in the same path component of their common
    barcode fiber, i.e. have isomorphic merge trees."""
    X = X or f.tree
    if not X.has_branch_point():
        raise UnsupportedDomainError("the tree is an interval; components are not decided there")
    Tf, _ = compute_merge_tree(f)
    Tg, _ = compute_merge_tree(g)
    Df, Dg = barcode_of(Tf), barcode_of(Tg)
    if Df != Dg:
        raise InvalidInputError("functions have different barcodes")
    if not is_generic_barcode(Df):
        raise InvalidInputError("barcode is not generic")
    return is_isomorphic(Tf, Tg)


def circle_count(X: GeometricTree) -> int:
    """Number of circles in the wedge that a two-bar fiber retracts onto."""
    if not X.has_branch_point():
        raise UnsupportedDomainError("needs a vertex of degree >= 3")
    return -1 + sum((X.degree(v) - 1) * (X.degree(v) - 2) for v in X.vertices)
