"""Seeded random instances for tests and experiments."""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .fiber import Barcode
from .geometry import GeometricTree, TreePoint
from .mergetree import CellularMergeTree
from .plfunc import PLFunction


@dataclass(frozen=True)
class TreeConfig:
    n_vertices: int = 8
    max_length: int = 3
    length_denominator: int = 1
    require_branch: bool = False


@dataclass(frozen=True)
class FunctionConfig:
    value_range: int = 20
    value_denominator: int = 1
    max_breakpoints: int = 1
    # breakpoint parameters are multiples of 1/t_denominator
    t_denominator: int = 4


@dataclass(frozen=True)
class BarcodeConfig:
    n_bars: int = 3
    span: int = 30


def prufer_decode(seq: list[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for a in seq:
        degree[a] += 1
    heap = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(heap)
    edges = []
    for a in seq:
        leaf = heapq.heappop(heap)
        edges.append((leaf, a))
        degree[a] -= 1
        if degree[a] == 1:
            heapq.heappush(heap, a)
    edges.append((heapq.heappop(heap), heapq.heappop(heap)))
    return edges


def random_tree(rng: random.Random, cfg: TreeConfig = TreeConfig()) -> GeometricTree:
    n = cfg.n_vertices
    if n < 1 or (cfg.require_branch and n < 4):
        raise ValueError(f"cannot build such a tree on {n} vertices")
    names = [f"x{i}" for i in range(n)]
    while True:
        if n == 1:
            return GeometricTree(names, [])
        pairs = prufer_decode([rng.randrange(n) for _ in range(n - 2)], n)
        edges = [
            (names[a], names[b], Fraction(rng.randint(1, cfg.max_length * cfg.length_denominator), cfg.length_denominator))
            for a, b in pairs
        ]
        X = GeometricTree(names, edges)
        if not cfg.require_branch or X.has_branch_point():
            return X


def star_tree(k: int, length=1) -> GeometricTree:
    return GeometricTree(["c"] + [f"a{i}" for i in range(k)], [("c", f"a{i}", length) for i in range(k)])


def h_tree() -> GeometricTree:
    return GeometricTree(
        ["a", "b", "c", "d", "e", "f"],
        [("a", "e", 1), ("b", "e", 1), ("e", "f", 1), ("f", "c", 1), ("f", "d", 1)],
    )


def interval_tree(k: int = 1, length=1) -> GeometricTree:
    names = [f"p{i}" for i in range(k + 1)]
    return GeometricTree(names, [(a, b, length) for a, b in zip(names, names[1:])])


def random_pl_function(X: GeometricTree, rng: random.Random, cfg: FunctionConfig = FunctionConfig()) -> PLFunction:
    def value():
        return Fraction(rng.randint(0, cfg.value_range * cfg.value_denominator), cfg.value_denominator)

    values = {v: value() for v in X.vertices}
    bps = {}
    for u, w in X.edges:
        k = rng.randint(0, cfg.max_breakpoints)
        ts = rng.sample(range(1, cfg.t_denominator), min(k, cfg.t_denominator - 1))
        if ts:
            bps[f"{u}-{w}"] = [(Fraction(t, cfg.t_denominator), value()) for t in sorted(ts)]
    return PLFunction.build(X, values, bps)


def random_generic_barcode(rng: random.Random, cfg: BarcodeConfig = BarcodeConfig()) -> Barcode:
    """Generic realizable barcode: one unbounded bar born first, all endpoints distinct."""
    n = cfg.n_bars
    ends = rng.sample(range(cfg.span), 2 * n - 1)
    root = min(ends)
    rest = [e for e in ends if e != root]
    rng.shuffle(rest)
    bars = [(root, "inf")] + [tuple(sorted(rest[2 * k : 2 * k + 2])) for k in range(n - 1)]
    return Barcode(bars)


def random_points(X: GeometricTree, n: int, rng: random.Random, denominator: int = 8) -> list[TreePoint]:
    """``n`` distinct points on a grid of step 1/denominator along every edge."""
    if not X.lengths:
        if n > 1:
            raise ValueError("a one-point tree holds a single point")
        return [X.at(X.vertices[0])]
    grid = sorted({X.point(e, Fraction(k, denominator)) for e in X.edges for k in range(denominator + 1)})
    if n > len(grid):
        raise ValueError("grid too coarse for that many points")
    return rng.sample(grid, n)


def random_member_configuration(
    X: GeometricTree, T: CellularMergeTree, rng: random.Random, denominator: int = 8, tries: int = 200
) -> tuple[TreePoint, ...]:
    """A random admissible configuration: random points, then a uniformly
    chosen admissible assignment of them to the leaves."""
    from .confspace import is_member

    n = T.n_leaves
    for _ in range(tries):
        pts = random_points(X, n, rng, denominator)
        if n <= 6:
            # the first admissible assignment in a random order is uniform among them
            perms = list(itertools.permutations(pts))
            rng.shuffle(perms)
            for perm in perms:
                if is_member(X, T, perm):
                    return perm
        else:
            rng.shuffle(pts)
            if is_member(X, T, pts):
                return tuple(pts)
    raise RuntimeError("no admissible configuration found")
