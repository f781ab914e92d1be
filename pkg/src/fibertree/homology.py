"""Discrete configuration complexes of a tree and their Betti numbers.

The discrete model of Conf_n(X) takes ordered n-tuples of closed cells of a
subdivided copy of X (vertices and edges) with pairwise disjoint closures.
Such products form a cube complex; for trees and n <= 2 it is a deformation
retract of the configuration space once every edge is subdivided.
Homology is computed with boundary-matrix ranks over a prime field.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from .geometry import GeometricTree, InvalidInputError

PRIME = 2_147_483_647

Cell = tuple  # ("v", name) or ("e", u, w) with the edge oriented u -> w


def _cells(X: GeometricTree) -> list[Cell]:
    return [("v", v) for v in X.vertices] + [("e", u, w) for u, w in X.edges]


def _closure(c: Cell) -> frozenset:
    return frozenset(c[1:])


def _dim(c: Cell) -> int:
    return 0 if c[0] == "v" else 1


def _boundary(c: Cell) -> list[tuple[int, Cell]]:
    if c[0] == "v":
        return []
    return [(1, ("v", c[2])), (-1, ("v", c[1]))]


def conf_cells(X: GeometricTree, n: int) -> dict[int, list[tuple[Cell, ...]]]:
    """Product cells of the discrete model grouped by dimension."""
    cells = _cells(X)
    out: dict[int, list] = {k: [] for k in range(n + 1)}
    for combo in itertools.product(cells, repeat=n):
        closures = [_closure(c) for c in combo]
        if all(closures[a].isdisjoint(closures[b]) for a in range(n) for b in range(a + 1, n)):
            out[sum(_dim(c) for c in combo)].append(combo)
    return out


def _cube_boundary(cube: tuple[Cell, ...]) -> dict[tuple[Cell, ...], int]:
    out: dict = {}
    sign = 1
    for k, c in enumerate(cube):
        for s, face in _boundary(c):
            key = cube[:k] + (face,) + cube[k + 1 :]
            out[key] = out.get(key, 0) + sign * s
        if _dim(c):
            sign = -sign
    return out


def rank_mod_p(rows: Iterable[dict], p: int = PRIME) -> int:
    """Rank of a sparse matrix (rows as {column: entry}) over GF(p)."""
    pivots: dict = {}
    rank = 0
    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            col = min(row)
            if col not in pivots:
                inv = pow(row[col], p - 2, p)
                pivots[col] = {c: v * inv % p for c, v in row.items()}
                rank += 1
                break
            piv = pivots[col]
            factor = row[col]
            for c, v in piv.items():
                nv = (row.get(c, 0) - factor * v) % p
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return rank


def _boundary_rank(higher: list, lower: list) -> int:
    if not higher or not lower:
        return 0
    index = {cube: i for i, cube in enumerate(lower)}
    rows = ({index[f]: v for f, v in _cube_boundary(cube).items()} for cube in higher)
    return rank_mod_p(rows)


def discrete_conf_betti(X: GeometricTree, n_points: int, subdivide: int = 3) -> list[int]:
    """Betti numbers b_0..b_n of the discrete model of Conf_n(X)."""
    if n_points not in (1, 2):
        raise InvalidInputError("the discrete model is provided for one or two points")
    G = X.subdivide(subdivide) if X.lengths else X
    cells = conf_cells(G, n_points)
    ranks = [0] + [_boundary_rank(cells[k], cells[k - 1]) for k in range(1, n_points + 1)] + [0]
    return [len(cells[k]) - ranks[k] - ranks[k + 1] for k in range(n_points + 1)]


def discrete_conf2_betti1(X: GeometricTree, subdivide: int = 3) -> int:
    return discrete_conf_betti(X, 2, subdivide)[1]
