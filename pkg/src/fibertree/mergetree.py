"""Cellular merge trees: construction from PL functions, isomorphism,
induced matrices, barcodes and labelled matrix distances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .geometry import InvalidInputError
from .plfunc import LocalMinimum, PLFunction, _UnionFind, local_minima, refined_values


class AmbiguousElderRuleError(ValueError):
    """Two branches with equal birth meet; the elder rule cannot pick a survivor."""


@dataclass(frozen=True)
class CellularMergeTree:
    """Rooted tree with node heights; the root carries the infinite ray.

    ``leaves`` fixes the labelling l_1..l_n.  Heights strictly increase
    towards the root.
    """

    height: Mapping[str, Fraction]
    parent: Mapping[str, str | None]
    leaves: tuple[str, ...]

    def __post_init__(self):
        if set(self.height) != set(self.parent):
            raise InvalidInputError("height and parent maps cover different nodes")
        roots = [v for v, p in self.parent.items() if p is None]
        if len(roots) != 1:
            raise InvalidInputError(f"merge tree needs exactly one root, found {len(roots)}")
        for v, p in self.parent.items():
            if p is not None:
                if p not in self.height:
                    raise InvalidInputError(f"parent {p!r} of {v!r} is not a node")
                if not self.height[p] > self.height[v]:
                    raise InvalidInputError(f"height must increase from {v!r} to its parent {p!r}")
        childless = {v for v in self.height if v not in set(self.parent.values())}
        if set(self.leaves) != childless or len(self.leaves) != len(childless):
            raise InvalidInputError("leaf labelling must list every childless node exactly once")
        # cycle check: every node reaches the root
        for v in self.height:
            seen = set()
            while v is not None:
                if v in seen:
                    raise InvalidInputError("parent map has a cycle")
                seen.add(v)
                v = self.parent[v]

    @classmethod
    def from_parents(cls, height: Mapping, parent: Mapping, leaves: Sequence[str] | None = None) -> "CellularMergeTree":
        height = {str(k): Fraction(v) for k, v in height.items()}
        parent = {str(k): (None if v is None else str(v)) for k, v in parent.items()}
        if leaves is None:
            used = set(parent.values())
            leaves = sorted((v for v in height if v not in used), key=lambda v: (height[v], v))
        return cls(height, parent, tuple(leaves))

    def __hash__(self):
        return hash(self.canonical_form())

    def __eq__(self, other):
        # labelled equality; use is_isomorphic for the gauged notion
        return (
            isinstance(other, CellularMergeTree)
            and dict(self.height) == dict(other.height)
            and dict(self.parent) == dict(other.parent)
            and self.leaves == other.leaves
        )

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.height}
        for v, p in self.parent.items():
            if p is not None:
                out[p].append(v)
        return {v: tuple(sorted(c)) for v, c in out.items()}

    @cached_property
    def root(self) -> str:
        return next(v for v, p in self.parent.items() if p is None)

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @cached_property
    def internal_nodes(self) -> tuple[str, ...]:
        """Non-leaf nodes, lowest first."""
        return tuple(sorted((v for v in self.height if self.children[v]), key=lambda v: (self.height[v], v)))

    def ancestors(self, v: str) -> list[str]:
        """``v`` followed by its ancestors up to the root."""
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def is_descendant(self, v: str, w: str) -> bool:
        """``v`` precedes ``w`` in the descendant order (v may equal w)."""
        return w in self.ancestors(v)

    def comparable(self, v: str, w: str) -> bool:
        return self.is_descendant(v, w) or self.is_descendant(w, v)

    @cached_property
    def _leaf_sets(self) -> dict[str, frozenset[int]]:
        out: dict[str, set[int]] = {v: set() for v in self.height}
        for i, leaf in enumerate(self.leaves):
            for a in self.ancestors(leaf):
                out[a].add(i)
        return {v: frozenset(s) for v, s in out.items()}

    def leaf_indices(self, v: str) -> frozenset[int]:
        """Indices (into ``leaves``) of the leaves below ``v``."""
        return self._leaf_sets[v]

    def lca(self, a: str, b: str) -> str:
        up = set(self.ancestors(a))
        return next(v for v in self.ancestors(b) if v in up)

    def shifted(self, eps) -> "CellularMergeTree":
        eps = Fraction(eps)
        return CellularMergeTree({v: h + eps for v, h in self.height.items()}, dict(self.parent), self.leaves)

    def relabelled(self, leaves: Sequence[str]) -> "CellularMergeTree":
        return CellularMergeTree(dict(self.height), dict(self.parent), tuple(leaves))

    def canonical_form(self):
        return canonical_form(self)

    def __repr__(self) -> str:
        return f"CellularMergeTree({_render(self, self.root)})"


def _render(T: CellularMergeTree, v: str) -> str:
    kids = T.children[v]
    if not kids:
        return f"{v}:{T.height[v]}"
    return f"{v}:{T.height[v]}(" + ", ".join(_render(T, c) for c in kids) + ")"


@dataclass(frozen=True)
class InducedMatrix:
    labels: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def size(self) -> int:
        return len(self.labels)


# -- construction -------------------------------------------------------


def tree_from_matrix(heights: Sequence[Fraction], merge: Sequence[Sequence[Fraction]]) -> CellularMergeTree:
    """Glue rays ``[heights[i], inf)`` together at the pairwise merge heights.

    ``merge`` must be an ultrametric-style matrix: M_ij <= max(M_ik, M_kj).
    Leaves are named ``l1..ln`` in input order and internal nodes ``v1..``
    from the lowest merge upwards.
    """
    n = len(heights)
    height: dict[str, Fraction] = {}
    parent: dict[str, str | None] = {}
    top = {}
    for i in range(n):
        name = f"l{i + 1}"
        height[name] = Fraction(heights[i])
        parent[name] = None
        top[i] = name
    uf = _UnionFind(range(n))
    levels = sorted({merge[i][j] for i in range(n) for j in range(i + 1, n)})
    counter = 0
    for t in levels:
        before = {i: uf.find(i) for i in range(n)}
        for i in range(n):
            for j in range(i + 1, n):
                if merge[i][j] == t:
                    uf.union(i, j)
        groups: dict[int, set[int]] = {}
        for i in range(n):
            groups.setdefault(uf.find(i), set()).add(before[i])
        for new_root, old_roots in sorted(groups.items()):
            if len(old_roots) < 2:
                continue
            counter += 1
            name = f"v{counter}"
            height[name] = Fraction(t)
            parent[name] = None
            for r in old_roots:
                parent[top[r]] = name
            top[new_root] = name
            for r in old_roots:
                if r != new_root:
                    top.pop(r, None)
    return CellularMergeTree(height, parent, tuple(f"l{i + 1}" for i in range(n)))


def merge_heights(f: PLFunction, minima: Sequence[LocalMinimum]) -> list[list[Fraction]]:
    """Pairwise merge heights t_ij of the given minima: the maximum of ``f``
    along the shortest path between the two minimum regions.

    Both regions are plateaus at their own (lower) values, so the maximum
    over any refined node path from one region to the other equals the
    maximum over the bridge between them.
    """
    n = len(minima)
    ref, val = refined_values(f, [p for m in minima for p in m.region.points()])
    anchor = [ref.index[m.region.points()[0]] for m in minima]
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = minima[i].value
        for j in range(i + 1, n):
            M[i][j] = M[j][i] = max(val[k] for k in ref.node_path(anchor[i], anchor[j]))
    return M


def compute_merge_tree(f: PLFunction) -> tuple[CellularMergeTree, dict[str, LocalMinimum]]:
    """Cellular merge tree of ``f`` and the minimum region behind each leaf."""
    minima = local_minima(f)
    M = merge_heights(f, minima)
    T = tree_from_matrix([m.value for m in minima], M)
    return T, {leaf: m for leaf, m in zip(T.leaves, minima)}


def merge_tree(f: PLFunction) -> CellularMergeTree:
    return compute_merge_tree(f)[0]


def induced_matrix(T: CellularMergeTree, labelling: Sequence[str] | Sequence[int] | None = None) -> InducedMatrix:
    """Matrix of LCA heights; ``labelling`` may repeat leaves.

    Integer labels index into ``T.leaves``.
    """
    if labelling is None:
        labelling = T.leaves
    labels = []
    for lab in labelling:
        if isinstance(lab, int):
            if not 0 <= lab < T.n_leaves:
                raise InvalidInputError(f"label index {lab} out of range")
            lab = T.leaves[lab]
        if lab not in T.leaves:
            raise InvalidInputError(f"{lab!r} is not a leaf")
        labels.append(lab)
    rows = tuple(tuple(T.height[T.lca(a, b)] for b in labels) for a in labels)
    return InducedMatrix(tuple(labels), rows)


# -- isomorphism ---------------------------------------------------------


def canonical_form(T: CellularMergeTree):
    """Nested tuple ``(height, sorted child encodings)``; equal iff isomorphic."""

    def enc(v):
        return (T.height[v], tuple(sorted(enc(c) for c in T.children[v])))

    return enc(T.root)


def is_isomorphic(T1: CellularMergeTree, T2: CellularMergeTree) -> bool:
    return canonical_form(T1) == canonical_form(T2)


def is_generic(T: CellularMergeTree) -> bool:
    if any(len(c) not in (0, 2) for c in T.children.values()):
        return False
    hs = list(T.height.values())
    return len(set(hs)) == len(hs)


# -- barcodes -----------------------------------------------------------


def barcode_intervals(T: CellularMergeTree) -> list[tuple[Fraction, Fraction | float]]:
    """Elder-rule pairing: at every merge the youngest branches die."""
    bars: list[tuple[Fraction, Fraction | float]] = []

    def oldest(v):
        kids = T.children[v]
        if not kids:
            return T.height[v]
        births = sorted(oldest(c) for c in kids)
        if births[0] == births[1]:
            raise AmbiguousElderRuleError(f"branches born at {births[0]} meet at node {v!r}")
        bars.extend((b, T.height[v]) for b in births[1:])
        return births[0]

    bars.append((oldest(T.root), math.inf))
    return sorted(bars)


# -- distances ----------------------------------------------------------


def matrix_distance(T1: CellularMergeTree, T2: CellularMergeTree, labelling1, labelling2) -> Fraction:
    """Entrywise sup-deviation of the induced matrices under the given labellings."""
    M1, M2 = induced_matrix(T1, labelling1), induced_matrix(T2, labelling2)
    if M1.size != M2.size:
        raise InvalidInputError("labellings must have the same length")
    return max(abs(a - b) for r1, r2 in zip(M1.entries, M2.entries) for a, b in zip(r1, r2))


def entrywise_min_deviation(T1: CellularMergeTree, T2: CellularMergeTree, labelling1, labelling2) -> Fraction:
    """min_{i,j} |M1_ij - M2_ij| -- the literal min-over-entries reading; degenerate
    as a distance and kept only for comparison."""
    M1, M2 = induced_matrix(T1, labelling1), induced_matrix(T2, labelling2)
    if M1.size != M2.size:
        raise InvalidInputError("labellings must have the same length")
    return min(abs(a - b) for r1, r2 in zip(M1.entries, M2.entries) for a, b in zip(r1, r2))


def _surjections(n_labels: int, length: int):
    for seq in itertools.product(range(n_labels), repeat=length):
        if len(set(seq)) == n_labels:
            yield seq


def matrix_distance_min_over_labelings(T1: CellularMergeTree, T2: CellularMergeTree, bound_n: int) -> Fraction:
    """Brute-force minimum of :func:`matrix_distance` over all pairs of
    labellings (with repetition) of a common length up to ``bound_n``."""
    n1, n2 = T1.n_leaves, T2.n_leaves
    if max(n1, n2) > bound_n:
        raise InvalidInputError(f"trees have more than bound_n={bound_n} leaves")
    if bound_n > 6:
        raise InvalidInputError("brute force limited to bound_n <= 6")
    best = None
    for length in range(max(n1, n2), bound_n + 1):
        # simultaneous permutations of indices do not change the value, so the
        # first labelling can be taken non-decreasing
        firsts = [s for s in _surjections(n1, length) if list(s) == sorted(s)]
        seconds = list(_surjections(n2, length))
        for a in firsts:
            for b in seconds:
                d = matrix_distance(T1, T2, a, b)
                if best is None or d < best:
                    best = d
                    if best == 0:
                        return best
    return best
