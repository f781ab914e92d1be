"""Exact geometry on metric trees.

Points and closed connected subsets of a geometric tree are stored with
rational coordinates.  Almost every query works the same way: the tree is
refined at the handful of points that matter, after which the subsets are
unions of whole vertices and edges of a small combinatorial tree.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

EdgeKey = tuple[str, str]


class InvalidInputError(ValueError):
    """Raised when an argument violates the documented preconditions."""


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions, ``"3/2"``-style strings and decimal strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInputError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # str() gives the shortest decimal that round-trips, which is what the user typed
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"not a rational number: {value!r}") from exc
    raise InvalidInputError(f"not a number: {value!r}")


@dataclass(frozen=True)
class TreePoint:
    """A point of a geometric tree.

    A point sitting on a vertex is always stored as ``TreePoint(vertex=name)``;
    interior points carry an edge key and a parameter strictly inside (0, 1).
    Build points through :meth:`GeometricTree.point` / :meth:`GeometricTree.at`
    so that the normal form is respected.
    """

    vertex: str | None = None
    edge: EdgeKey | None = None
    t: Fraction = Fraction(0)

    @property
    def key(self) -> tuple:
        if self.vertex is not None:
            return (0, self.vertex, "", Fraction(0))
        return (1, self.edge[0], self.edge[1], self.t)

    def __lt__(self, other: "TreePoint") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        if self.vertex is not None:
            return f"@{self.vertex}"
        return f"@{self.edge[0]}-{self.edge[1]}:{self.t}"


class GeometricTree:
    """A finite tree with positive rational edge lengths.

    Edges are keyed by the vertex pair in the orientation they were given;
    parameter 0 is the first vertex and 1 the second.
    """

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str, object]]):
        self.vertices: tuple[str, ...] = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInputError("duplicate vertex names")
        if not self.vertices:
            raise InvalidInputError("a geometric tree needs at least one vertex")
        vset = set(self.vertices)
        self.lengths: dict[EdgeKey, Fraction] = {}
        self._key: dict[frozenset, EdgeKey] = {}
        self._adj: dict[str, list[tuple[str, EdgeKey]]] = {v: [] for v in self.vertices}
        for u, v, length in edges:
            u, v = str(u), str(v)
            if u not in vset or v not in vset:
                raise InvalidInputError(f"edge {u}-{v} uses an unknown vertex")
            if u == v:
                raise InvalidInputError(f"self-loop at {u}")
            pair = frozenset((u, v))
            if pair in self._key:
                raise InvalidInputError(f"parallel edge {u}-{v}")
            length = as_fraction(length)
            if length <= 0:
                raise InvalidInputError(f"edge {u}-{v} has non-positive length {length}")
            self._key[pair] = (u, v)
            self.lengths[(u, v)] = length
            self._adj[u].append((v, (u, v)))
            self._adj[v].append((u, (u, v)))
        if len(self.lengths) != len(self.vertices) - 1:
            raise InvalidInputError("edge count must be vertex count - 1")
        self._vdist: dict[str, dict[str, Fraction]] = {}
        self._vparent: dict[str, dict[str, str | None]] = {}
        for root in self.vertices:
            dist, parent = {root: Fraction(0)}, {root: None}
            queue = deque([root])
            while queue:
                a = queue.popleft()
                for b, e in self._adj[a]:
                    if b not in dist:
                        dist[b] = dist[a] + self.lengths[e]
                        parent[b] = a
                        queue.append(b)
            if len(dist) != len(self.vertices):
                raise InvalidInputError("tree is not connected")
            self._vdist[root] = dist
            self._vparent[root] = parent

    # -- combinatorics -------------------------------------------------
    @property
    def edges(self) -> tuple[EdgeKey, ...]:
        return tuple(self.lengths)

    def edge_key(self, u: str, v: str) -> EdgeKey:
        try:
            return self._key[frozenset((u, v))]
        except KeyError:
            raise InvalidInputError(f"no edge between {u} and {v}") from None

    def resolve_edge(self, name: str | Sequence[str]) -> tuple[EdgeKey, bool]:
        """Look up an edge written as ``"u-v"`` or a pair; returns (key, flipped)."""
        if isinstance(name, str):
            for key in self.lengths:
                if name == f"{key[0]}-{key[1]}":
                    return key, False
                if name == f"{key[1]}-{key[0]}":
                    return key, True
            raise InvalidInputError(f"unknown edge {name!r}")
        u, v = name
        key = self.edge_key(u, v)
        return key, key != (u, v)

    def neighbors(self, v: str) -> list[tuple[str, EdgeKey]]:
        return list(self._adj[v])

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def leaves(self) -> list[str]:
        return [v for v in self.vertices if self.degree(v) == 1]

    def branch_points(self) -> list[str]:
        return [v for v in self.vertices if self.degree(v) >= 3]

    def has_branch_point(self) -> bool:
        return any(self.degree(v) >= 3 for v in self.vertices)

    def vertex_distance(self, a: str, b: str) -> Fraction:
        return self._vdist[a][b]

    def vertex_path(self, a: str, b: str) -> list[str]:
        """Vertices on the path from ``a`` to ``b`` inclusive."""
        parent = self._vparent[b]
        out = [a]
        while out[-1] != b:
            out.append(parent[out[-1]])
        return out

    def total_length(self) -> Fraction:
        return sum(self.lengths.values(), Fraction(0))

    # -- points --------------------------------------------------------
    def at(self, vertex: str) -> TreePoint:
        if vertex not in self._adj:
            raise InvalidInputError(f"unknown vertex {vertex!r}")
        return TreePoint(vertex=vertex)

    def point(self, edge: str | Sequence[str], t) -> TreePoint:
        key, flipped = self.resolve_edge(edge)
        t = as_fraction(t)
        if flipped:
            t = 1 - t
        if not 0 <= t <= 1:
            raise InvalidInputError(f"edge parameter {t} outside [0, 1]")
        if t == 0:
            return TreePoint(vertex=key[0])
        if t == 1:
            return TreePoint(vertex=key[1])
        return TreePoint(edge=key, t=t)

    def point_from_vertex(self, vertex: str, edge: EdgeKey, dist: Fraction) -> TreePoint:
        """Point on ``edge`` at arc length ``dist`` from its endpoint ``vertex``."""
        length = self.lengths[edge]
        frac = dist / length
        return self.point(edge, frac if edge[0] == vertex else 1 - frac)

    def anchors(self, p: TreePoint) -> list[tuple[str, Fraction]]:
        """Vertices bounding the cell of ``p`` with the distance to each."""
        if p.vertex is not None:
            return [(p.vertex, Fraction(0))]
        length = self.lengths[p.edge]
        return [(p.edge[0], p.t * length), (p.edge[1], (1 - p.t) * length)]

    def distance(self, p: TreePoint, q: TreePoint) -> Fraction:
        if p.edge is not None and p.edge == q.edge:
            return abs(p.t - q.t) * self.lengths[p.edge]
        return min(
            dp + self._vdist[a][b] + dq
            for a, dp in self.anchors(p)
            for b, dq in self.anchors(q)
        )

    def path_points(self, p: TreePoint, q: TreePoint) -> list[TreePoint]:
        """The geodesic from ``p`` to ``q`` as a polyline through tree vertices."""
        if p == q:
            return [p]
        if p.edge is not None and p.edge == q.edge:
            return [p, q]
        best = min(
            ((dp + self._vdist[a][b] + dq, a, b) for a, dp in self.anchors(p) for b, dq in self.anchors(q)),
            key=lambda item: item[0],
        )
        _, a, b = best
        out = [p]
        for w in self.vertex_path(a, b):
            pt = TreePoint(vertex=w)
            if pt != out[-1]:
                out.append(pt)
        if q != out[-1]:
            out.append(q)
        return out

    def subdivide(self, k: int) -> "GeometricTree":
        """Copy of the tree with every edge cut into ``k`` equal pieces."""
        if k < 1:
            raise InvalidInputError("subdivision factor must be positive")
        vertices = list(self.vertices)
        edges = []
        for (u, v), length in self.lengths.items():
            chain = [u] + [f"{u}~{v}~{i}" for i in range(1, k)] + [v]
            vertices.extend(chain[1:-1])
            for a, b in zip(chain, chain[1:]):
                edges.append((a, b, length / k))
        return GeometricTree(vertices, edges)

    def __repr__(self) -> str:
        return f"GeometricTree({len(self.vertices)} vertices)"


# -- refinement ---------------------------------------------------------


class Refinement:
    """Combinatorial tree obtained by cutting ``tree`` at extra points.

    Nodes are tree points; each refined edge remembers the original edge and
    the parameter range it covers.
    """

    def __init__(self, tree: GeometricTree, points: Iterable[TreePoint]):
        self.tree = tree
        cuts: dict[EdgeKey, set[Fraction]] = defaultdict(set)
        for p in points:
            if p.vertex is None:
                cuts[p.edge].add(p.t)
        self.nodes: list[TreePoint] = [TreePoint(vertex=v) for v in tree.vertices]
        self.index: dict[TreePoint, int] = {p: i for i, p in enumerate(self.nodes)}
        self.adj: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        # segment: (a, b, edge key, t0, t1) with node a at t0 and b at t1
        self.segments: list[tuple[int, int, EdgeKey, Fraction, Fraction]] = []
        for key, length in tree.lengths.items():
            ts = sorted(cuts.get(key, ()))
            chain = [self.index[TreePoint(vertex=key[0])]]
            params = [Fraction(0)]
            for t in ts:
                pt = TreePoint(edge=key, t=t)
                self.index[pt] = len(self.nodes)
                self.nodes.append(pt)
                self.adj.append([])
                chain.append(self.index[pt])
                params.append(t)
            chain.append(self.index[TreePoint(vertex=key[1])])
            params.append(Fraction(1))
            for i in range(len(chain) - 1):
                s = len(self.segments)
                self.segments.append((chain[i], chain[i + 1], key, params[i], params[i + 1]))
                self.adj[chain[i]].append((chain[i + 1], s))
                self.adj[chain[i + 1]].append((chain[i], s))

    def seg_length(self, s: int) -> Fraction:
        a, b, key, t0, t1 = self.segments[s]
        return (t1 - t0) * self.tree.lengths[key]

    def seg_midpoint(self, s: int) -> TreePoint:
        _, _, key, t0, t1 = self.segments[s]
        return TreePoint(edge=key, t=(t0 + t1) / 2)

    def node_path(self, a: int, b: int) -> list[int]:
        parent = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for y, _ in self.adj[x]:
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        out = [b]
        while out[-1] != a:
            out.append(parent[out[-1]])
        return out[::-1]

    def steiner(self, marked: set[int]) -> set[int]:
        """Nodes of the smallest subtree containing ``marked``."""
        if len(marked) <= 1:
            return set(marked)
        alive = set(range(len(self.nodes)))
        deg = [len(nb) for nb in self.adj]
        stack = [i for i in alive if deg[i] <= 1 and i not in marked]
        while stack:
            i = stack.pop()
            if i not in alive:
                continue
            alive.discard(i)
            for j, _ in self.adj[i]:
                if j in alive:
                    deg[j] -= 1
                    if deg[j] == 1 and j not in marked:
                        stack.append(j)
        return alive

    def induced_segments(self, nodes: set[int]) -> list[int]:
        return [s for s, (a, b, *_rest) in enumerate(self.segments) if a in nodes and b in nodes]

    def members(self, subset: "TreeSubset") -> tuple[set[int], list[int]]:
        """Nodes and segments of this refinement lying in ``subset``.

        The refinement must contain every endpoint of ``subset``.
        """
        nodes = {i for i, p in enumerate(self.nodes) if subset.contains(p)}
        segs = [
            s
            for s, (a, b, *_rest) in enumerate(self.segments)
            if a in nodes and b in nodes and subset.contains(self.seg_midpoint(s))
        ]
        return nodes, segs

    def subset(self, nodes: Iterable[int], segs: Iterable[int] | None = None) -> "TreeSubset":
        nodes = set(nodes)
        if segs is None:
            segs = self.induced_segments(nodes)
        vertices = [self.nodes[i].vertex for i in nodes if self.nodes[i].vertex is not None]
        pieces = [(key, t0, t1) for s in segs for (_, _, key, t0, t1) in [self.segments[s]]]
        pieces += [(p.edge, p.t, p.t) for i in nodes for p in [self.nodes[i]] if p.vertex is None]
        return TreeSubset.build(self.tree, vertices, pieces, check=False)


# -- subsets ------------------------------------------------------------


def _merge_intervals(intervals: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    out: list[list[Fraction]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


@dataclass(frozen=True)
class TreeSubset:
    """A closed subset of a geometric tree given edge by edge.

    ``intervals`` maps an edge key to sorted, disjoint closed parameter
    intervals strictly needed to describe the set (pure vertex membership is
    recorded in ``vertices``).  Subsets built with ``check=True`` are verified
    to be nonempty and connected.
    """

    tree: GeometricTree = field(compare=False, repr=False)
    vertices: frozenset[str]
    intervals: tuple[tuple[EdgeKey, tuple[tuple[Fraction, Fraction], ...]], ...]

    @classmethod
    def build(
        cls,
        tree: GeometricTree,
        vertices: Iterable[str] = (),
        pieces: Iterable[tuple[EdgeKey, Fraction, Fraction]] = (),
        *,
        check: bool = True,
    ) -> "TreeSubset":
        vset = set(vertices)
        per_edge: dict[EdgeKey, list[tuple[Fraction, Fraction]]] = defaultdict(list)
        for key, a, b in pieces:
            a, b = as_fraction(a), as_fraction(b)
            if a > b:
                a, b = b, a
            if not (0 <= a and b <= 1):
                raise InvalidInputError(f"interval [{a}, {b}] outside [0, 1] on edge {key}")
            if a == 0:
                vset.add(key[0])
            if b == 1:
                vset.add(key[1])
            if a == b and a in (0, 1):
                continue
            per_edge[key].append((a, b))
        intervals = tuple(sorted((k, _merge_intervals(v)) for k, v in per_edge.items()))
        out = cls(tree, frozenset(vset), intervals)
        if check:
            if out.is_empty():
                raise InvalidInputError("subset is empty")
            if not out.is_connected():
                raise InvalidInputError("subset is not connected")
        return out

    @classmethod
    def of_point(cls, tree: GeometricTree, p: TreePoint) -> "TreeSubset":
        if p.vertex is not None:
            return cls(tree, frozenset((p.vertex,)), ())
        return cls(tree, frozenset(), ((p.edge, ((p.t, p.t),)),))

    @classmethod
    def whole(cls, tree: GeometricTree) -> "TreeSubset":
        return cls.build(tree, tree.vertices, [(k, 0, 1) for k in tree.lengths], check=False)

    def is_empty(self) -> bool:
        return not self.vertices and not self.intervals

    def contains(self, p: TreePoint) -> bool:
        if p.vertex is not None:
            return p.vertex in self.vertices
        for key, ivs in self.intervals:
            if key == p.edge:
                return any(a <= p.t <= b for a, b in ivs)
        return False

    def points(self) -> list[TreePoint]:
        """Vertices and interval endpoints; enough to refine the tree around this set."""
        pts = {TreePoint(vertex=v) for v in self.vertices}
        for key, ivs in self.intervals:
            for a, b in ivs:
                for t in (a, b):
                    pts.add(self.tree.point(key, t))
        return sorted(pts)

    def is_single_point(self) -> bool:
        return len(self.points()) == 1

    def is_connected(self) -> bool:
        ref = Refinement(self.tree, self.points())
        nodes, segs = ref.members(self)
        if not nodes:
            return False
        parent = {i: i for i in nodes}

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for s in segs:
            a, b = ref.segments[s][:2]
            parent[find(a)] = find(b)
        return len({find(i) for i in nodes}) == 1

    def length(self) -> Fraction:
        return sum(
            ((b - a) * self.tree.lengths[key] for key, ivs in self.intervals for a, b in ivs),
            Fraction(0),
        )

    def issubset(self, other: "TreeSubset") -> bool:
        ref = Refinement(self.tree, self.points() + other.points())
        n1, s1 = ref.members(self)
        n2, s2 = ref.members(other)
        return n1 <= n2 and set(s1) <= set(s2)

    def __repr__(self) -> str:
        parts = sorted(self.vertices)
        for key, ivs in self.intervals:
            parts.extend(f"{key[0]}-{key[1]}[{a},{b}]" for a, b in ivs)
        return "TreeSubset{" + ", ".join(parts) + "}"


def _as_subset(tree: GeometricTree, obj) -> TreeSubset:
    if isinstance(obj, TreeSubset):
        return obj
    if isinstance(obj, TreePoint):
        return TreeSubset.of_point(tree, obj)
    raise TypeError(f"expected TreeSubset or TreePoint, got {type(obj).__name__}")


# -- operations ---------------------------------------------------------


def bridge(tree: GeometricTree, A, B) -> list[TreePoint]:
    """Polyline of the shortest path from ``A`` to ``B``.

    The first point lies in ``A`` and the last in ``B``; if the sets meet, a
    single common point is returned.
    """
    A, B = _as_subset(tree, A), _as_subset(tree, B)
    ref = Refinement(tree, A.points() + B.points())
    na, _ = ref.members(A)
    nb, _ = ref.members(B)
    if not na or not nb:
        raise InvalidInputError("shortest path needs nonempty subsets")
    common = na & nb
    if common:
        return [min((ref.nodes[i] for i in common), key=lambda p: p.key)]
    route = ref.node_path(min(na), min(nb))
    last_a = max(k for k, i in enumerate(route) if i in na)
    first_b = min(k for k, i in enumerate(route) if i in nb)
    if first_b < last_a:
        raise InvalidInputError("subsets are not connected")
    return [ref.nodes[i] for i in route[last_a:first_b + 1]]


def shortest_path(tree: GeometricTree, A, B) -> TreeSubset:
    """The unique arc joining ``A`` and ``B`` (a single point if they meet)."""
    A, B = _as_subset(tree, A), _as_subset(tree, B)
    for S in (A, B):
        if not S.is_connected():
            raise InvalidInputError("shortest_path needs connected subsets")
    return polyline_subset(tree, bridge(tree, A, B))


def polyline_subset(tree: GeometricTree, pts: Sequence[TreePoint]) -> TreeSubset:
    if len(pts) == 1:
        return TreeSubset.of_point(tree, pts[0])
    ref = Refinement(tree, pts)
    nodes: set[int] = set()
    for p, q in zip(pts, pts[1:]):
        nodes.update(ref.node_path(ref.index[p], ref.index[q]))
    return ref.subset(nodes)


def convex_hull(tree: GeometricTree, members: Sequence) -> TreeSubset:
    """Smallest closed connected subset containing every member."""
    members = [_as_subset(tree, m) for m in members]
    if not members:
        raise InvalidInputError("convex hull of an empty collection")
    pts = [p for m in members for p in m.points()]
    ref = Refinement(tree, pts)
    marked = {ref.index[p] for p in pts}
    return ref.subset(ref.steiner(marked))


def project(tree: GeometricTree, p: TreePoint, A) -> TreePoint:
    """Closest point of ``A`` to ``p``."""
    A = _as_subset(tree, A)
    if A.contains(p):
        return p
    return bridge(tree, A, p)[0]


def distance(tree: GeometricTree, p: TreePoint, q: TreePoint) -> Fraction:
    return tree.distance(p, q)


def distance_to_set(tree: GeometricTree, p: TreePoint, A) -> Fraction:
    return tree.distance(p, project(tree, p, A))


def diameter(tree: GeometricTree, A) -> Fraction:
    A = _as_subset(tree, A)
    pts = A.points()
    return max((tree.distance(p, q) for p in pts for q in pts), default=Fraction(0))


def subsets_disjoint(A: TreeSubset, B: TreeSubset) -> bool:
    ref = Refinement(A.tree, A.points() + B.points())
    na, _ = ref.members(A)
    nb, _ = ref.members(B)
    return not (na & nb)


def on_path(tree: GeometricTree, r: TreePoint, p: TreePoint, q: TreePoint) -> bool:
    return tree.distance(p, r) + tree.distance(r, q) == tree.distance(p, q)


class Arc:
    """An oriented embedded path in the tree with an arc-length coordinate.

    Coordinate 0 is ``start`` and ``length`` is ``end``.
    """

    def __init__(self, tree: GeometricTree, start: TreePoint, end: TreePoint):
        if start == end:
            raise InvalidInputError("an arc needs distinct endpoints")
        self.tree = tree
        self.start, self.end = start, end
        self.polyline = tree.path_points(start, end)
        self.offsets = [Fraction(0)]
        for a, b in zip(self.polyline, self.polyline[1:]):
            self.offsets.append(self.offsets[-1] + tree.distance(a, b))
        self.length = self.offsets[-1]

    def __eq__(self, other):
        return isinstance(other, Arc) and (self.start, self.end) == (other.start, other.end)

    def __hash__(self):
        return hash((self.start, self.end))

    def __repr__(self):
        return f"Arc({self.start!r} -> {self.end!r})"

    def _piece(self, k: int) -> tuple[EdgeKey, Fraction, Fraction]:
        """Edge key and parameters at both ends of polyline piece ``k``."""
        a, b = self.polyline[k], self.polyline[k + 1]
        if a.edge is not None:
            key = a.edge
        elif b.edge is not None:
            key = b.edge
        else:
            key = self.tree.edge_key(a.vertex, b.vertex)

        def param(p):
            if p.vertex is not None:
                return Fraction(0) if p.vertex == key[0] else Fraction(1)
            return p.t

        return key, param(a), param(b)

    def point_at(self, s) -> TreePoint:
        s = as_fraction(s)
        if not 0 <= s <= self.length:
            raise InvalidInputError(f"arc coordinate {s} outside [0, {self.length}]")
        for k in range(len(self.polyline) - 1):
            lo, hi = self.offsets[k], self.offsets[k + 1]
            if s <= hi:
                key, ta, tb = self._piece(k)
                frac = (s - lo) / (hi - lo)
                return self.tree.point(key, ta + (tb - ta) * frac)
        return self.end

    def coordinate(self, p: TreePoint) -> Fraction | None:
        """Arc coordinate of ``p``, or None when ``p`` is off the arc."""
        d0 = self.tree.distance(self.start, p)
        if d0 + self.tree.distance(p, self.end) != self.length:
            return None
        return d0

    def vertex_coordinates(self) -> list[Fraction]:
        return [off for p, off in zip(self.polyline, self.offsets) if p.vertex is not None]

    def reversed(self) -> "Arc":
        return Arc(self.tree, self.end, self.start)
