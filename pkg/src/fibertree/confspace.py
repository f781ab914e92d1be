"""The constrained configuration space Conf(X, T).

A configuration puts one point of the tree X at each leaf of a labelled
generic merge tree T.  It is admissible when the convex hulls of any two
incomparable nodes of T are disjoint.  Besides the membership test this
module builds explicit paths between admissible configurations out of two
kinds of elementary moves and audits them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

from .geometry import (
    Arc,
    EdgeKey,
    GeometricTree,
    InvalidInputError,
    Refinement,
    TreePoint,
    TreeSubset,
    bridge,
    convex_hull,
    subsets_disjoint,
)
from .mergetree import CellularMergeTree, is_generic

Configuration = tuple[TreePoint, ...]
Chirality = dict[str, tuple[str, str]]


class NoPathError(RuntimeError):
    """No path is produced (interval domain with mismatched chirality)."""


class MoveBudgetExceeded(RuntimeError):
    """A constructed path used more elementary moves than budgeted."""


@dataclass(frozen=True)
class Membership:
    ok: bool
    witness: tuple[str, str] | None = None

    def __bool__(self):
        return self.ok


def _check_shape(T: CellularMergeTree, x: Sequence[TreePoint]) -> None:
    if len(x) != T.n_leaves:
        raise InvalidInputError(f"configuration has {len(x)} points, tree has {T.n_leaves} leaves")
    if len(set(x)) != len(x):
        raise InvalidInputError("configuration points must be pairwise distinct")


def node_hull(X: GeometricTree, T: CellularMergeTree, x: Sequence[TreePoint], v: str) -> TreeSubset:
    return convex_hull(X, [x[i] for i in sorted(T.leaf_indices(v))])


def _first_violation(X: GeometricTree, T: CellularMergeTree, x: Sequence[TreePoint]) -> tuple[str, str] | None:
    # Incomparable nodes with meeting hulls force the two children of their
    # lowest common ancestor to meet as well, so sibling pairs suffice.
    ref = Refinement(X, x)
    hull = {leaf: {ref.index[x[i]]} for i, leaf in enumerate(T.leaves)}
    for v in T.internal_nodes:
        kids = T.children[v]
        for a in range(len(kids)):
            for b in range(a + 1, len(kids)):
                if hull[kids[a]] & hull[kids[b]]:
                    return kids[a], kids[b]
        hull[v] = ref.steiner(set().union(*(hull[c] for c in kids)))
    return None


def is_member(X: GeometricTree, T: CellularMergeTree, x: Sequence[TreePoint]) -> Membership:
    """Membership in Conf(X, T); on failure the witness is a pair of sibling
    nodes whose hulls meet."""
    _check_shape(T, x)
    bad = _first_violation(X, T, x)
    return Membership(bad is None, bad)


def is_member_bruteforce(X: GeometricTree, T: CellularMergeTree, x: Sequence[TreePoint]) -> bool:
    """Definition-level check over all incomparable node pairs."""
    _check_shape(T, x)
    nodes = list(T.height)
    hulls = {v: node_hull(X, T, x, v) for v in nodes}
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            v, w = nodes[a], nodes[b]
            if not T.comparable(v, w) and not subsets_disjoint(hulls[v], hulls[w]):
                return False
    return True


# -- chirality ----------------------------------------------------------


def arc_coordinates(arc: Arc, x: Sequence[TreePoint]) -> list[Fraction]:
    coords = [arc.coordinate(p) for p in x]
    if any(c is None for c in coords):
        raise InvalidInputError("not every point lies on the arc")
    return coords


def h_permutation(arc: Arc, x: Sequence[TreePoint]) -> tuple[int, ...]:
    coords = arc_coordinates(arc, x)
    return tuple(sorted(range(len(x)), key=lambda i: coords[i]))


def chiral_structure(X: GeometricTree, T: CellularMergeTree, x: Sequence[TreePoint], arc: Arc) -> Chirality:
    """Left/right children induced by the order of the points along ``arc``."""
    if not is_generic(T):
        raise InvalidInputError("chirality is defined for generic merge trees")
    coords = arc_coordinates(arc, x)
    check = is_member(X, T, x)
    if not check:
        raise InvalidInputError(f"configuration is not admissible: {check.witness}")
    rank = {i: r for r, i in enumerate(sorted(range(len(x)), key=lambda i: coords[i]))}
    out: Chirality = {}
    for v in T.internal_nodes:
        ranks = sorted(rank[i] for i in T.leaf_indices(v))
        if ranks[-1] - ranks[0] + 1 != len(ranks):
            raise AssertionError(f"leaves below {v} are not contiguous along the arc")
        a, b = T.children[v]
        if min(rank[i] for i in T.leaf_indices(a)) < min(rank[i] for i in T.leaf_indices(b)):
            out[v] = (a, b)
        else:
            out[v] = (b, a)
    return out


def leaf_order(T: CellularMergeTree, chirality: Mapping[str, tuple[str, str]]) -> tuple[int, ...]:
    """Leaf indices from left to right in a chiral merge tree."""
    out: list[int] = []

    def walk(v):
        if v in chirality:
            walk(chirality[v][0])
            walk(chirality[v][1])
        else:
            out.append(T.leaves.index(v))

    walk(T.root)
    return tuple(out)


# -- moves and paths ----------------------------------------------------


@dataclass(frozen=True)
class PointMove:
    """Point ``index`` travels along the geodesic from ``start`` to ``end``."""

    index: int
    start: TreePoint
    end: TreePoint

    def reversed(self) -> "PointMove":
        return PointMove(self.index, self.end, self.start)


@dataclass(frozen=True)
class LineMove:
    """All points sit on ``arc`` and slide linearly in its coordinate."""

    arc: Arc
    start: tuple[Fraction, ...]
    end: tuple[Fraction, ...]

    def reversed(self) -> "LineMove":
        return LineMove(self.arc, self.end, self.start)

    def at(self, t: Fraction) -> Configuration:
        return tuple(self.arc.point_at((1 - t) * a + t * b) for a, b in zip(self.start, self.end))


Move = Union[PointMove, LineMove]


def apply_move(x: Configuration, move: Move) -> Configuration:
    if isinstance(move, PointMove):
        if x[move.index] != move.start:
            raise InvalidInputError(f"move starts at {move.start!r} but point {move.index} is at {x[move.index]!r}")
        return x[: move.index] + (move.end,) + x[move.index + 1 :]
    if tuple(move.arc.coordinate(p) for p in x) != move.start:
        raise InvalidInputError("line move does not start at the current configuration")
    return move.at(Fraction(1))


@dataclass
class ConfigPath:
    start: Configuration
    moves: list[Move] = field(default_factory=list)

    @property
    def end(self) -> Configuration:
        x = self.start
        for m in self.moves:
            x = apply_move(x, m)
        return x

    def __len__(self):
        return len(self.moves)

    def waypoints(self) -> list[Configuration]:
        out = [self.start]
        for m in self.moves:
            out.append(apply_move(out[-1], m))
        return out

    def push(self, move: Move) -> Configuration:
        self.moves.append(move)
        return self.end

    def then(self, other: "ConfigPath") -> "ConfigPath":
        if tuple(self.end) != tuple(other.start):
            raise InvalidInputError("paths do not compose")
        return ConfigPath(self.start, self.moves + other.moves)

    def reversed(self) -> "ConfigPath":
        return ConfigPath(self.end, [m.reversed() for m in reversed(self.moves)])

    @property
    def point_moves(self) -> int:
        return sum(isinstance(m, PointMove) for m in self.moves)

    @property
    def line_moves(self) -> int:
        return sum(isinstance(m, LineMove) for m in self.moves)


def _sample_params(events: list[Fraction]) -> list[Fraction]:
    ev = sorted(set(events))
    mids = [(a + b) / 2 for a, b in zip(ev, ev[1:])]
    return sorted(ev + mids)


def move_samples(X: GeometricTree, x: Configuration, move: Move) -> Iterator[tuple[Fraction, Configuration]]:
    """``(fraction of the move, configuration)`` at every combinatorial event
    and between consecutive events.  Admissibility only changes at events,
    so checking these samples checks the whole move."""
    if isinstance(move, PointMove):
        if move.start == move.end:
            yield Fraction(0), x
            return
        route = Arc(X, move.start, move.end)
        events = [Fraction(0), route.length] + route.vertex_coordinates()
        for j, p in enumerate(x):
            if j != move.index:
                c = route.coordinate(p)
                if c is not None:
                    events.append(c)
        for s in _sample_params(events):
            p = route.point_at(s)
            yield s / route.length, x[: move.index] + (p,) + x[move.index + 1 :]
        return
    times = [Fraction(0), Fraction(1)]
    marks = move.arc.vertex_coordinates()
    for a, b in zip(move.start, move.end):
        if a != b:
            times += [(c - a) / (b - a) for c in marks if 0 <= (c - a) / (b - a) <= 1]
    for t in _sample_params(times):
        yield t, move.at(t)


@dataclass(frozen=True)
class AuditReport:
    ok: bool
    samples: int
    failure: str | None = None

    def __bool__(self):
        return self.ok


def audit_path(X: GeometricTree, T: CellularMergeTree, path: ConfigPath) -> AuditReport:
    """Check every sampled configuration of every move for distinct points and admissibility."""
    x = tuple(path.start)
    count = 0
    for k, move in enumerate(path.moves):
        try:
            nxt = apply_move(x, move)
        except InvalidInputError as exc:
            return AuditReport(False, count, f"move {k}: {exc}")
        if isinstance(move, LineMove):
            order0 = sorted(range(len(x)), key=lambda i: move.start[i])
            order1 = sorted(range(len(x)), key=lambda i: move.end[i])
            if order0 != order1:
                return AuditReport(False, count, f"move {k}: line move changes the order of points")
        for _, y in move_samples(X, x, move):
            count += 1
            if len(set(y)) != len(y):
                return AuditReport(False, count, f"move {k}: two points collide at {y!r}")
            bad = _first_violation(X, T, y)
            if bad is not None:
                return AuditReport(False, count, f"move {k}: hulls of {bad} meet at {y!r}")
        x = nxt
    return AuditReport(True, count)


# -- elementary constructions -------------------------------------------


def _eps0(X: GeometricTree) -> Fraction:
    return min(X.lengths.values()) / 2


def _off_vertex(X: GeometricTree, x: Sequence[TreePoint], i: int) -> TreePoint:
    """Short move of the point at a vertex into the interior of an incident edge."""
    w = x[i].vertex
    _, edge = min(X.neighbors(w))
    near = X.lengths[edge]
    for j, p in enumerate(x):
        if j != i and p.edge == edge:
            near = min(near, X.distance(X.at(w), p))
    return X.point_from_vertex(w, edge, min(_eps0(X), near / 2))


def gather_to_edge(X: GeometricTree, T: CellularMergeTree, x: Sequence[TreePoint]) -> tuple[ConfigPath, EdgeKey]:
    """Path to a configuration with every point inside one edge.

    Points on vertices are first nudged into edges.  Then, one point at a
    time, a point outside the chosen edge ``e`` is walked to the endpoint
    ``b`` of ``e`` and pushed just inside: the point is found by descending
    the hull tree from the lowest ancestor of the point of ``e`` nearest to
    ``b`` whose hull reaches ``b``, always towards a child whose access path
    avoids the sibling hull.
    """
    x = tuple(x)
    _check_shape(T, x)
    path = ConfigPath(x)
    if not X.lengths:
        return path, None
    cur = x
    for i in range(len(cur)):
        if cur[i].vertex is not None:
            cur = path.push(PointMove(i, cur[i], _off_vertex(X, cur, i)))
    e = cur[0].edge
    while True:
        on_e = [i for i, p in enumerate(cur) if p.edge == e]
        if len(on_e) == len(cur):
            return path, e
        u, w = e
        off = [i for i, p in enumerate(cur) if p.edge != e]
        b = u if any(X.distance(cur[i], X.at(u)) < X.distance(cur[i], X.at(w)) for i in off) else w
        pb = X.at(b)
        j = min(on_e, key=lambda i: X.distance(pb, cur[i]))
        v0 = next(a for a in T.ancestors(T.leaves[j])[1:] if node_hull(X, T, cur, a).contains(pb))
        node = next(c for c in T.children[v0] if j not in T.leaf_indices(c))
        z = pb
        while True:
            z = bridge(X, z, node_hull(X, T, cur, node))[-1]
            kids = T.children[node]
            if not kids:
                break
            for c in kids:
                sibling = next(s for s in kids if s != c)
                route = bridge(X, z, node_hull(X, T, cur, c))
                if subsets_disjoint(_polyline(X, route), node_hull(X, T, cur, sibling)):
                    node = c
                    break
            else:
                raise AssertionError("no child hull is reachable without crossing its sibling")
        i = T.leaves.index(node)
        if cur[i] != z:
            raise AssertionError("descent did not end at a configuration point")
        cur = path.push(PointMove(i, cur[i], pb))
        step = min(_eps0(X), X.distance(pb, cur[j]) / 2)
        cur = path.push(PointMove(i, pb, X.point_from_vertex(b, e, step)))


def _polyline(X: GeometricTree, pts: Sequence[TreePoint]) -> TreeSubset:
    from .geometry import polyline_subset

    return polyline_subset(X, pts)


def enclosing_arc(X: GeometricTree, pts: Sequence[TreePoint]) -> Arc:
    pts = sorted(set(pts))
    a = max(pts, key=lambda p: (X.distance(pts[0], p), p.key))
    b = max(pts, key=lambda p: (X.distance(a, p), p.key))
    arc = Arc(X, a, b)
    if any(arc.coordinate(p) is None for p in pts):
        raise InvalidInputError("points do not lie on a common arc")
    return arc


def line_travel(
    X: GeometricTree,
    T: CellularMergeTree,
    x: Sequence[TreePoint],
    y: Sequence[TreePoint],
    arc: Arc | None = None,
) -> ConfigPath:
    """Single simultaneous slide from ``x`` to ``y`` along a common arc."""
    x, y = tuple(x), tuple(y)
    _check_shape(T, x)
    _check_shape(T, y)
    path = ConfigPath(x)
    if x == y:
        return path
    if arc is None:
        arc = enclosing_arc(X, x + y)
    if h_permutation(arc, x) != h_permutation(arc, y):
        raise InvalidInputError("configurations have different orders along the arc")
    path.push(LineMove(arc, tuple(arc_coordinates(arc, x)), tuple(arc_coordinates(arc, y))))
    return path


@dataclass(frozen=True)
class Star:
    """A branch point with three incident edges; points live on ``arms[0]``."""

    center: str
    arms: tuple[EdgeKey, EdgeKey, EdgeKey]

    def far(self, arm: EdgeKey) -> str:
        return arm[1] if arm[0] == self.center else arm[0]

    def home_arc(self, X: GeometricTree) -> Arc:
        """The first arm oriented away from the center."""
        return Arc(X, X.at(self.center), X.at(self.far(self.arms[0])))


def choose_star(X: GeometricTree) -> Star:
    """A leaf edge whose inner end is a branch point, plus two more edges there.

    Falls back to the first branch point when every leaf edge ends in a
    degree-2 vertex.
    """
    candidates = []
    for leaf in sorted(X.leaves()):
        (b, edge), = X.neighbors(leaf)
        if X.degree(b) >= 3:
            candidates.append((b, edge))
    if candidates:
        b, home = candidates[0]
    else:
        branch = sorted(X.branch_points())
        if not branch:
            raise InvalidInputError("tree has no branch point")
        b = branch[0]
        home = min(X.neighbors(b))[1]
    others = sorted(e for _, e in X.neighbors(b) if e != home)[:2]
    return Star(b, (home, others[0], others[1]))


def star_reconfigure(
    X: GeometricTree,
    T: CellularMergeTree,
    x: Sequence[TreePoint],
    star: Star,
    target: Mapping[str, tuple[str, str]],
) -> ConfigPath:
    """Path from ``x`` (inside the first arm) to a configuration inside the
    same arm whose chirality, read from the center outwards, is ``target``.

    Each node whose children must be swapped takes one pass of five steps:
    park the first block in arm 2 with one slide, shuttle the right block
    into arm 3, bring the left block back, then the right block, then slide
    the parked prefix home.
    """
    x = tuple(x)
    _check_shape(T, x)
    home, arm2, arm3 = star.arms
    b = star.center
    pb = X.at(b)
    if any(p.edge != home for p in x):
        raise InvalidInputError("all points must lie inside the first arm")
    home_arc = star.home_arc(X)
    path = ConfigPath(x)
    cur = x

    def dist(p):
        return X.distance(pb, p)

    def arm_of(p):
        return p.edge

    def into(arm, cfg, exclude):
        occupied = [dist(p) for k, p in enumerate(cfg) if arm_of(p) == arm and k != exclude]
        return X.point_from_vertex(b, arm, min(occupied, default=X.lengths[arm]) / 2)

    for v in T.internal_nodes:
        chi = chiral_structure(X, T, cur, home_arc)
        if tuple(chi[v]) == tuple(target[v]):
            continue
        left, _right = chi[v]
        sigma = list(h_permutation(home_arc, cur))
        block = [r for r, i in enumerate(sigma) if i in T.leaf_indices(v)]
        i0, k0 = block[0], block[-1]
        j0 = max(r for r, i in enumerate(sigma) if i in T.leaf_indices(left))
        # step 1: slide positions 0..j0 into arm 2, deepest first
        slide = Arc(X, X.at(star.far(arm2)), X.at(star.far(home)))
        start = tuple(arc_coordinates(slide, cur))
        spacing = X.lengths[arm2] / (j0 + 2)
        off = X.lengths[arm2]
        end = list(start)
        for r in range(j0 + 1):
            end[sigma[r]] = off - (j0 + 1 - r) * spacing
        cur = path.push(LineMove(slide, start, tuple(end)))
        # step 2: right block into arm 3, nearest first
        for r in range(j0 + 1, k0 + 1):
            i = sigma[r]
            cur = path.push(PointMove(i, cur[i], into(arm3, cur, i)))
        # step 3: left block back home, in reverse
        for r in range(j0, i0 - 1, -1):
            i = sigma[r]
            cur = path.push(PointMove(i, cur[i], into(home, cur, i)))
        # step 4: right block back home, in reverse
        for r in range(k0, j0, -1):
            i = sigma[r]
            cur = path.push(PointMove(i, cur[i], into(home, cur, i)))
        # step 5: parked prefix slides home, ahead of everything else
        if i0 > 0:
            start = tuple(arc_coordinates(slide, cur))
            nearest = min(dist(p) for p in cur if arm_of(p) == home)
            end = list(start)
            for r in range(i0):
                end[sigma[r]] = off + (r + 1) * nearest / (i0 + 1)
            cur = path.push(LineMove(slide, start, tuple(end)))
    return path


def _to_home_arm(X: GeometricTree, T: CellularMergeTree, x: Configuration, star: Star) -> ConfigPath:
    path, e = gather_to_edge(X, T, x)
    cur = path.end
    home = star.arms[0]
    if e == home:
        return path
    b = star.center
    far_e = max(e, key=lambda w: (X.vertex_distance(w, b), w))
    slide = Arc(X, X.at(far_e), X.at(star.far(home)))
    start = arc_coordinates(slide, cur)
    base = slide.coordinate(X.at(b))
    n = len(cur)
    order = sorted(range(n), key=lambda i: start[i])
    end = [None] * n
    for rank, i in enumerate(order):
        end[i] = base + (rank + 1) * X.lengths[home] / (n + 1)
    path.push(LineMove(slide, tuple(start), tuple(end)))
    return path


def move_budget(n: int) -> int:
    return 8 * n * n + 8


def connect(X: GeometricTree, T: CellularMergeTree, x: Sequence[TreePoint], y: Sequence[TreePoint]) -> ConfigPath:
    """Explicit path from ``x`` to ``y`` in Conf(X, T).

    Both configurations are gathered into the home arm of a fixed star,
    ``x`` is reconfigured to the chirality of ``y`` there, slid onto it, and
    the gathering path of ``y`` is run backwards.
    """
    x, y = tuple(x), tuple(y)
    for cfg in (x, y):
        check = is_member(X, T, cfg)
        if not check:
            raise InvalidInputError(f"configuration is not admissible: {check.witness}")
    if x == y:
        return ConfigPath(x)
    if len(x) == 1:
        return ConfigPath(x, [PointMove(0, x[0], y[0])])
    if not X.has_branch_point():
        leaves = sorted(X.leaves())
        arc = Arc(X, X.at(leaves[0]), X.at(leaves[-1]))
        if h_permutation(arc, x) != h_permutation(arc, y):
            raise NoPathError("interval domain: configurations have different chirality")
        return line_travel(X, T, x, y, arc)
    star = choose_star(X)
    to_x = _to_home_arm(X, T, x, star)
    to_y = _to_home_arm(X, T, y, star)
    arc = star.home_arc(X)
    target = chiral_structure(X, T, to_y.end, arc)
    swap = star_reconfigure(X, T, to_x.end, star, target)
    slide = line_travel(X, T, swap.end, to_y.end, arc)
    path = to_x.then(swap).then(slide).then(to_y.reversed())
    if len(path) > move_budget(len(x)):
        raise MoveBudgetExceeded(f"{len(path)} moves for n={len(x)}")
    return path
