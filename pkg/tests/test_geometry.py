import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from fibertree.geometry import (
    GeometricTree,
    InvalidInputError,
    TreeSubset,
    bridge,
    convex_hull,
    diameter,
    distance,
    on_path,
    project,
    shortest_path,
    subsets_disjoint,
)
from fibertree.randomgen import TreeConfig, random_points, random_tree

from oracles import grid_graph, grid_node, steiner_nodes


def bfs_dist(adj, a, b, step):
    seen = {a: 0}
    frontier = [a]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in seen:
                    seen[w] = seen[v] + 1
                    nxt.append(w)
        frontier = nxt
    return seen[b] * step


def test_rejects_bad_trees():
    with pytest.raises(InvalidInputError):
        GeometricTree(["a", "b"], [("a", "b", 0)])
    with pytest.raises(InvalidInputError):
        GeometricTree(["a", "b", "c"], [("a", "b", 1)])
    with pytest.raises(InvalidInputError):
        GeometricTree(["a"], [("a", "a", 1)])
    with pytest.raises(InvalidInputError):
        GeometricTree(["a", "b"], [("a", "b", 1), ("b", "a", 1)])


def test_vertex_normal_form(star3):
    assert star3.point("c-a", 0) == star3.at("c")
    assert star3.point("a-c", 0) == star3.at("a")
    assert star3.point("a-c", F(1, 4)) == star3.point("c-a", F(3, 4))


def test_shortest_path_examples(star3):
    a, b = star3.at("a"), star3.at("b")
    P = shortest_path(star3, a, b)
    assert P.length() == 2
    assert P.contains(star3.at("c"))
    assert shortest_path(star3, a, a) == TreeSubset.of_point(star3, a)
    A = TreeSubset.build(star3, [], [(("c", "a"), 0, F(1, 2))])
    route = bridge(star3, A, b)
    assert route == [star3.at("c"), b]
    half = star3.point("c-a", F(1, 2))
    assert distance(star3, half, b) == F(3, 2)


def test_hull_examples(star3):
    pts = [star3.at(v) for v in "abd"]
    assert convex_hull(star3, pts[:2]).length() == 2
    assert convex_hull(star3, pts) == TreeSubset.whole(star3)
    assert convex_hull(star3, pts[:1]) == TreeSubset.of_point(star3, pts[0])
    with pytest.raises(InvalidInputError):
        convex_hull(star3, [])


def test_project_and_misc(star3):
    A = convex_hull(star3, [star3.at("b"), star3.at("d")])
    assert project(star3, star3.at("a"), A) == star3.at("c")
    assert project(star3, star3.at("b"), A) == star3.at("b")
    assert diameter(star3, TreeSubset.whole(star3)) == 2
    h1 = TreeSubset.build(star3, [], [(("c", "a"), 0, F(1, 2))])
    h2 = TreeSubset.build(star3, [], [(("c", "b"), 0, F(1, 2))])
    assert not subsets_disjoint(h1, h2)


def test_disconnected_subset_rejected(star3):
    with pytest.raises(InvalidInputError):
        TreeSubset.build(star3, [], [(("c", "a"), F(1, 4), F(1, 2)), (("c", "b"), F(1, 4), F(1, 2))])


seeds = st.integers(min_value=0, max_value=10**6)


@given(seeds)
def test_distance_matches_bfs(seed):
    r = random.Random(seed)
    X = random_tree(r, TreeConfig(n_vertices=r.randint(2, 7), max_length=1))
    p, q = random_points(X, 2, r, denominator=4)
    adj = grid_graph(X, 4)
    assert distance(X, p, q) == bfs_dist(adj, grid_node(p, 4), grid_node(q, 4), F(1, 4))


@given(seeds)
def test_hull_matches_steiner_oracle(seed):
    r = random.Random(seed)
    X = random_tree(r, TreeConfig(n_vertices=r.randint(2, 7), max_length=1))
    pts = random_points(X, r.randint(1, 4), r, denominator=4)
    H = convex_hull(X, pts)
    adj = grid_graph(X, 4)
    nodes = steiner_nodes(adj, {grid_node(p, 4) for p in pts}) if len(pts) > 1 else {grid_node(pts[0], 4)}
    # every grid point is in H exactly when the oracle keeps it
    for u, w in X.edges:
        for i in range(5):
            p = X.point((u, w), F(i, 4))
            assert H.contains(p) == (grid_node(p, 4) in nodes)
    # hull of the hull is the hull; adding points only grows it
    assert convex_hull(X, [H]) == H
    more = convex_hull(X, pts + random_points(X, 1, r, denominator=4))
    assert H.issubset(more)


@given(seeds)
def test_triangle_equality_iff_on_path(seed):
    r = random.Random(seed)
    X = random_tree(r, TreeConfig(n_vertices=r.randint(2, 7)))
    p, q, s = random_points(X, 3, r)
    lhs = distance(X, p, q)
    rhs = distance(X, p, s) + distance(X, s, q)
    assert lhs <= rhs
    assert (lhs == rhs) == on_path(X, s, p, q) == shortest_path(X, p, q).contains(s)


@given(seeds)
def test_project_matches_scan(seed):
    r = random.Random(seed)
    X = random_tree(r, TreeConfig(n_vertices=r.randint(2, 7), max_length=1))
    pts = random_points(X, r.randint(1, 3), r, denominator=4)
    A = convex_hull(X, pts)
    p = random_points(X, 1, r, denominator=4)[0]
    got = project(X, p, A)
    grid = [X.point(e, F(i, 4)) for e in X.edges for i in range(5)]
    best = min(distance(X, p, g) for g in grid if A.contains(g))
    assert A.contains(got) and distance(X, p, got) == best


@given(seeds)
def test_shortest_path_symmetric_and_subdivision_invariant(seed):
    r = random.Random(seed)
    X = random_tree(r, TreeConfig(n_vertices=r.randint(2, 6)))
    p, q = random_points(X, 2, r)
    assert shortest_path(X, p, q) == shortest_path(X, q, p)
    Y = X.subdivide(2)

    def move(pt):
        # the same geometric point in the subdivided tree
        if pt.vertex is not None:
            return Y.at(pt.vertex)
        u, w = pt.edge
        if pt.t == F(1, 2):
            return Y.at(f"{u}~{w}~1")
        if pt.t < F(1, 2):
            return Y.point((u, f"{u}~{w}~1"), pt.t * 2)
        return Y.point((f"{u}~{w}~1", w), pt.t * 2 - 1)

    assert distance(Y, move(p), move(q)) == distance(X, p, q)
    assert shortest_path(Y, move(p), move(q)).length() == shortest_path(X, p, q).length()
