"""Acceptance suite: one test per criterion, reported as PASS/FAIL lines in
the terminal summary (see conftest.py)."""

import functools
import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from fibertree.confspace import audit_path, connect
from fibertree.fiber import (
    Barcode,
    barcode_of,
    circle_count,
    containment_product,
    count_components,
    enumerate_merge_trees,
    realize_function,
    separation,
    verify_fiber_membership,
)
from fibertree.geometry import GeometricTree, Refinement, TreePoint
from fibertree.homology import discrete_conf2_betti1, discrete_conf_betti
from fibertree.mergetree import (
    AmbiguousElderRuleError,
    canonical_form,
    compute_merge_tree,
    induced_matrix,
    is_isomorphic,
)
from fibertree.plfunc import PLFunction, evaluate, sup_distance
from fibertree.randomgen import (
    BarcodeConfig,
    FunctionConfig,
    TreeConfig,
    h_tree,
    interval_tree,
    random_generic_barcode,
    random_member_configuration,
    random_pl_function,
    random_tree,
    star_tree,
)

from oracles import generic_trees, sweep

INF = math.inf


def nested(k):
    # [0, inf), [1, 2k-1), [2, 2k-2), ...
    return Barcode([(0, INF)] + [(i, 2 * k - i) for i in range(1, k)])


@functools.lru_cache(maxsize=None)
def barcodes():
    rng = random.Random(2024)
    return tuple(random_generic_barcode(rng, BarcodeConfig(n_bars=rng.randint(1, 7), span=40)) for _ in range(200))


@functools.lru_cache(maxsize=None)
def fibers():
    return tuple(tuple(enumerate_merge_trees(D)) for D in barcodes())


@functools.lru_cache(maxsize=None)
def domains():
    return {
        "star3": star_tree(3),
        "star4": star_tree(4),
        "H": h_tree(),
        "random10": random_tree(random.Random(10), TreeConfig(n_vertices=10)),
    }


@functools.lru_cache(maxsize=None)
def realized(name):
    X = domains()[name]
    return tuple(tuple(realize_function(T, X) for T in trees) for trees in fibers())


# -- 1 ---------------------------------------------------------------------


@pytest.mark.criterion(1, "counting formula vs enumeration (200 barcodes, < 10 s)")
def test_criterion_1_count_formula():
    start = time.perf_counter()
    mismatches = []
    for D in list(barcodes()) + [nested(3), nested(4)]:
        got, formula = len(enumerate_merge_trees(D)), containment_product(D)
        if got != formula:
            mismatches.append((D, got, formula))
    elapsed = time.perf_counter() - start
    worked = [(k, len(enumerate_merge_trees(nested(k))), containment_product(nested(k))) for k in (3, 4)]
    detail = ", ".join(f"{k} nested: enumerated {e}, formula {p}" for k, e, p in worked)
    assert not mismatches and elapsed < 10, (
        f"{len(mismatches)}/202 barcodes disagree with the product formula ({detail}); "
        f"first: {mismatches[0][0]} enumerated {mismatches[0][1]} vs formula {mismatches[0][2]}; {elapsed:.2f}s"
        if mismatches
        else f"too slow: {elapsed:.2f}s"
    )


# -- 2 ---------------------------------------------------------------------


@pytest.mark.criterion(2, "realization round trip on star3, star4, H-tree, random 10-vertex tree")
def test_criterion_2_realize_round_trip():
    failures = []
    for name in domains():
        for trees, fs in zip(fibers(), realized(name)):
            for T, f in zip(trees, fs):
                check = verify_fiber_membership(f, T)
                if not check.ok or not is_isomorphic(compute_merge_tree(f)[0], T):
                    failures.append((name, T, check.diagnostic))
    assert not failures, f"{len(failures)} failures, first: {failures[0]}"


# -- 3 ---------------------------------------------------------------------


def _node_values(X: GeometricTree, fs) -> list[list[Fraction]]:
    # on the common refinement every f is linear on segments, so sup-norms are
    # attained at nodes
    ref = Refinement(X, [p for f in fs for p in f.breakpoint_points()])
    return [[evaluate(f, p) for p in ref.nodes] for f in fs]


def _separation_violations(X, trees, fs, delta):
    vals = _node_values(X, fs)
    approx = np.array([[float(x) for x in row] for row in vals])
    bad = []
    for a, b in itertools.combinations(range(len(fs)), 2):
        if is_isomorphic(trees[a], trees[b]):
            continue
        # floats only certify; anything near the threshold is decided exactly
        if np.max(np.abs(approx[a] - approx[b])) >= float(delta) + 1e-9:
            continue
        d = max(abs(x - y) for x, y in zip(vals[a], vals[b]))
        if d < delta:
            bad.append((a, b, d))
    return bad


@pytest.mark.criterion(3, "sup-norm separation of distinct fiber components")
def test_criterion_3_separation():
    violations = []
    pairs = 0
    for name, X in domains().items():
        for D, trees, fs in zip(barcodes(), fibers(), realized(name)):
            delta = separation(D)
            pairs += len(fs) * (len(fs) - 1) // 2
            for a, b, d in _separation_violations(X, trees, fs, delta):
                assert sup_distance(fs[a], fs[b]) == d
                violations.append((name, D, a, b, d, delta))
    assert pairs > 0
    assert not violations, f"{len(violations)} violations, first: {violations[0]}"


# -- 4 ---------------------------------------------------------------------


def _noise(f: PLFunction, bound: Fraction, rng: random.Random) -> PLFunction:
    """Zero at the knots of f, random in (-bound, bound) at new interior points."""
    ref = Refinement(f.tree, f.breakpoint_points())
    extra = []
    for s in range(len(ref.segments)):
        _, _, key, t0, t1 = ref.segments[s]
        for k in range(1, rng.randint(1, 2) + 1):
            extra.append(TreePoint(edge=key, t=t0 + (t1 - t0) * Fraction(k, 3)))
    fine = Refinement(f.tree, f.breakpoint_points() + extra)
    knots = set(ref.nodes)
    scale = bound * Fraction(rng.randint(1, 99), 100)
    values = {
        i: Fraction(0) if p in knots else scale * Fraction(rng.randint(-1000, 1000), 1001) for i, p in enumerate(fine.nodes)
    }
    return PLFunction.from_refinement(fine, values)


@pytest.mark.criterion(4, "stability: barcode-preserving noise below min(dL, dR) keeps the merge tree")
def test_criterion_4_stability():
    rng = random.Random(4)
    trees = [star_tree(3), h_tree()] + [random_tree(rng, TreeConfig(n_vertices=k, require_branch=True)) for k in (5, 6, 8)]
    cases, failures = 0, []
    while cases < 100:
        X = rng.choice(trees)
        f = random_pl_function(X, rng, FunctionConfig(value_range=40, value_denominator=3, max_breakpoints=2))
        try:
            T = compute_merge_tree(f)[0]
            D = barcode_of(T)
        except AmbiguousElderRuleError:
            continue
        if len(D) < 2 or separation(D) == 0:
            continue
        bound = min(separation(D), Fraction(1))
        for _ in range(50):
            g = f + _noise(f, bound, rng)
            if sup_distance(f, g) >= bound:
                continue
            try:
                Tg = compute_merge_tree(g)[0]
                if barcode_of(Tg) != D:
                    continue
            except AmbiguousElderRuleError:
                continue
            cases += 1
            if not is_isomorphic(T, Tg):
                failures.append((f, g))
            break
    assert not failures, f"{len(failures)}/100 perturbations changed the merge tree"


# -- 5 ---------------------------------------------------------------------


@pytest.mark.criterion(5, "connect + full audit, 100 pairs per (X, T), n = 1..5, < 1 s per run")
def test_criterion_5_connectivity():
    rng = random.Random(5)
    spaces = [star_tree(3), h_tree(), random_tree(random.Random(55), TreeConfig(n_vertices=8, require_branch=True))]
    failures, slow, runs, worst = [], [], 0, 0.0
    for X in spaces:
        for n in range(1, 6):
            T = rng.choice(enumerate_merge_trees(random_generic_barcode(rng, BarcodeConfig(n_bars=n, span=30))))
            for _ in range(100):
                x = random_member_configuration(X, T, rng)
                y = random_member_configuration(X, T, rng)
                start = time.perf_counter()
                try:
                    path = connect(X, T, x, y)
                    report = audit_path(X, T, path)
                    ok = bool(report) and path.end == tuple(y)
                except Exception as exc:  # any failure counts
                    ok, report = False, exc
                elapsed = time.perf_counter() - start
                worst = max(worst, elapsed)
                runs += 1
                if not ok:
                    failures.append((X.vertices, n, x, y, report))
                if elapsed >= 1:
                    slow.append(elapsed)
    assert runs == 1500
    assert not failures, f"{len(failures)} failed runs, first: {failures[0]}"
    assert not slow, f"{len(slow)} runs over 1 s (worst {worst:.2f}s)"


# -- 6, 7 --------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def random_branching_trees():
    rng = random.Random(6)
    return tuple(random_tree(rng, TreeConfig(n_vertices=rng.randint(4, 8), require_branch=True)) for _ in range(20))


@pytest.mark.criterion(6, "discrete Conf_2 Betti-1 equals circle count (stars 3..6, 20 random trees)")
def test_criterion_6_two_bar_circles():
    assert [discrete_conf2_betti1(star_tree(k)) for k in (3, 4, 5, 6)] == [1, 5, 11, 19]
    assert [circle_count(star_tree(k)) for k in (3, 4, 5, 6)] == [1, 5, 11, 19]
    mismatches = [
        (X.edges, b, c)
        for X in random_branching_trees()
        if (b := discrete_conf2_betti1(X)) != (c := circle_count(X))
    ]
    assert not mismatches, mismatches


@pytest.mark.criterion(7, "one-bar fiber: a single component, Conf_1 contractible")
def test_criterion_7_one_bar():
    for a in (0, Fraction(-7, 3), 5):
        assert count_components(Barcode([(a, INF)])) == 1
        assert len(enumerate_merge_trees(Barcode([(a, INF)]))) == 1
    spaces = [star_tree(k) for k in (3, 4, 5, 6)] + list(random_branching_trees())
    spaces += [h_tree(), interval_tree(1), interval_tree(3), GeometricTree(["o"], [])]
    for X in spaces:
        assert discrete_conf_betti(X, 1) == [1, 0], X.edges


# -- 8 ---------------------------------------------------------------------


def _oracle_agreement(f) -> bool:
    mins, M, _ = sweep(f)
    T, where = compute_merge_tree(f)
    if sorted(v for v, _ in mins) != sorted(T.height[leaf] for leaf in T.leaves):
        return False
    leaf_of = []
    for _, nodes in mins:
        kind, *rest = next(iter(nodes))
        p = TreePoint(vertex=rest[0]) if kind == "v" else TreePoint(edge=(rest[0], rest[1]), t=rest[2])
        hits = [leaf for leaf in T.leaves if where[leaf].region.contains(p)]
        if len(hits) != 1:
            return False
        leaf_of.append(hits[0])
    if len(set(leaf_of)) != len(leaf_of):
        return False
    return all(
        T.height[T.lca(leaf_of[i], leaf_of[j])] == M[i][j] for i, j in itertools.product(range(len(mins)), repeat=2)
    )


@pytest.mark.criterion(8, "compute_merge_tree agrees with the sweep oracle on 500 functions")
def test_criterion_8_sweep_oracle():
    rng = random.Random(8)
    bad = []
    for k in range(500):
        X = random_tree(rng, TreeConfig(n_vertices=rng.randint(1, 9)))
        f = random_pl_function(X, rng, FunctionConfig(value_range=rng.choice([3, 10, 30]), max_breakpoints=rng.randint(0, 3)))
        if not _oracle_agreement(f):
            bad.append(k)
    assert not bad, f"disagreement on {len(bad)} functions: {bad[:10]}"


# -- 9 ---------------------------------------------------------------------


def _matrix_key(T, perm=None):
    M = induced_matrix(T).entries
    idx = perm or range(len(M))
    return tuple(tuple(M[i][j] for j in idx) for i in idx)


@pytest.mark.criterion(9, "matrix determinacy, exhaustive for <= 4 leaves")
def test_criterion_9_matrix_determinacy():
    heights = list(range(7))
    counterexamples = 0
    total = 0
    for n in range(1, 5):
        trees = generic_trees(n, heights)
        total += len(trees)
        by_matrix, by_orbit = {}, {}
        for T in trees:
            form = canonical_form(T)
            by_matrix.setdefault(_matrix_key(T), set()).add(form)
            # matrix up to relabelling of the leaves
            orbit = min(_matrix_key(T, p) for p in itertools.permutations(range(n)))
            by_orbit.setdefault(orbit, set()).add(form)
        # equal matrices force isomorphic trees
        counterexamples += sum(len(forms) > 1 for forms in by_matrix.values())
        # and isomorphic trees have equal matrices under some labelling
        seen = {}
        for orbit, forms in by_orbit.items():
            counterexamples += len(forms) > 1
            for form in forms:
                counterexamples += seen.setdefault(form, orbit) != orbit
        # pairwise cross-check with is_isomorphic on a sample of pairs
        rng = random.Random(n)
        for _ in range(2000):
            A, B = rng.choice(trees), rng.choice(trees)
            same_matrix = any(_matrix_key(A) == _matrix_key(B, p) for p in itertools.permutations(range(n)))
            counterexamples += same_matrix != is_isomorphic(A, B)
            if _matrix_key(A) == _matrix_key(B):
                counterexamples += not is_isomorphic(A, B)
    assert total > 1000
    assert counterexamples == 0
