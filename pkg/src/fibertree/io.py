"""JSON file formats, canonical serialization and plot-data export.

Numbers are written as exact fraction strings ("3/2", "-1", "inf") so that
files round-trip byte for byte.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .confspace import ConfigPath, LineMove, PointMove, move_samples
from .fiber import Barcode
from .geometry import GeometricTree, InvalidInputError, TreePoint, as_fraction
from .mergetree import CellularMergeTree, InducedMatrix
from .plfunc import PLFunction


class ParseError(ValueError):
    def __init__(self, path: str, line: int | None, fieldname: str, message: str):
        self.path, self.line, self.fieldname = path, line, fieldname
        where = f"{path}:{line}" if line else path
        super().__init__(f"{where}: field {fieldname!r}: {message}")


@dataclass
class Source:
    """Parsed JSON document that remembers its text for error locations."""

    path: str
    text: str
    data: Any

    def line_of(self, *needles: str) -> int | None:
        """Line of the last needle, searching each after the previous one."""
        pos = 0
        for needle in needles:
            k = self.text.find(needle, pos)
            if k < 0:
                break
            pos = k
        else:
            return self.text.count("\n", 0, pos) + 1
        return None

    def fail(self, fieldname: str, message: str, *needles: str):
        raise ParseError(self.path, self.line_of(*needles) if needles else None, fieldname, message)


def load(path: str) -> Source:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(path, None, "<file>", str(exc)) from None
    return loads(text, path)


def loads(text: str, path: str = "<string>") -> Source:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, "<json>", exc.msg) from None
    return Source(path, text, data)


def fmt(x, decimal: int | None = None) -> str:
    if x == math.inf:
        return "inf"
    x = Fraction(x)
    if decimal is None:
        return str(x)
    return f"{float(x):.{decimal}f}"


def _num(src: Source, value, fieldname: str, *needles: str) -> Fraction:
    try:
        return as_fraction(value)
    except (InvalidInputError, ValueError, TypeError, ZeroDivisionError) as exc:
        src.fail(fieldname, f"not an exact number: {value!r} ({exc})", *needles, json.dumps(value))


def _require(src: Source, obj, key: str, fieldname: str, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        src.fail(fieldname, "missing")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        src.fail(fieldname, f"expected {kind.__name__}", f'"{key}"')
    return val


# -- trees ---------------------------------------------------------------


def tree_from_data(src: Source, data, prefix: str = "") -> GeometricTree:
    if isinstance(data, str):
        base = os.path.dirname(src.path)
        return parse_tree(load(os.path.join(base, data)))
    vertices = _require(src, data, "vertices", prefix + "vertices", list)
    edges = _require(src, data, "edges", prefix + "edges", list)
    parsed = []
    for i, e in enumerate(edges):
        name = f"{prefix}edges[{i}]"
        if not isinstance(e, dict):
            src.fail(name, "expected an object", '"edges"')
        u = _require(src, e, "u", name + ".u", str)
        v = _require(src, e, "v", name + ".v", str)
        length = _num(src, _require(src, e, "length", name + ".length"), name + ".length", '"edges"', f'"{u}"')
        parsed.append((u, v, length))
    try:
        return GeometricTree([str(v) for v in vertices], parsed)
    except InvalidInputError as exc:
        src.fail(prefix + "edges", str(exc), '"edges"')


def parse_tree(src: Source) -> GeometricTree:
    return tree_from_data(src, src.data)


def tree_to_data(X: GeometricTree) -> dict:
    return {
        "vertices": list(X.vertices),
        "edges": [{"u": u, "v": v, "length": fmt(X.lengths[(u, v)])} for u, v in X.edges],
    }


# -- functions -----------------------------------------------------------


def parse_function(src: Source) -> PLFunction:
    data = src.data
    X = tree_from_data(src, _require(src, data, "tree", "tree"), "tree.")
    raw_values = _require(src, data, "vertex_values", "vertex_values", dict)
    values = {k: _num(src, v, f"vertex_values.{k}", '"vertex_values"', f'"{k}"') for k, v in raw_values.items()}
    bps = {}
    for name, pts in (data.get("breakpoints") or {}).items():
        clean = []
        for j, pair in enumerate(pts):
            fname = f"breakpoints.{name}[{j}]"
            if not (isinstance(pair, list) and len(pair) == 2):
                src.fail(fname, "expected [t, value]", '"breakpoints"', f'"{name}"')
            clean.append(tuple(_num(src, x, fname, '"breakpoints"', f'"{name}"') for x in pair))
        bps[name] = clean
    try:
        return PLFunction.build(X, values, bps)
    except InvalidInputError as exc:
        src.fail("vertex_values/breakpoints", str(exc))


def function_to_data(f: PLFunction) -> dict:
    return {
        "tree": tree_to_data(f.tree),
        "vertex_values": {v: fmt(x) for v, x in f.vertex_values.items()},
        "breakpoints": {
            f"{u}-{w}": [[fmt(t), fmt(x)] for t, x in pts] for (u, w), pts in f.breakpoints.items()
        },
    }


# -- merge trees and barcodes ---------------------------------------------


def merge_tree_from_data(src: Source, data, prefix: str = "") -> CellularMergeTree:
    if isinstance(data, str):
        return parse_merge_tree(load(os.path.join(os.path.dirname(src.path), data)))
    leaves = _require(src, data, "leaves", prefix + "leaves", dict)
    internal = data.get("internal", {}) if isinstance(data, dict) else {}
    parent = _require(src, data, "parent", prefix + "parent", dict)
    height = {}
    for group, items in (("leaves", leaves), ("internal", internal)):
        for k, v in items.items():
            height[k] = _num(src, v, f"{prefix}{group}.{k}", f'"{group}"', f'"{k}"')
    parents = {k: (None if p == "root" else p) for k, p in parent.items()}
    try:
        return CellularMergeTree(height, parents, tuple(leaves))
    except InvalidInputError as exc:
        src.fail(prefix + "parent", str(exc), '"parent"')


def parse_merge_tree(src: Source) -> CellularMergeTree:
    return merge_tree_from_data(src, src.data)


def merge_tree_to_data(T: CellularMergeTree) -> dict:
    internal = sorted((v for v in T.height if v not in T.leaves), key=lambda v: (T.height[v], v))
    order = list(T.leaves) + internal
    return {
        "leaves": {v: fmt(T.height[v]) for v in T.leaves},
        "internal": {v: fmt(T.height[v]) for v in internal},
        "parent": {v: T.parent[v] or "root" for v in order},
    }


def parse_barcode(src: Source) -> Barcode:
    data = src.data
    if not isinstance(data, list):
        src.fail("<barcode>", "expected a list of [b, d] pairs")
    bars = []
    for i, bar in enumerate(data):
        if not (isinstance(bar, list) and len(bar) == 2):
            src.fail(f"[{i}]", "expected [b, d]")
        b = _num(src, bar[0], f"[{i}][0]")
        d = math.inf if bar[1] in ("inf", "Infinity") else _num(src, bar[1], f"[{i}][1]")
        bars.append((b, d))
    try:
        return Barcode(bars)
    except InvalidInputError as exc:
        src.fail("<barcode>", str(exc))


def barcode_to_data(D: Barcode, decimal: int | None = None) -> list:
    return [[fmt(b, decimal), fmt(d, decimal)] for b, d in D]


def matrix_to_data(M: InducedMatrix, decimal: int | None = None) -> dict:
    return {"labels": list(M.labels), "entries": [[fmt(x, decimal) for x in row] for row in M.entries]}


# -- configurations --------------------------------------------------------


def point_from_data(src: Source, X: GeometricTree, data, fieldname: str) -> TreePoint:
    try:
        if isinstance(data, dict) and "vertex" in data:
            return X.at(data["vertex"])
        if isinstance(data, dict) and "edge" in data and "t" in data:
            return X.point(data["edge"], _num(src, data["t"], fieldname + ".t", '"points"'))
    except InvalidInputError as exc:
        src.fail(fieldname, str(exc), '"points"', json.dumps(data.get("edge", data.get("vertex"))))
    src.fail(fieldname, 'expected {"edge": "u-v", "t": "p/q"} or {"vertex": name}', '"points"')


def point_to_data(p: TreePoint, decimal: int | None = None) -> dict:
    if p.vertex is not None:
        return {"vertex": p.vertex}
    return {"edge": f"{p.edge[0]}-{p.edge[1]}", "t": fmt(p.t, decimal)}


@dataclass
class ConfigFile:
    tree: GeometricTree
    merge_tree: CellularMergeTree
    points: tuple[TreePoint, ...]


def parse_configuration(src: Source) -> ConfigFile:
    data = src.data
    X = tree_from_data(src, _require(src, data, "tree", "tree"), "tree.")
    T = merge_tree_from_data(src, _require(src, data, "merge_tree", "merge_tree"), "merge_tree.")
    pts = _require(src, data, "points", "points", list)
    points = tuple(point_from_data(src, X, p, f"points[{i}]") for i, p in enumerate(pts))
    if len(points) != T.n_leaves:
        src.fail("points", f"{len(points)} points for {T.n_leaves} leaves", '"points"')
    return ConfigFile(X, T, points)


def configuration_to_data(X: GeometricTree, T: CellularMergeTree, x) -> dict:
    return {"tree": tree_to_data(X), "merge_tree": merge_tree_to_data(T), "points": [point_to_data(p) for p in x]}


# -- paths -------------------------------------------------------------------


def path_to_data(path: ConfigPath, decimal: int | None = None) -> list[dict]:
    out = []
    for m in path.moves:
        if isinstance(m, PointMove):
            out.append(
                {"type": "point", "index": m.index, "from": point_to_data(m.start, decimal), "to": point_to_data(m.end, decimal)}
            )
        else:
            out.append(
                {
                    "type": "line",
                    "arc": {"from": point_to_data(m.arc.start, decimal), "to": point_to_data(m.arc.end, decimal)},
                    "start": [fmt(s, decimal) for s in m.start],
                    "end": [fmt(s, decimal) for s in m.end],
                }
            )
    return out


def _edge_param(X: GeometricTree, p: TreePoint) -> tuple[str, Fraction]:
    if p.vertex is None:
        return f"{p.edge[0]}-{p.edge[1]}", p.t
    if not X.lengths:
        return p.vertex, Fraction(0)
    _, (u, w) = min(X.neighbors(p.vertex))
    return f"{u}-{w}", Fraction(0) if p.vertex == u else Fraction(1)


def path_to_csv(X: GeometricTree, path: ConfigPath, decimal: int | None = None) -> str:
    """Plot data: one row per point per sample time; move k spans [k, k+1]."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", "index", "edge", "t"])
    x = tuple(path.start)
    rows_at = [(Fraction(0), x)]
    for k, m in enumerate(path.moves):
        rows_at += [(k + s, y) for s, y in move_samples(X, x, m) if s > 0]
        x = LineMove.at(m, Fraction(1)) if isinstance(m, LineMove) else x[: m.index] + (m.end,) + x[m.index + 1 :]
    for time, cfg in rows_at:
        for i, p in enumerate(cfg):
            edge, t = _edge_param(X, p)
            w.writerow([fmt(time, decimal), i, edge, fmt(t, decimal)])
    return buf.getvalue()


def dumps(data) -> str:
    return json.dumps(data, indent=2) + "\n"
