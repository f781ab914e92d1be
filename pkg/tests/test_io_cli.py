import itertools
import json
import random
import subprocess
import sys

import pytest

from fibertree import io
from fibertree.cli import run
from fibertree.confspace import is_member
from fibertree.fiber import Barcode, enumerate_merge_trees
from fibertree.randomgen import (
    FunctionConfig,
    TreeConfig,
    random_member_configuration,
    random_pl_function,
    random_tree,
    star_tree,
)

STAR3 = {
    "vertices": ["c", "a", "b", "d"],
    "edges": [{"u": "c", "v": x, "length": "1"} for x in "abd"],
}
NESTED3 = [["0", "inf"], ["1", "3"], ["2", "5/2"]]


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else io.dumps(data))
    return str(p)


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tree_round_trip(tmp_path):
    X = random_tree(random.Random(1), TreeConfig(n_vertices=6, length_denominator=2))
    text = io.dumps(io.tree_to_data(X))
    assert io.dumps(io.tree_to_data(io.parse_tree(io.loads(text)))) == text


def test_function_and_merge_tree_round_trip():
    r = random.Random(2)
    X = random_tree(r, TreeConfig(n_vertices=5))
    f = random_pl_function(X, r, FunctionConfig(value_denominator=3, max_breakpoints=2))
    text = io.dumps(io.function_to_data(f))
    assert io.dumps(io.function_to_data(io.parse_function(io.loads(text)))) == text
    for T in enumerate_merge_trees(Barcode([(0, "inf"), (1, 4), (2, 3)])):
        text = io.dumps(io.merge_tree_to_data(T))
        assert io.dumps(io.merge_tree_to_data(io.parse_merge_tree(io.loads(text)))) == text


def test_configuration_round_trip():
    X = star_tree(3)
    T = enumerate_merge_trees(Barcode([(0, "inf"), (1, 4), (2, 3)]))[0]
    x = random_member_configuration(X, T, random.Random(0))
    text = io.dumps(io.configuration_to_data(X, T, x))
    cfg = io.parse_configuration(io.loads(text))
    assert cfg.points == x
    assert io.dumps(io.configuration_to_data(cfg.tree, cfg.merge_tree, cfg.points)) == text


def test_parse_error_has_location(tmp_path):
    bad = dict(STAR3, edges=STAR3["edges"][:2] + [{"u": "c", "v": "d", "length": "zero"}])
    path = write(tmp_path, "bad.json", bad)
    with pytest.raises(io.ParseError) as exc:
        io.parse_tree(io.load(path))
    assert exc.value.path == path and exc.value.fieldname == "edges[2].length"
    assert exc.value.line == io.load(path).text.splitlines().index('      "length": "zero"') + 1
    broken = write(tmp_path, "broken.json", '{\n  "vertices": [\n')
    with pytest.raises(io.ParseError) as exc:
        io.parse_tree(io.load(broken))
    assert exc.value.line == 3


def test_mt_compute_constant(tmp_path, capsys):
    write(tmp_path, "star3.json", STAR3)
    f = write(tmp_path, "f.json", {"tree": "star3.json", "vertex_values": {v: "2" for v in "cabd"}})
    code, out, _ = cli(capsys, "mt", "compute", "--function", f)
    assert code == 0
    assert json.loads(out) == {"leaves": {"l1": "2"}, "internal": {}, "parent": {"l1": "root"}}


def test_fiber_count_and_enumerate(tmp_path, capsys):
    d = write(tmp_path, "d3.json", NESTED3)
    assert cli(capsys, "fiber", "count", "--barcode", d)[1] == "2\n"
    assert cli(capsys, "fiber", "count", "--barcode", d, "--formula", "product")[1] == "6\n"
    code, out, _ = cli(capsys, "fiber", "enumerate", "--barcode", d)
    assert code == 0 and len(json.loads(out)) == 2
    bad = write(tmp_path, "bad.json", [["0", "inf"], ["1", "3"], ["1", "2"]])
    assert cli(capsys, "fiber", "count", "--barcode", bad)[0] == 2


def test_realize_verify_same_component(tmp_path, capsys):
    x = write(tmp_path, "star3.json", STAR3)
    d = write(tmp_path, "d3.json", NESTED3)
    trees = json.loads(cli(capsys, "fiber", "enumerate", "--barcode", d)[1])
    t0 = write(tmp_path, "t0.json", trees[0])
    t1 = write(tmp_path, "t1.json", trees[1])
    code, out, _ = cli(capsys, "fiber", "realize", "--merge-tree", t0, "--tree", x)
    f0 = write(tmp_path, "f0.json", out)
    assert cli(capsys, "fiber", "verify", "--function", f0, "--merge-tree", t0)[0] == 0
    code, out, err = cli(capsys, "fiber", "verify", "--function", f0, "--merge-tree", t1)
    assert code == 1 and out == "false\n" and "mismatch" in err
    out = cli(capsys, "fiber", "realize", "--merge-tree", t0, "--tree", x, "--random-config", "--seed", "4")[1]
    g0 = write(tmp_path, "g0.json", out)
    assert cli(capsys, "fiber", "same-component", "--function", f0, "--function2", g0)[0] == 0
    f1 = write(tmp_path, "f1.json", cli(capsys, "fiber", "realize", "--merge-tree", t1, "--tree", x)[1])
    assert cli(capsys, "fiber", "same-component", "--function", f0, "--function2", f1)[0] == 1
    assert cli(capsys, "mt", "isomorphic", "--merge-tree", t0, "--merge-tree2", t1)[0] == 1
    code, out, _ = cli(capsys, "barcode", "of", "--function", f1)
    assert json.loads(out) == NESTED3
    assert cli(capsys, "barcode", "generic", "--merge-tree", t1)[0] == 0
    deltas = json.loads(cli(capsys, "barcode", "deltas", "--barcode", d, "--decimal", "2")[1])
    assert deltas == {"delta_L": "1.00", "delta_R": "0.50", "min": "0.50"}


def test_seeded_output_is_reproducible(tmp_path, capsys, monkeypatch):
    x = write(tmp_path, "star3.json", STAR3)
    d = write(tmp_path, "d3.json", NESTED3)
    t0 = write(tmp_path, "t0.json", json.loads(cli(capsys, "fiber", "enumerate", "--barcode", d)[1])[0])
    args = ["fiber", "realize", "--merge-tree", t0, "--tree", x, "--random-config"]
    a = cli(capsys, *args, "--seed", "9")[1]
    b = cli(capsys, *args, "--seed", "9")[1]
    assert a == b
    monkeypatch.setenv("FIBERTREE_SEED", "9")
    assert cli(capsys, *args, "--seed", "1")[1] == a


def test_conf_verbs(tmp_path, capsys):
    X = star_tree(3)
    T = enumerate_merge_trees(Barcode([(0, "inf"), (1, 4), (2, 3)]))[1]
    r = random.Random(6)
    src = write(tmp_path, "x.json", io.configuration_to_data(X, T, random_member_configuration(X, T, r)))
    dst = write(tmp_path, "y.json", io.configuration_to_data(X, T, random_member_configuration(X, T, r)))
    assert cli(capsys, "conf", "check", "--config", src)[0] == 0
    csv_path = tmp_path / "plot.csv"
    code, out, err = cli(capsys, "conf", "connect", "--config", src, "--target", dst, "--audit", "--csv", str(csv_path))
    assert code == 0 and "audit passed" in err
    moves = json.loads(out)
    assert moves and {m["type"] for m in moves} <= {"point", "line"}
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "time,index,edge,t" and len(rows) > 3
    row = [X.point("c-a0", f"{k}/4") for k in (1, 2, 3)]
    pts = next(p for p in itertools.permutations(row) if is_member(X, T, p))
    line = write(tmp_path, "l.json", io.configuration_to_data(X, T, pts))
    code, out, _ = cli(capsys, "conf", "chirality", "--config", line, "--arc", "c", "a0")
    assert code == 0 and set(json.loads(out)) == set(T.internal_nodes)
    tree5 = write(tmp_path, "star5.json", io.tree_to_data(star_tree(5)))
    assert cli(capsys, "conf", "betti1", "--tree", tree5)[1] == "11\n"


def test_conf_check_witness(tmp_path, capsys):
    X = star_tree(3)
    T = enumerate_merge_trees(Barcode([(0, "inf"), (1, 4), (2, 3)]))[0]
    low = T.internal_nodes[0]
    a, b = sorted(T.leaf_indices(low))
    (c,) = {0, 1, 2} - {a, b}
    pts = [None] * 3
    pts[a], pts[c], pts[b] = X.point("c-a0", "1/4"), X.point("c-a0", "1/2"), X.point("c-a0", "3/4")
    cfg = write(tmp_path, "bad.json", io.configuration_to_data(X, T, pts))
    code, out, err = cli(capsys, "conf", "check", "--config", cfg)
    assert code == 1 and out == "false\n" and err.startswith("witness:")


def test_dist_and_matrix(tmp_path, capsys):
    trees = enumerate_merge_trees(Barcode([(0, "inf"), (1, 4), (2, 3)]))
    t0 = write(tmp_path, "t0.json", io.merge_tree_to_data(trees[0]))
    t1 = write(tmp_path, "t1.json", io.merge_tree_to_data(trees[1]))
    assert cli(capsys, "dist", "matrix", "--merge-tree", t0, "--merge-tree2", t0)[1] == "0\n"
    code, out, _ = cli(capsys, "dist", "matrix", "--merge-tree", t0, "--merge-tree2", t1, "--labels1", "l1,l2,l3", "--labels2", "l1,l2,l3")
    assert code == 0 and out.strip() != "0"
    M = json.loads(cli(capsys, "mt", "matrix", "--merge-tree", t0)[1])
    assert M["labels"] == ["l1", "l2", "l3"] and M["entries"][0][0] == "0"


def test_unknown_flag_and_module_entry(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["mt", "compute", "--bogus"])
    assert exc.value.code == 2
    proc = subprocess.run([sys.executable, "-m", "fibertree", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "fiber" in proc.stdout
