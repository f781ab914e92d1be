"""Connect two random admissible configurations, audit the path and write
the move list (JSON) and plot data (CSV)."""

import argparse
import random
import time
from pathlib import Path

from fibertree import io
from fibertree.confspace import audit_path, connect
from fibertree.fiber import enumerate_merge_trees
from fibertree.randomgen import BarcodeConfig, TreeConfig, h_tree, random_generic_barcode, random_member_configuration, random_tree, star_tree


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tree", choices=("star3", "H", "random"), default="H")
    ap.add_argument("--leaves", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="connect_out")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    X = {"star3": star_tree(3), "H": h_tree()}.get(args.tree) or random_tree(rng, TreeConfig(n_vertices=8, require_branch=True))
    T = rng.choice(enumerate_merge_trees(random_generic_barcode(rng, BarcodeConfig(n_bars=args.leaves, span=30))))
    x = random_member_configuration(X, T, rng)
    y = random_member_configuration(X, T, rng)

    t = time.perf_counter()
    path = connect(X, T, x, y)
    report = audit_path(X, T, path)
    dt = time.perf_counter() - t
    print(f"{len(path)} moves ({path.point_moves} point, {path.line_moves} line), "
          f"audit {'passed' if report else 'FAILED'} over {report.samples} samples, {dt:.3f}s")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "start.json").write_text(io.dumps(io.configuration_to_data(X, T, x)))
    (out / "target.json").write_text(io.dumps(io.configuration_to_data(X, T, y)))
    (out / "path.json").write_text(io.dumps(io.path_to_data(path)))
    (out / "path.csv").write_text(io.path_to_csv(X, path, decimal=6))
    print(f"wrote {out}/start.json, target.json, path.json, path.csv")


if __name__ == "__main__":
    main()
