"""Smallest sup-norm distance between realizations of distinct fiber
components, relative to the separation threshold min(delta_L, delta_R)."""

import argparse
import itertools
import random

from fibertree.fiber import enumerate_merge_trees, realize_function, separation
from fibertree.plfunc import sup_distance
from fibertree.randomgen import BarcodeConfig, h_tree, random_generic_barcode, star_tree


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--barcodes", type=int, default=20)
    ap.add_argument("--max-bars", type=int, default=4)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--tree", choices=("star3", "H"), default="star3")
    args = ap.parse_args()

    X = star_tree(3) if args.tree == "star3" else h_tree()
    rng = random.Random(args.seed)
    print(f"{'bars':>4} {'components':>10} {'threshold':>10} {'min dist':>10} {'ratio':>7}")
    for _ in range(args.barcodes):
        D = random_generic_barcode(rng, BarcodeConfig(n_bars=rng.randint(2, args.max_bars), span=40))
        fs = [realize_function(T, X) for T in enumerate_merge_trees(D)]
        if len(fs) < 2:
            continue
        delta = separation(D)
        d = min(sup_distance(f, g) for f, g in itertools.combinations(fs, 2))
        print(f"{len(D):>4} {len(fs):>10} {str(delta):>10} {str(d):>10} {float(d / delta):>7.2f}")


if __name__ == "__main__":
    main()
