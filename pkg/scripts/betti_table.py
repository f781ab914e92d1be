"""First Betti number of the discrete two-point configuration space vs the
circle count, on stars and random trees with a branch point."""

import argparse
import random

from fibertree.fiber import circle_count
from fibertree.homology import discrete_conf_betti
from fibertree.randomgen import TreeConfig, h_tree, random_tree, star_tree


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-star", type=int, default=6)
    ap.add_argument("--random", type=int, default=5)
    ap.add_argument("--seed", type=int, default=6)
    ap.add_argument("--subdivide", type=int, default=3)
    args = ap.parse_args()

    spaces = [(f"star{k}", star_tree(k)) for k in range(3, args.max_star + 1)] + [("H", h_tree())]
    rng = random.Random(args.seed)
    for i in range(args.random):
        spaces.append((f"random-{i}", random_tree(rng, TreeConfig(n_vertices=rng.randint(4, 8), require_branch=True))))
    print(f"{'tree':<10} {'vertices':>8} {'b0':>4} {'b1':>4} {'b2':>4} {'circles':>8}")
    for name, X in spaces:
        b = discrete_conf_betti(X, 2, args.subdivide)
        print(f"{name:<10} {len(X.vertices):>8} {b[0]:>4} {b[1]:>4} {b[2]:>4} {circle_count(X):>8}")


if __name__ == "__main__":
    main()
