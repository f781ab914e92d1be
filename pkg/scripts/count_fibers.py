"""Component counts of barcode fibers: enumeration vs the two closed forms.

``strict`` counts, for every finite bar, the bars that strictly contain it;
``product`` uses non-strict containment (each bar also counts itself).
"""

import argparse
import math
import random
import time

from fibertree.fiber import Barcode, containment_product, count_components, enumerate_merge_trees
from fibertree.randomgen import BarcodeConfig, random_generic_barcode


def nested(k):
    return Barcode([(0, math.inf)] + [(i, 2 * k - i) for i in range(1, k)])


def row(label, D):
    t = time.perf_counter()
    n = len(enumerate_merge_trees(D))
    dt = time.perf_counter() - t
    print(f"{label:<14} {len(D):>4} {n:>10} {count_components(D):>8} {containment_product(D):>9} {dt:>8.3f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--random", type=int, default=10, help="number of random generic barcodes")
    ap.add_argument("--max-bars", type=int, default=7)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    print(f"{'barcode':<14} {'bars':>4} {'enumerated':>10} {'strict':>8} {'product':>9} {'seconds':>8}")
    for k in range(1, args.max_bars + 1):
        row(f"nested-{k}", nested(k))
    rng = random.Random(args.seed)
    for i in range(args.random):
        D = random_generic_barcode(rng, BarcodeConfig(n_bars=rng.randint(1, args.max_bars), span=40))
        row(f"random-{i}", D)


if __name__ == "__main__":
    main()
