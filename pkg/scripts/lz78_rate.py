"""Per-symbol LZ78 rate on IID Bernoulli(p) against the binary entropy."""

import argparse
import math

import numpy as np

from hilberg.codes import lz78_length
from hilberg.sampling import replicate_rng


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=float, nargs="+", default=[0.1, 0.3, 0.5])
    ap.add_argument("--k", type=int, nargs="+", default=[10, 12, 14, 16, 18])
    ap.add_argument("--replicates", type=int, default=5)
    ap.add_argument("--seed", type=int, default=6)
    args = ap.parse_args()
    for p in args.p:
        h = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
        for k in args.k:
            n = 2**k
            lens = [lz78_length((replicate_rng(args.seed, r).random(n) < p).astype(np.uint8), 2) for r in range(args.replicates)]
            rate = np.mean([c.bits / n for c in lens])
            print(f"p={p} n=2^{k}: rate={rate:.4f} H={h:.4f} excess={rate - h:.4f} phrases/n={np.mean([c.phrase_count for c in lens]) / n:.4f}")


if __name__ == "__main__":
    main()
