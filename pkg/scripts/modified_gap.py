"""Build a modified Santa Fe schedule and evaluate the gap inequalities."""

import argparse

from hilberg.measures import expected_mi_santa_fe
from hilberg.sampling import ProcessSpec
from hilberg.schedule import build_schedule


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--blocks", type=int, default=2)
    ap.add_argument("--literal", action="store_true", help="unsquared lower-bound constraint")
    args = ap.parse_args()
    s = build_schedule(args.beta, args.blocks, squared=not args.literal)
    spec = ProcessSpec.modified_santa_fe(s)
    print("invariants:", s.check())
    for blk in s.blocks:
        eb, ec = expected_mi_santa_fe(spec, blk.b), expected_mi_santa_fe(spec, blk.c)
        print(f"m={blk.m} b={blk.b} c={blk.c} eps={blk.eps:g}")
        print(f"  EI(b)={eb:.4f} <= b^eps={blk.b ** blk.eps:.4f}: {eb <= blk.b ** blk.eps}")
        lo = blk.c ** (s.beta - blk.eps)
        print(f"  EI(c)={ec:.4f} >= c^(beta-eps)={lo:.4f}: {ec >= lo}")


if __name__ == "__main__":
    main()
