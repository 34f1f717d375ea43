"""Exact expected MI of the mixture Bernoulli process and its growth fits."""

import argparse
import math

from hilberg.experiment import ExperimentConfig, run_analytic
from hilberg.exponents import fit_growth_models
from hilberg.sampling import ProcessSpec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k-max", type=int, default=13)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    curve = run_analytic(ExperimentConfig(ProcessSpec.mixture(), k_min=2, k_max=args.k_max, out=args.out))
    for r in curve:
        print(f"n=2^{r.k:<2d} EI={r.analytic_mi:.6f}  log2(n+1)={math.log2(r.n + 1):.3f}  EI-0.5*log2(n)={r.analytic_mi - 0.5 * r.k:+.4f}")
    fit = fit_growth_models(curve, use_analytic=True)
    print(f"power slope {fit.power_slope:.4f} (R2 {fit.power_r2:.4f}); "
          f"log slope {fit.log_slope:.4f} (R2 {fit.log_r2:.4f}); model {fit.model}")


if __name__ == "__main__":
    main()
