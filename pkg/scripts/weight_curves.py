#!/usr/bin/env python3
"""Trace the centering weights across family parameters.

Produces TSV curves of (v, v1, v2) against the stable index and against the
inverse Gaussian shape at a fixed total concentration; the gamma family only
depends on alpha0, so it gets a curve over alpha0 instead.

Usage: python scripts/weight_curves.py --alpha0 1.0 --out-dir results/
"""
import argparse
from pathlib import Path

import numpy as np

from nidtopics import compute_weights, gamma_family, invgauss_family, stable_family


def trace(path, xs, families, alpha0):
    lines = ["param\tv\tv1\tv2"]
    for x, fam in zip(xs, families):
        w = compute_weights(fam, alpha0)
        lines.append(f"{x:g}\t{w.v:.8f}\t{w.v1:.8f}\t{w.v2:.8f}")
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha0", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=17)
    ap.add_argument("--out-dir", default=".")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    gams = np.linspace(0.1, 0.9, args.points)
    trace(out / "stable_weights.tsv", gams, [stable_family(g) for g in gams],
          args.alpha0)
    lams = np.geomspace(0.05, 20.0, args.points)
    trace(out / "invgauss_weights.tsv", lams, [invgauss_family(l) for l in lams],
          args.alpha0)
    a0s = np.geomspace(0.1, 10.0, args.points)
    lines = ["alpha0\tv\tv1\tv2"]
    for a0 in a0s:
        w = compute_weights(gamma_family(1.0), a0)
        lines.append(f"{a0:g}\t{w.v:.8f}\t{w.v1:.8f}\t{w.v2:.8f}")
    (out / "gamma_weights.tsv").write_text("\n".join(lines) + "\n")
    print(f"wrote {out / 'gamma_weights.tsv'}")


if __name__ == "__main__":
    main()
