#!/usr/bin/env python3
"""Maximal non-percolating attack threshold phi' as a function of density.

Prints a CSV of (lambda, phi) pairs: every degree-threshold attack with
phi <= phi' leaves the network without an infinite component.
"""

import argparse
import math
import sys

from geoperc.theory import critical_phi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda-min", type=float, default=1.0)
    ap.add_argument("--lambda-max", type=float, default=60.0)
    ap.add_argument("--step", type=float, default=1.0)
    args = ap.parse_args()

    sys.stdout.write("lambda,phi\n")
    lam = args.lambda_min
    while lam <= args.lambda_max + 1e-9:
        phi = critical_phi(lam)
        sys.stdout.write(f"{lam!r},{'inf' if math.isinf(phi) else int(phi)}\n")
        lam += args.step


if __name__ == "__main__":
    main()
