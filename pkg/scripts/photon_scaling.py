#!/usr/bin/env python3
"""Exact steady-state photon number versus chain length.

Solves the steady state at the adaptive Fock cutoff for each L on the
isotropic point (U/J = 1) and fits a straight line to n(L).

Usage:
    python scripts/photon_scaling.py --lmax 6
"""

import argparse
import time

import numpy as np

from xxzlaser.model import SystemParams
from xxzlaser.ness import adaptive_cutoff_ness
from xxzlaser.observables import photon_number


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lmin", type=int, default=2)
    ap.add_argument("--lmax", type=int, default=6)
    ap.add_argument("--u", type=float, default=1.0)
    args = ap.parse_args()

    lengths = list(range(args.lmin, args.lmax + 1))
    photons = []
    for L in lengths:
        t0 = time.time()
        result = adaptive_cutoff_ness(SystemParams(L=L, U=args.u))
        n = photon_number(result.rho)
        photons.append(n)
        print(f"L={L}  n_max={result.chosen_n_max}  n={n:.6f}  "
              f"t={time.time() - t0:.1f}s")

    slope, intercept = np.polyfit(lengths, photons, 1)
    pred = slope * np.asarray(lengths) + intercept
    resid = np.asarray(photons) - pred
    ss_tot = np.sum((photons - np.mean(photons)) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot
    print(f"fit: n = {slope:.4f} L + {intercept:+.4f}   R^2 = {r2:.6f}")


if __name__ == "__main__":
    main()
