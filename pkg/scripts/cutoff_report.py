#!/usr/bin/env python3
"""Report certified Fock cutoffs and photon numbers across a drive scan.

Useful to see how much photon space the out-of-phase configuration needs
compared to the in-phase one, and to sanity-check the convergence ladder.

Example:
    python scripts/cutoff_report.py --g 10 --gamma 1 --eta-max 3
"""

import argparse
import math
import sys

import numpy as np

from hyperrad.model import SystemParams
from hyperrad.steady import converge_cutoff


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--g", type=float, default=10.0)
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--eta-min", type=float, default=0.1)
    parser.add_argument("--eta-max", type=float, default=3.0)
    parser.add_argument("--points", type=int, default=10)
    parser.add_argument("--rel-tol", type=float, default=1e-6)
    args = parser.parse_args(argv)

    print(f"{'eta':>6} | {'cutoff(0)':>9} {'<n>(0)':>10} | {'cutoff(pi)':>10} {'<n>(pi)':>10}")
    for eta in np.linspace(args.eta_min, args.eta_max, args.points):
        results = {}
        for phi in (0.0, math.pi):
            p = SystemParams(g=args.g, gamma=args.gamma, eta=float(eta), phi_z=phi)
            results[phi] = converge_cutoff(p, args.rel_tol)
        r0, rpi = results[0.0], results[math.pi]
        print(
            f"{eta:6.3f} | {r0.cutoff_used:9d} {r0.mean_photon:10.3e} "
            f"| {rpi.cutoff_used:10d} {rpi.mean_photon:10.3e}",
            flush=True,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
