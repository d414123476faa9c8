"""Minimize the particle flux from random starts and compare with sine arcs.

    python3 demos/flux_minimizer.py --a 0.3 --starts 4
"""

import argparse

import numpy as np

from sortnet.flux import FluxPath, flux, minimal_flux_path, minimize_flux_multistart, sine_family_distance


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--starts", type=int, default=4)
    args = p.parse_args()

    t = np.linspace(0, 1, 2001)
    for m in (0.0, 0.5, 0.9):
        print(f"J(m sin(pi t)) at m={m}: {flux(FluxPath(m * np.sin(np.pi * t))):.9f}")
    print(f"J(const 0.6) = {flux(FluxPath(np.full(3, 0.6))):.9f} (sqrt(1 - 0.36) = 0.8)")

    for j, res in enumerate(minimize_flux_multistart(args.a, args.grid, args.starts, seed=0)):
        dist, k = sine_family_distance(res.path, args.a)
        print(f"start {j}: J = {res.value:.7f} after {res.iterations} steps, "
              f"closest arc k = {k:+.3f} at sup distance {dist:.4f}")
        ref = minimal_flux_path(args.a, k, args.grid)
        assert abs(flux(ref) - 1) < 1e-4


if __name__ == "__main__":
    main()
