"""Sample one network, look at particle paths and the great-circle fit.

    python3 demos/trajectories_and_circles.py --n 400 --out wiring.svg
"""

import argparse

import numpy as np

from sortnet.embedding import circle_distance, fit_great_circle
from sortnet.measures import ArchTimeT, grid_discrepancy, permutation_measure
from sortnet.network import global_trajectory
from sortnet.render import render_wiring
from sortnet.sampler import RandomSource, sample_network
from sortnet.trajectories import localization_span, max_sine_deviation, sine_fit


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None, help="optional SVG wiring diagram (keep n small)")
    args = p.parse_args()

    net = sample_network(args.n, RandomSource(args.seed))
    print(f"n={net.n}, {net.N} swaps")

    for x in np.linspace(1, net.n, 5).astype(int):
        path, dev = sine_fit(global_trajectory(net, int(x)))
        print(f"particle {x:4d}: amplitude {path.amplitude:.3f}, phase {path.phase:.3f}, sup error {dev:.3f}")
    print(f"worst particle: {max_sine_deviation(net):.3f}, localization span {localization_span(net):.3f}")

    for t in (0.25, 0.5):
        d = grid_discrepancy(permutation_measure(net, t), ArchTimeT(t))
        print(f"t={t}: 10x10 grid discrepancy against the Archimedean law {d:.4f}")

    circ = fit_great_circle(net)
    print(f"great circle: invariants hold {circ.check()}, sup distance / n {circle_distance(net, circ):.3f}")

    if args.out:
        render_wiring(net, args.out)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
