"""Local swap rates and particle speeds near the middle of a large network.

Only the first few thousand swaps are sampled, so n in the thousands is cheap.

    python3 demos/local_speeds.py --n 2000 --networks 20
"""

import argparse

import numpy as np
from scipy import stats

from sortnet.local import center_rates, pooled_speeds


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--networks", type=int, default=20)
    p.add_argument("--t", type=float, default=5.0)
    args = p.parse_args()

    W, Q = center_rates(args.n, args.t, args.networks, seed=0)
    print(f"mean swaps at the centre bond {W.mean():.2f} vs 4t/pi = {4 * args.t / np.pi:.2f}")
    print(f"mean swaps of the centre particle {Q.mean():.2f} vs 8t/pi = {8 * args.t / np.pi:.2f}")

    s = pooled_speeds(args.n, 10.0, args.networks, 10, seed=1)
    ks = stats.kstest(s, lambda x: 0.5 + np.arcsin(np.clip(x / np.pi, -1, 1)) / np.pi).statistic
    print(f"{s.size} speeds: mean |s| {np.abs(s).mean():.3f} (arcsine law: 2), KS {ks:.3f}")
    hist, edges = np.histogram(s, bins=8, range=(-np.pi, np.pi))
    for h, a in zip(hist, edges):
        print(f"{a:+.2f} {'#' * int(60 * h / hist.max())}")


if __name__ == "__main__":
    main()
