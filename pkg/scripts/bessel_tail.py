"""Profile of omega(r) * r for the sinc (bessel, d = 1) kernel.

The tail sup of |sin s / s| is of exact order 1/r, so the product hovers
in a band instead of decreasing. Prints the band and the local extrema.

    python scripts/bessel_tail.py --r-min 5 --r-max 50
"""

import argparse

import numpy as np

from betamix.kernels import IsotropicKernel, omega


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--r-min", type=float, default=5.0)
    parser.add_argument("--r-max", type=float, default=50.0)
    parser.add_argument("--steps", type=int, default=451)
    args = parser.parse_args()
    kernel = IsotropicKernel("bessel")
    grid = np.linspace(args.r_min, args.r_max, args.steps)
    profile = np.array([omega(kernel, r) * r for r in grid])
    rises = np.diff(profile) > 0
    print(f"omega(r) * r on [{args.r_min}, {args.r_max}]: min {profile.min():.4f}, max {profile.max():.4f}")
    print(f"increasing on {rises.sum()} of {rises.size} grid steps")
    for r in (5, 10, 20, 50, 100, 1000):
        print(f"  r = {r:5d}: omega * r = {omega(kernel, r) * r:.4f}")


if __name__ == "__main__":
    main()
