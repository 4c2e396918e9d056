"""Exact coefficients against every bound on the two-site kernel [[a, c], [c, a]].

    python scripts/two_site_tightness.py --a 0.5 --out two_site.csv
"""

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from betamix import DiscreteDPP, GroundSpace, mixing_report


@dataclass
class Config:
    a: float = 0.5
    c_max: float = 0.45
    steps: int = 9
    out: str | None = None


def run(cfg: Config) -> list[dict]:
    rows = []
    for c in np.linspace(cfg.c_max / cfg.steps, cfg.c_max, cfg.steps):
        dpp = DiscreteDPP(GroundSpace.line(2), [[cfg.a, c], [c, cfg.a]])
        rep = mixing_report(dpp, [0], [1])
        rows.append(
            {
                "c": c,
                "beta": rep.beta_exact,
                "alpha": rep.alpha_exact,
                "lower": rep.lower_bound_dpp,
                "intensity_bound": rep.bound_theorem1,
                "dpp_general": rep.bound_dpp_general,
                "ratio": rep.bound_theorem1 / rep.beta_exact,
            }
        )
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--a", type=float, default=Config.a)
    parser.add_argument("--c-max", type=float, default=Config.c_max)
    parser.add_argument("--steps", type=int, default=Config.steps)
    parser.add_argument("--out")
    cfg = Config(**vars(parser.parse_args()))
    rows = run(cfg)
    handle = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    writer = csv.DictWriter(handle, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if cfg.out:
        handle.close()


if __name__ == "__main__":
    main()
