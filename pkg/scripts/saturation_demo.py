#!/usr/bin/env python3
"""Build explicit three-level states that approach the ratio ceiling
N/(N-R) and compare the measured ratio with the fixed-point prediction.
"""

import argparse
from dataclasses import dataclass

from npassive.extremal import saturation_construct


@dataclass
class DemoConfig:
    cases: tuple[tuple[int, int], ...] = ((2, 1), (3, 2), (5, 4))
    fraction: float = 0.9


def run(cfg: DemoConfig) -> None:
    print(f"{'N':>3} {'m':>3} {'ceiling':>9} {'measured':>9} "
          f"{'predicted':>10} {'beta':>9} {'g2':>12}")
    for N, m in cfg.cases:
        res = saturation_construct(N, m, cfg.fraction)
        print(
            f"{N:>3} {m:>3} {res.alpha_max:>9.5f} {res.alpha_measured:>9.5f} "
            f"{res.alpha_pred:>10.5f} {res.beta_rho:>9.3f} "
            f"{res.params.g2:>12d}"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fraction", type=float, default=0.9,
                        help="target fraction of the ratio ceiling")
    args = parser.parse_args()
    run(DemoConfig(fraction=args.fraction))


if __name__ == "__main__":
    main()
