#!/usr/bin/env python3
"""Trace the extremal energy ratio alpha(beta) for a near-degenerate
three-level spectrum at several top-level degeneracies.

Writes one CSV per degeneracy (beta, alpha, bound_inverse, bound_exponential)
and prints the peak ratio against the analytic ceiling.
"""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from npassive.bounds import (
    alpha_max,
    exponential_factor,
    inverse_factor,
    spectral_ratio,
)
from npassive.cli import emit_scan_csv
from npassive.extremal import max_alpha_scan
from npassive.spectra import Spectrum


@dataclass
class ScanConfig:
    N: int = 5
    r: float = 1.001
    degeneracies: tuple[int, ...] = (10**3, 10**6, 10**9)
    beta_grid: tuple[float, ...] = field(
        default_factory=lambda: tuple(np.geomspace(0.5, 200.0, 24))
    )
    resolution: int = 120
    out_dir: Path = Path("out")


def run(cfg: ScanConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for g2 in cfg.degeneracies:
        s = Spectrum.from_levels([(0.0, 1), (1.0, 1), (cfg.r, g2)])
        R = spectral_ratio(s)
        rows = max_alpha_scan(s, cfg.N, list(cfg.beta_grid), resolution=cfg.resolution)
        factors = [
            (inverse_factor(R, cfg.N) or float("inf"),
             exponential_factor(row.beta_rho, s.eps_max, R, cfg.N))
            for row in rows
        ]
        path = cfg.out_dir / f"alpha_scan_g{g2}.csv"
        with open(path, "w", newline="") as fh:
            emit_scan_csv(rows, factors, fh)
        peak = max(r.alpha for r in rows)
        ceiling = alpha_max(cfg.N, spectral_ratio(s))
        print(
            f"g2={g2:>12d}  peak alpha={peak:.6f}  "
            f"ceiling={ceiling:.6f}  ({100 * peak / ceiling:.1f}%)  -> {path}"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=5)
    parser.add_argument("--r", type=float, default=1.001)
    parser.add_argument("--out-dir", type=Path, default=Path("out"))
    args = parser.parse_args()
    run(ScanConfig(N=args.n, r=args.r, out_dir=args.out_dir))


if __name__ == "__main__":
    main()
