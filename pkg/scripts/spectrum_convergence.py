"""How the truncated Laplacian's spectrum fills the band as the truncation grows.

For each size, prints the operator norm, the distance of the extreme
eigenvalues from the band edges lambda(-1) and lambda(1), and the distance of
the nearest eigenvalue to each mass-point eigenvalue lambda(z_k).

    python3 scripts/spectrum_convergence.py --q 0.5 --n 1 --m 4
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import numpy as np

from qradial import QContext
from qradial.asc import build_spectral_measure
from qradial.laplacian import lambda_of_z, truncated_spectrum


@dataclass(frozen=True)
class ConvergenceConfig:
    q: float = 0.5
    n: int = 1
    m: int = 4
    sizes: tuple[int, ...] = field(default=(25, 50, 100, 200, 400, 800))


def rows(cfg: ConvergenceConfig):
    ctx = QContext(cfg.q, cfg.n, cfg.m)
    lo, hi = float(lambda_of_z(-1.0, ctx)), float(lambda_of_z(1.0, ctx))
    mass = [float(lambda_of_z(z, ctx)) for z in build_spectral_measure(ctx).mass_z]
    for size in cfg.sizes:
        ev = truncated_spectrum(size, ctx)
        inside = ev[ev <= hi + 1e-6]
        mass_gaps = [float(np.abs(ev - lm).min()) for lm in mass]
        yield [size, float(np.abs(ev).max()), float(inside.min() - lo), float(hi - inside.max())] + mass_gaps


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--sizes", type=int, nargs="+", default=list(ConvergenceConfig.sizes))
    args = p.parse_args(argv)
    cfg = ConvergenceConfig(args.q, args.n, args.m, tuple(args.sizes))
    ctx = QContext(cfg.q, cfg.n, cfg.m)
    n_mass = len(build_spectral_measure(ctx).mass_points)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["size", "norm", "gap_low_edge", "gap_high_edge"] + [f"gap_mass_{k}" for k in range(n_mass)])
    for row in rows(cfg):
        out.writerow([row[0]] + [f"{v:.17g}" for v in row[1:]])
    return 0


if __name__ == "__main__":
    sys.exit(main())
