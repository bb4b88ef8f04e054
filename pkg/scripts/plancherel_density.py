"""Tabulate the spectral measure: continuous density in z, point masses, and the w-c check.

    python3 scripts/plancherel_density.py --q 0.5 --n 1 --m 4 --points 200 > density.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from qradial import QContext
from qradial.asc import build_spectral_measure, measure_quadrature
from qradial.cfun import wc_identity_check
from qradial.laplacian import lambda_of_z


@dataclass(frozen=True)
class DensityConfig:
    q: float = 0.5
    n: int = 1
    m: int = 4
    points: int = 200


def rows(cfg: DensityConfig):
    ctx = QContext(cfg.q, cfg.n, cfg.m)
    measure = build_spectral_measure(ctx)
    theta = np.linspace(0, np.pi, cfg.points + 2)[1:-1]
    for z in np.cos(theta):
        w, c_expr = wc_identity_check(float(z), ctx)
        yield ["cont", z, float(lambda_of_z(z, ctx)), float(measure.continuous_weight(z)), w, c_expr]
    for z, weight in measure.mass_points:
        yield ["mass", z, float(lambda_of_z(z, ctx)), weight, "", ""]
    cont_mass = measure_quadrature(lambda z: np.ones_like(z), measure) - measure.mass_weights.sum()
    print(f"# continuous mass {cont_mass:.12f}, point masses {measure.mass_weights.sum():.12f}", file=sys.stderr)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for f in ("q", "n", "m", "points"):
        default = getattr(DensityConfig, f)
        p.add_argument(f"--{f}", type=type(default), default=default)
    cfg = DensityConfig(**vars(p.parse_args(argv)))
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["type", "z", "lambda", "density", "w", "c_expression"])
    for row in rows(cfg):
        out.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return 0


if __name__ == "__main__":
    sys.exit(main())
