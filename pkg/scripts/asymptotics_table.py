"""Convergence of Phi_l(x) / x^s to the c-function along the grid, in both regimes.

Rows give k and |Phi_l(q^{-2k}) q^{2sk} - c(s)| for each l, with s = l above
the critical line and s = -l-(N-1) below it.

    python3 scripts/asymptotics_table.py --q 0.5 --n 1 --m 2 --kmax 40
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from qradial import QContext
from qradial.cfun import asymptotics_check


@dataclass(frozen=True)
class AsymptoticsConfig:
    q: float = 0.5
    n: int = 1
    m: int = 2
    kmax: int = 40
    ls: tuple[float, ...] = (0.5, 1.0, 2.0)

    def parameters(self, ctx: QContext) -> list[float]:
        below = [-(ctx.N - 1) / 2 - s for s in self.ls]
        return list(self.ls) + below


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--kmax", type=int, default=40)
    p.add_argument("--l", type=float, nargs="+", default=[0.5, 1.0, 2.0], help="offsets from the critical line")
    args = p.parse_args(argv)
    cfg = AsymptoticsConfig(args.q, args.n, args.m, args.kmax, tuple(args.l))
    ctx = QContext(cfg.q, cfg.n, cfg.m)
    ls = cfg.parameters(ctx)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["k"] + [f"err_l={l:g}" for l in ls])
    for k in range(cfg.kmax + 1):
        errs = []
        for l in ls:
            ratio, target = asymptotics_check(l, k, ctx)
            errs.append(abs(ratio - target))
        out.writerow([k] + [f"{e:.17g}" for e in errs])
    return 0


if __name__ == "__main__":
    sys.exit(main())
