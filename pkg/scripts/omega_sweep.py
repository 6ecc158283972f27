"""Sweep Ω over a grid and write A1/g2, f10 and f00 against the Eisenstein values to CSV.

    python scripts/omega_sweep.py --re -0.4 0.4 5 --im 0.9 1.5 4 --out sweep.csv --workers 4
"""
import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ellcommute.baker_akhiezer import compute_xi
from ellcommute.commutant import PrincipalPart, build_commutant
from ellcommute.curve import char_poly, genus, rep_matrix
from ellcommute.elliptic import elliptic_constants
from ellcommute.lame import lame_operator


@dataclass(frozen=True)
class SweepConfig:
    re: tuple = (-0.4, 0.4, 5)
    im: tuple = (0.9, 1.5, 4)
    basepoint: complex = 0.5
    z_order: int = 16
    s_max: int = 6

    def grid(self):
        return [complex(x, y) for y in np.linspace(*self.im[:2], int(self.im[2]))
                for x in np.linspace(*self.re[:2], int(self.re[2]))]


def row(args):
    om, cfg = args
    c = elliptic_constants(om)
    p = lame_operator(2.0, om, cfg.basepoint, cfg.z_order)
    q, a = build_commutant(p, PrincipalPart.monomial(3), compute_xi(p, cfg.basepoint, cfg.s_max))
    curve = char_poly(rep_matrix(p, q))
    ratio = complex(a.A(1)) / c.g2
    return {
        "re_omega": om.real, "im_omega": om.imag,
        "A1_over_g2_re": ratio.real, "A1_over_g2_im": ratio.imag,
        "f10_rel_err": abs(curve.f(1, 0) - c.g2 / 4) / abs(c.g2 / 4),
        "f00_abs_err_over_g2": abs(curve.f(0, 0) - c.g3 / 4) / abs(c.g2),
        "varpi": genus(curve).varpi,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--re", nargs=3, type=float, default=SweepConfig.re, metavar=("LO", "HI", "N"))
    ap.add_argument("--im", nargs=3, type=float, default=SweepConfig.im, metavar=("LO", "HI", "N"))
    ap.add_argument("--out", default="-")
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args(argv)
    cfg = SweepConfig(tuple(a.re), tuple(a.im))
    jobs = [(om, cfg) for om in cfg.grid()]
    if a.workers > 1:
        with ProcessPoolExecutor(a.workers) as ex:
            rows = list(ex.map(row, jobs))
    else:
        rows = [row(j) for j in jobs]
    fh = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    spread = np.ptp([r["A1_over_g2_re"] for r in rows])
    print(f"# {len(rows)} points, spread of A1/g2: {spread:.2e}", file=sys.stderr)


if __name__ == "__main__":
    main()
