"""Size of the boundary term in the Green formula on periodic lattices.

With forward differences in both d and delta the periodic boundary term does
not vanish.  This prints, per degree, the mean plain gap
|(d phi, omega) - (phi, delta omega)| next to the three-term residual that
includes the double-volume boundary pairing.
"""
import argparse

import numpy as np

from dkcalc import calculus as ca
from dkcalc import complex_core as cc
from dkcalc.calculus import Form
from dkcalc.complex_core import LatticeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--extents", default="2,2,2,2")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    lat = LatticeSpec.periodic(tuple(int(x) for x in args.extents.split(",")))
    rng = np.random.default_rng(args.seed)
    dvol = cc.boundary_double(cc.build_double_volume(lat))
    print(f"{'r':>2} {'mean gap':>10} {'max 3-term':>11}")
    for r in range(1, 5):
        gaps, res = [], []
        for _ in range(args.trials):
            phi, omega = Form.random(lat, r - 1, rng), Form.random(lat, r, rng)
            gaps.append(abs(ca.inner_product(ca.coboundary(phi), omega)
                            - ca.inner_product(phi, ca.codifferential(omega))))
            res.append(abs(ca.green_residual(phi, omega, dvol)))
        print(f"{r:>2} {np.mean(gaps):>10.3f} {max(res):>11.2e}")


if __name__ == "__main__":
    main()
