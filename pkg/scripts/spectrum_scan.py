"""Compare the assembled spectrum of D with the Fourier-symbol union on several lattices.

usage: python scripts/spectrum_scan.py [--extents 1,1,1,1 2,2,2,2 3,2,2,2 ...]
"""
import argparse
import time

import numpy as np

from dkcalc import spectral
from dkcalc.complex_core import LatticeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--extents", nargs="+", default=["1,1,1,1", "2,2,2,2", "3,2,2,2", "3,3,2,2"])
    args = ap.parse_args()
    print(f"{'lattice':>10} {'dim':>6} {'distance':>10} {'|lambda|max':>11} {'n_real+':>7} {'kernel':>6} {'secs':>6}")
    for text in args.extents:
        lat = LatticeSpec.periodic(tuple(int(x) for x in text.split(",")))
        t0 = time.perf_counter()
        mat = spectral.matrix_spectrum(lat)
        sym = spectral.symbol_spectrum(lat)
        dist = spectral.match_spectra(mat, sym)
        n_ker = len(spectral.kernel(spectral.assemble(lat, "D")))
        n_pos = len(spectral.real_positive(mat))
        print(f"{text:>10} {mat.size:>6} {dist:>10.2e} {np.abs(mat).max():>11.4f} {n_pos:>7} {n_ker:>6} "
              f"{time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
