"""Acceptance criteria, each run at its stated size and tolerance.

Every test prints one ``[acceptance] criterion N PASS/FAIL`` line; the lines
are repeated in a summary section at the end of the pytest run.
"""
import json
import time

import numpy as np
import pytest

from dkcalc import calculus as ca
from dkcalc import cli
from dkcalc import complex_core as cc
from dkcalc import dirac_kahler as dk
from dkcalc import spectral as spc
from dkcalc.calculus import Form
from dkcalc.complex_core import LatticeSpec
from dkcalc.dirac_kahler import InhomogeneousForm

TOL = 1e-12
SEED = 20240611


def maxabs(x) -> float:
    arr = x.coeffs if isinstance(x, Form) else (x.flatten() if isinstance(x, InhomogeneousForm) else np.asarray(x))
    return float(np.max(np.abs(arr), initial=0.0))


def test_criterion_01_structural_identities(criterion):
    lat = LatticeSpec.periodic(3)
    rng = np.random.default_rng(SEED)
    worst = {"dd": 0.0, "deltadelta": 0.0, "hodge_square": 0.0, "delta_stencil_vs_*d*": 0.0,
             "delta_stencil_vs_green_form": 0.0, "iota": 0.0}
    start = time.perf_counter()
    for _ in range(100):
        for r in range(5):
            w = Form.random(lat, r, rng)
            if r <= 2:
                worst["dd"] = max(worst["dd"], maxabs(ca.coboundary(ca.coboundary(w))))
            if r >= 2:
                worst["deltadelta"] = max(worst["deltadelta"], maxabs(ca.codifferential(ca.codifferential(w))))
            worst["hodge_square"] = max(worst["hodge_square"], maxabs(ca.hodge(ca.hodge(w)) - w * (-1) ** (r + 1)))
            delta = ca.codifferential(w)
            worst["delta_stencil_vs_*d*"] = max(worst["delta_stencil_vs_*d*"],
                                               maxabs(delta - ca.codifferential_composed(w)))
            worst["delta_stencil_vs_green_form"] = max(worst["delta_stencil_vs_green_form"],
                                                      maxabs(delta - ca.codifferential_green(w)))
            iw = ca.iota(w)
            res = max(maxabs(ca.iota(iw) - w), maxabs(ca.hodge(iw) - ca.iota(ca.hodge(w))))
            if r < 4:
                res = max(res, maxabs(ca.coboundary(iw) - ca.iota(ca.coboundary(w))))
            worst["iota"] = max(worst["iota"], res)
    elapsed = time.perf_counter() - start
    residual = max(worst.values())
    ok = residual <= TOL and elapsed <= 60.0
    criterion(1, "structural identities on periodic 3^4, 100 trials", ok,
              f"max residual {residual:.3e}, runtime {elapsed:.1f} s")
    assert residual <= TOL, worst
    assert elapsed <= 60.0


def test_criterion_02_leibniz(criterion):
    lat = LatticeSpec.periodic(3)
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for r in range(5):
        for s in range(5 - r):
            for _ in range(20):
                phi, psi = Form.random(lat, r, rng), Form.random(lat, s, rng)
                lhs = ca.coboundary(ca.cup(phi, psi))
                rhs = ca.cup(ca.coboundary(phi), psi) + ca.cup(phi, ca.coboundary(psi)) * (-1) ** r
                worst = max(worst, maxabs(lhs - rhs))
    criterion(2, "Leibniz rule, all (r, s) with r + s <= 4, 20 pairs each", worst <= TOL,
              f"max residual {worst:.3e}")
    assert worst <= TOL


def test_criterion_03a_green_formula_ghost(criterion):
    lat = LatticeSpec.ghost(2)
    dvol = cc.boundary_double(cc.build_double_volume(lat))
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for r in range(1, 5):
        for _ in range(50):
            phi, omega = Form.random(lat, r - 1, rng), Form.random(lat, r, rng)
            worst = max(worst, abs(ca.green_residual(phi, omega, dvol)))
    criterion("3a", "three-term Green formula on ghost 2^4, 50 pairs per degree", worst <= TOL,
              f"max residual {worst:.3e}")
    assert worst <= TOL


def test_criterion_03b_periodic_adjointness(criterion):
    # Required as stated: (d phi, omega)_V = (phi, delta omega)_V on a periodic
    # lattice.  With forward differences in both operators this does not hold;
    # the measured residual is reported and the test is left failing.
    lat = LatticeSpec.periodic(2)
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for r in range(1, 5):
        for _ in range(50):
            phi, omega = Form.random(lat, r - 1, rng), Form.random(lat, r, rng)
            gap = ca.inner_product(ca.coboundary(phi), omega) - ca.inner_product(phi, ca.codifferential(omega))
            worst = max(worst, abs(gap))
    criterion("3b", "periodic adjointness (d phi, omega) = (phi, delta omega) on 2^4", worst <= TOL,
              f"max residual {worst:.3e}")
    assert worst <= TOL


def test_criterion_04_inner_product_cross_oracle(criterion):
    rng = np.random.default_rng(SEED + 5)
    worst, mismatched = 0.0, 0.0
    for lat in (LatticeSpec.periodic(3), LatticeSpec.ghost(2)):
        vol = cc.build_double_volume(lat)
        for r in range(5):
            for _ in range(5):
                a, b = Form.random(lat, r, rng), Form.random(lat, r, rng)
                worst = max(worst, abs(ca.inner_product(a, b) - cc.pair_double(vol, a, ca.hodge(b.conj()))))
            for s in range(5):
                if s != r:
                    mismatched = max(mismatched, abs(ca.inner_product(Form.random(lat, r, rng),
                                                                      Form.random(lat, s, rng))))
    ok = worst <= TOL and mismatched == 0.0
    criterion(4, "direct inner product = double-volume pairing; zero across degrees", ok,
              f"max residual {worst:.3e}, mismatched {mismatched:.1e}")
    assert worst <= TOL and mismatched == 0.0


def test_criterion_05_chirality_algebra(criterion):
    lat = LatticeSpec.periodic(3)
    rng = np.random.default_rng(SEED + 6)
    worst = {"star_star": 0.0, "anticommutation": 0.0, "idempotence": 0.0, "complementarity": 0.0}
    for _ in range(100):
        om = InhomogeneousForm.random(lat, rng)
        worst["star_star"] = max(worst["star_star"], maxabs(dk.chiral_star(dk.chiral_star(om)) - om))
        anti = dk.chiral_star(dk.dk_operator(om)) + dk.dk_operator(dk.chiral_star(om))
        worst["anticommutation"] = max(worst["anticommutation"], maxabs(anti))
        parts = dk.chiral_project(om)
        pp, pm = dk.chiral_project(parts.plus), dk.chiral_project(parts.minus)
        worst["idempotence"] = max(worst["idempotence"], maxabs(pp.plus - parts.plus), maxabs(pm.minus - parts.minus))
        worst["complementarity"] = max(worst["complementarity"], maxabs(parts.plus + parts.minus - om),
                                       maxabs(pp.minus), maxabs(pm.plus))
    residual = max(worst.values())
    criterion(5, "star involution, star-D anticommutation, projectors on 100 forms", residual <= TOL,
              f"max residual {residual:.3e}")
    assert residual <= TOL, worst


def test_criterion_06_massless_chiral_invariance(criterion):
    rep = spc.certify_massless(LatticeSpec.periodic(2), threshold=1e-10)
    residual = max(rep.max_residual, rep.max_plus, rep.max_minus)
    criterion(6, "D Omega+/- = 0 on the massless kernel of periodic 2^4", rep.passed and rep.dimension > 0,
              f"kernel dimension {rep.dimension}, max residual {residual:.3e}")
    assert rep.dimension > 0 and rep.passed


def test_criterion_07_chirality_flip(criterion):
    rep = spc.certify_flip(LatticeSpec.periodic(2), threshold=1e-9)
    residual = max((max(r.residual_plus, r.residual_minus) for r in rep.records), default=np.inf)
    criterion(7, "chirality flip on every real positive eigenpair of periodic 2^4",
              rep.passed and bool(rep.records),
              f"{len(rep.records)} eigenpairs, max residual {residual:.3e}")
    assert rep.records and rep.passed


def test_criterion_08_no_definite_chirality_massive_solutions(criterion):
    rep = spc.certify_triviality(LatticeSpec.periodic(2), [0.5, 1.0, 2.0], threshold=1e-8)
    sigma = min(min(r.sigma_self_dual, r.sigma_anti_self_dual) for r in rep.records)
    criterion(8, "stacked [D - m; I -/+ iota star] full rank on periodic 2^4", rep.passed,
              f"{len(rep.records)} masses, smallest singular value {sigma:.3e}")
    assert rep.passed


def test_criterion_09_spectral_consistency(criterion):
    start = time.perf_counter()
    distances = {}
    for extents in ((2, 2, 2, 2), (3, 2, 2, 2)):
        lat = LatticeSpec.periodic(extents)
        distances[extents] = spc.match_spectra(spc.matrix_spectrum(lat), spc.symbol_spectrum(lat))
    elapsed = time.perf_counter() - start
    worst = max(distances.values())
    ok = worst <= 1e-9 and elapsed <= 300.0
    criterion(9, "assembled spectrum = union of Fourier symbol spectra on 2^4 and 3x2x2x2", ok,
              f"max distance {worst:.3e}, runtime {elapsed:.1f} s")
    assert worst <= 1e-9 and elapsed <= 300.0


def test_criterion_10_verify_determinism(criterion, tmp_path):
    out = tmp_path / "verify.json"
    texts = []
    for _ in range(2):
        cli.main(["verify", "--seed", "42", "--out", str(out)])
        texts.append(cli.dumps_report(cli.strip_runtime(json.loads(out.read_text()))))
    same = texts[0] == texts[1]
    criterion(10, "two verify runs with the same seed give identical reports", same,
              f"{len(texts[0])} bytes compared")
    assert same
