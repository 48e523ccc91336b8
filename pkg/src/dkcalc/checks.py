"""Seeded numerical checks of the structural identities, one per invariant.

Each check returns a residual (the largest deviation it observed) and passes
when ``residual <= tolerance``.  Every check draws from its own generator,
spawned from the run seed and the check's position in the registry, so the
results do not depend on which other checks run or in which order.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import complex_core as cc
from . import spectral
from .calculus import (
    Form,
    codifferential,
    codifferential_composed,
    codifferential_green,
    coboundary,
    cup,
    green_residual,
    hodge,
    inner_product,
    iota,
)
from .complex_core import DIM, Copy, LatticeSpec
from .dirac_kahler import (
    InhomogeneousForm,
    chiral_project,
    chiral_star,
    dirac_sum,
    iota_inhomogeneous,
    iota_star,
)

SPECTRAL_TOL = {"kernel": 1e-10, "flip": 1e-9, "triviality": spectral.RANK_TOL}


@dataclass
class Context:
    lattice: LatticeSpec
    ghost: LatticeSpec
    seed: int
    trials: int
    tol: float
    masses: List[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])


@dataclass
class CheckResult:
    id: str
    ref: str
    passed: bool
    residual: float
    tolerance: float
    runtime_ms: float

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "ref": self.ref,
            "status": "pass" if self.passed else "fail",
            "residual": self.residual,
            "tolerance": self.tolerance,
            "runtime_ms": self.runtime_ms,
        }


@dataclass
class Check:
    id: str
    ref: str
    fn: Callable[[Context, np.random.Generator], float]
    tolerance: Optional[float] = None  # None: use the run tolerance

    def run(self, ctx: Context, index: int) -> CheckResult:
        rng = np.random.default_rng(np.random.SeedSequence(ctx.seed, spawn_key=(index,)))
        tol = ctx.tol if self.tolerance is None else self.tolerance
        start = time.perf_counter()
        residual = float(self.fn(ctx, rng))
        elapsed = (time.perf_counter() - start) * 1e3
        passed = bool(np.isfinite(residual) and residual <= tol)
        return CheckResult(self.id, self.ref, passed, residual, tol, elapsed)


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _chain_max(chain: cc.Chain) -> float:
    return max((abs(v) for v in chain.terms.values()), default=0.0)


# ---------------------------------------------------------------- complex_core

def levi_civita_product(ctx, rng):
    return max(
        abs(cc.levi_civita(d) * cc.levi_civita_prime(d) - (-1) ** len(d))
        for r in range(DIM + 1) for d in cc.direction_sets(r)
    )


def boundary_squared(ctx, rng):
    worst = 0.0
    for _ in range(ctx.trials):
        for r in range(2, DIM + 1):
            worst = max(worst, _chain_max(cc.boundary(cc.boundary(cc.random_chain(ctx.lattice, r, rng)))))
    return worst


def star_c_square(ctx, rng):
    worst = 0.0
    for _ in range(ctx.trials):
        for r in range(DIM + 1):
            a = cc.random_chain(ctx.lattice, r, rng)
            worst = max(worst, _chain_max(cc.star_c(cc.star_c(a)) - (-1) ** r * a))
    return worst


def star_pairing(ctx, rng):
    """<a~, *omega> = (-1)^r Q <*^c a~, omega>, one basis element at a time."""
    worst = 0.0
    site = tuple(int(rng.integers(1, n + 1)) for n in ctx.lattice.extents)
    for r in range(DIM + 1):
        omega = Form.random(ctx.lattice, DIM - r, rng)
        star_omega = hodge(omega)
        for dirs in cc.direction_sets(r):
            a = cc.Chain.basis(ctx.lattice, site, dirs, Copy.TILDE)
            q = cc.time_sign(cc.complement(dirs))
            lhs = cc.pair(a, star_omega)
            rhs = (-1) ** r * q * cc.pair(cc.star_c(a), omega)
            worst = max(worst, abs(lhs - rhs))
    return worst


def pairing_bilinear(ctx, rng):
    worst = 0.0
    for _ in range(ctx.trials):
        r = int(rng.integers(DIM + 1))
        a, b = cc.random_chain(ctx.lattice, r, rng), cc.random_chain(ctx.lattice, r, rng)
        alpha, beta = rng.uniform(-2, 2, 2)
        omega, eta = Form.random(ctx.lattice, r, rng), Form.random(ctx.lattice, r, rng)
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        worst = max(
            worst,
            abs(cc.pair(alpha * a + beta * b, omega) - alpha * cc.pair(a, omega) - beta * cc.pair(b, omega)),
            abs(cc.pair(a, omega + z * eta) - cc.pair(a, omega) - z * cc.pair(a, eta)),
            abs(cc.pair(a, Form.random(ctx.lattice, (r + 1) % (DIM + 1), rng))),
        )
    return worst


def pairing_adjoint(ctx, rng):
    worst = 0.0
    for _ in range(ctx.trials):
        for r in range(DIM):
            a = cc.random_chain(ctx.lattice, r + 1, rng)
            omega = Form.random(ctx.lattice, r, rng)
            worst = max(worst, abs(cc.pair(cc.boundary(a), omega) - cc.pair(a, coboundary(omega))))
    return worst


def volume_closed(ctx, rng):
    return _chain_max(cc.boundary(cc.build_volume(ctx.lattice)))


# ---------------------------------------------------------------- calculus

def _random_forms(ctx, rng, degrees=range(DIM + 1)):
    for _ in range(ctx.trials):
        for r in degrees:
            yield Form.random(ctx.lattice, r, rng)


def dd_zero(ctx, rng):
    return max(_maxabs(coboundary(coboundary(w)).coeffs) for w in _random_forms(ctx, rng, range(DIM - 1)))


def deltadelta_zero(ctx, rng):
    return max(_maxabs(codifferential(codifferential(w)).coeffs) for w in _random_forms(ctx, rng, range(2, DIM + 1)))


def hodge_square(ctx, rng):
    return max(
        _maxabs(hodge(hodge(w)).coeffs - (-1) ** (w.degree + 1) * w.coeffs) for w in _random_forms(ctx, rng)
    )


def codifferential_agreement(ctx, rng):
    worst = 0.0
    for w in _random_forms(ctx, rng, range(1, DIM + 1)):
        ref = codifferential(w).coeffs
        worst = max(worst, _maxabs(ref - codifferential_composed(w).coeffs),
                    _maxabs(ref - codifferential_green(w).coeffs))
    return worst


def iota_identities(ctx, rng):
    worst = 0.0
    for w in _random_forms(ctx, rng):
        pairs = [
            (iota(iota(w)), w),
            (iota(hodge(w)), hodge(iota(w))),
            (iota(coboundary(w)), coboundary(iota(w))),
            (iota(codifferential(w)), codifferential(iota(w))),
        ]
        for lhs, rhs in pairs:
            if lhs.copy is not rhs.copy:
                return float("inf")
            worst = max(worst, _maxabs(lhs.coeffs - rhs.coeffs))
    return worst


def leibniz(ctx, rng):
    worst = 0.0
    for _ in range(ctx.trials):
        for r in range(DIM + 1):
            for s in range(DIM + 1 - r):
                phi, psi = Form.random(ctx.lattice, r, rng), Form.random(ctx.lattice, s, rng)
                lhs = coboundary(cup(phi, psi))
                rhs = cup(coboundary(phi), psi) + cup(phi, coboundary(psi)) * (-1) ** r
                worst = max(worst, _maxabs(lhs.coeffs - rhs.coeffs))
    return worst


def inner_product_oracle(ctx, rng):
    volume = cc.build_double_volume(ctx.lattice)
    worst = 0.0
    for _ in range(max(1, ctx.trials // 10)):
        for r in range(DIM + 1):
            for s in range(DIM + 1):
                phi, omega = Form.random(ctx.lattice, r, rng), Form.random(ctx.lattice, s, rng)
                direct = inner_product(phi, omega)
                if r != s:
                    if direct != 0:
                        return float("inf")  # mismatched degrees must give exactly zero
                    continue
                worst = max(worst, abs(direct - cc.pair_double(volume, phi, hodge(omega.conj()))))
    return worst


def green_ghost(ctx, rng):
    dvol = cc.boundary_double(cc.build_double_volume(ctx.ghost))
    worst = 0.0
    for _ in range(max(1, ctx.trials // 2)):
        for r in range(1, DIM + 1):
            phi, omega = Form.random(ctx.ghost, r - 1, rng), Form.random(ctx.ghost, r, rng)
            worst = max(worst, abs(green_residual(phi, omega, dvol)))
    return worst


def green_periodic_adjoint(ctx, rng):
    """(d phi, omega)_V = (phi, delta omega)_V on the periodic lattice, without a boundary term."""
    worst = 0.0
    for _ in range(ctx.trials):
        for r in range(1, DIM + 1):
            phi, omega = Form.random(ctx.lattice, r - 1, rng), Form.random(ctx.lattice, r, rng)
            worst = max(worst, abs(inner_product(coboundary(phi), omega) - inner_product(phi, codifferential(omega))))
    return worst


def green_periodic(ctx, rng):
    """Three-term Green identity with the boundary of the double volume, periodic closure."""
    dvol = cc.boundary_double(cc.build_double_volume(ctx.lattice))
    worst = 0.0
    for _ in range(max(1, ctx.trials // 10)):
        for r in range(1, DIM + 1):
            phi, omega = Form.random(ctx.lattice, r - 1, rng), Form.random(ctx.lattice, r, rng)
            worst = max(worst, abs(green_residual(phi, omega, dvol)))
    return worst


# ---------------------------------------------------------------- dirac_kahler

def _random_omegas(ctx, rng):
    for _ in range(ctx.trials):
        yield InhomogeneousForm.random(ctx.lattice, rng)


def star_involution(ctx, rng):
    return max((chiral_star(chiral_star(w)) - w).norm() / w.norm() for w in _random_omegas(ctx, rng))


def anticommutation(ctx, rng):
    worst = 0.0
    for w in _random_omegas(ctx, rng):
        lhs = chiral_star(dirac_sum(w)) + dirac_sum(chiral_star(w))
        worst = max(worst, _maxabs(lhs.to_array()))
    return worst


def projector_algebra(ctx, rng):
    worst = 0.0
    for w in _random_omegas(ctx, rng):
        parts = chiral_project(w)
        plus_again = chiral_project(parts.plus)
        minus_again = chiral_project(parts.minus)
        checks = [
            iota_star(iota_star(w)) - w,
            parts.plus + parts.minus - w,
            plus_again.plus - parts.plus,
            plus_again.minus,
            minus_again.minus - parts.minus,
            minus_again.plus,
            iota_star(parts.plus) - parts.plus,
            iota_star(parts.minus) + parts.minus,
            chiral_project(iota_star(w)).plus - iota_star(parts.plus),
            iota_inhomogeneous(iota_inhomogeneous(w)) - w,
        ]
        worst = max(worst, max(_maxabs(c.to_array()) for c in checks))
    return worst


def _spectral_lattice(ctx):
    if ctx.lattice.n_sites > spectral.DESK_SCALE_SITES:
        raise ValueError("lattice too large for dense spectral checks")
    return ctx.lattice


def chiral_invariance(ctx, rng):
    report = spectral.certify_massless(_spectral_lattice(ctx), threshold=SPECTRAL_TOL["kernel"])
    return max(report.max_residual, report.max_plus, report.max_minus)


def chirality_flip(ctx, rng):
    report = spectral.certify_flip(_spectral_lattice(ctx), threshold=SPECTRAL_TOL["flip"])
    return max((max(r.residual_plus, r.residual_minus) for r in report.records), default=0.0)


def triviality(ctx, rng):
    """Reported as threshold / smallest singular value, so <= 1 passes."""
    report = spectral.certify_triviality(_spectral_lattice(ctx), ctx.masses)
    sigma = min(min(r.sigma_self_dual, r.sigma_anti_self_dual) for r in report.records)
    return spectral.RANK_TOL / sigma if sigma > 0 else float("inf")


CHECKS: List[Check] = [
    Check("calculus.codifferential_agreement", "delta stencils = * d * = (-1)^r *^-1 d *", codifferential_agreement),
    Check("calculus.dd_zero", "d d = 0", dd_zero),
    Check("calculus.deltadelta_zero", "delta delta = 0", deltadelta_zero),
    Check("calculus.green_ghost", "(d phi, w)_V = <dVV, phi x *conj w> + (phi, delta w)_V, ghost lattice", green_ghost),
    Check("calculus.green_periodic", "three-term Green identity, periodic lattice", green_periodic),
    Check("calculus.green_periodic_adjoint", "(d phi, w)_V = (phi, delta w)_V, periodic lattice", green_periodic_adjoint),
    Check("calculus.hodge_square", "** = (-1)^(r+1) on r-forms", hodge_square),
    Check("calculus.inner_product_oracle", "(phi, w)_V = <VV, phi x *conj w>; zero across degrees", inner_product_oracle),
    Check("calculus.iota_identities", "iota^2 = I; iota commutes with *, d, delta", iota_identities),
    Check("calculus.leibniz", "d(phi U psi) = d phi U psi + (-1)^r phi U d psi", leibniz),
    Check("complex_core.boundary_squared", "boundary of boundary = 0", boundary_squared),
    Check("complex_core.levi_civita_product", "eps * eps' = (-1)^r", levi_civita_product),
    Check("complex_core.pairing_adjoint", "<boundary a, w> = <a, d w>", pairing_adjoint),
    Check("complex_core.pairing_bilinear", "pairing bilinear, zero across degrees", pairing_bilinear),
    Check("complex_core.star_c_square", "*c *c = (-1)^r on r-chains", star_c_square),
    Check("complex_core.star_pairing", "<a~, * w> = (-1)^r Q <*c a~, w> per basis element", star_pairing),
    Check("complex_core.volume_closed", "boundary of V = 0 on a periodic lattice", volume_closed),
    Check("dirac_kahler.anticommutation", "star (d + delta) + (d + delta) star = 0", anticommutation),
    Check("dirac_kahler.chiral_invariance", "massless kernel: D Omega+ = D Omega- = 0", chiral_invariance,
          SPECTRAL_TOL["kernel"]),
    Check("dirac_kahler.chirality_flip", "D Omega+ = m Omega-, D Omega- = m Omega+ on eigenpairs", chirality_flip,
          SPECTRAL_TOL["flip"]),
    Check("dirac_kahler.projector_algebra", "(iota star)^2 = I; projectors idempotent, complementary", projector_algebra),
    Check("dirac_kahler.star_involution", "star star = I", star_involution),
    Check("dirac_kahler.triviality", "no (anti-)self-dual solution for m > 0 (sigma_min > 1e-8)", triviality, 1.0),
]
CHECK_IDS: Dict[str, Check] = {c.id: c for c in CHECKS}


def run_checks(ctx: Context, ids=None) -> List[CheckResult]:
    """Run the registered checks (all by default), ordered by check id."""
    chosen = [(i, c) for i, c in enumerate(CHECKS) if ids is None or c.id in ids]
    results = [check.run(ctx, index) for index, check in chosen]
    return sorted(results, key=lambda r: r.id)
