"""Explicit matrices on periodic lattices, Fourier symbols and dense spectral checks.

Flat indexing is site-major: ``site_rank * 16 + channel`` with the site rank
taken in C order over the storage array and channels grouped by degree at
offsets 0, 1, 5, 11, 15.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment

from .calculus import COBOUNDARY_STENCILS, CODIFFERENTIAL_STENCILS, hodge_sign
from .complex_core import DIM, LatticeSpec, complement, direction_sets, rank
from .dirac_kahler import (
    CHANNEL_OFFSETS,
    InhomogeneousForm,
    chirality_flip_check,
    dk_residual,
    reversion_sign,
)

N_CHANNELS = 16
RANK_TOL = 1e-8
REAL_TOL = 1e-9
# Eigenvalues of D at or below this size count as zero.  Null-cone Fourier
# modes make D nilpotent there, and dense eigensolvers resolve a 2x2 Jordan
# block only to about sqrt(machine epsilon).
ZERO_EIG_TOL = 1e-6
DESK_SCALE_SITES = 81
OPERATORS = ("d", "delta", "D", "iota_star", "P+", "P-", "laplacian")


class UnsupportedModeError(ValueError):
    pass


def channel(degree: int, dirs) -> int:
    return CHANNEL_OFFSETS[degree] + rank(tuple(dirs))


def flat_index(lattice: LatticeSpec, site, degree: int, dirs) -> int:
    """Flat position of component (site, dirs) of the degree-``degree`` part."""
    site_rank = int(np.ravel_multi_index(tuple(k - 1 for k in site), lattice.storage_shape))
    return site_rank * N_CHANNELS + channel(degree, dirs)


def dimension(lattice: LatticeSpec) -> int:
    return N_CHANNELS * lattice.n_sites


def _require_periodic(lattice: LatticeSpec) -> None:
    if not lattice.is_periodic:
        raise UnsupportedModeError("matrix assembly is only defined on periodic lattices")


def _stencil_blocks(which: str):
    """Yield (out_degree, in_degree, table) for the coboundary or codifferential."""
    if which == "d":
        for r, table in COBOUNDARY_STENCILS.items():
            yield r + 1, r, table
    else:
        for r, table in CODIFFERENTIAL_STENCILS.items():
            yield r - 1, r, table


def _assemble_difference_operator(lattice: LatticeSpec, which: str) -> sp.csr_matrix:
    shape = lattice.storage_shape
    sites = np.arange(lattice.n_sites)
    coords = np.unravel_index(sites, shape)
    neighbours = []
    for axis in range(DIM):
        moved = list(coords)
        moved[axis] = (coords[axis] + 1) % shape[axis]
        neighbours.append(np.ravel_multi_index(tuple(moved), shape))
    rows, cols, vals = [], [], []
    for out_deg, in_deg, table in _stencil_blocks(which):
        for o, row in enumerate(table):
            out_ch = CHANNEL_OFFSETS[out_deg] + o
            for sign, axis, src in row:
                in_ch = CHANNEL_OFFSETS[in_deg] + src
                rows += [sites * N_CHANNELS + out_ch] * 2
                cols += [neighbours[axis] * N_CHANNELS + in_ch, sites * N_CHANNELS + in_ch]
                vals += [np.full(sites.size, float(sign)), np.full(sites.size, -float(sign))]
    n = dimension(lattice)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return mat.tocsr().astype(complex)


def hodge_block() -> np.ndarray:
    """The 16x16 per-site matrix of the Hodge star (copy tag dropped)."""
    H = np.zeros((N_CHANNELS, N_CHANNELS))
    for r in range(DIM + 1):
        for dirs in direction_sets(r):
            H[channel(DIM - r, complement(dirs)), channel(r, dirs)] = hodge_sign(dirs)
    return H


def iota_star_block() -> np.ndarray:
    """Per-site matrix of iota~ i * B, an involution on 16 channels."""
    signs = np.concatenate([[reversion_sign(r)] * (CHANNEL_OFFSETS[r + 1] - CHANNEL_OFFSETS[r])
                            for r in range(DIM + 1)])
    return 1j * hodge_block() @ np.diag(signs)


def assemble(lattice: LatticeSpec, which: str) -> sp.csr_matrix:
    """Sparse matrix of an operator on flattened inhomogeneous forms."""
    _require_periodic(lattice)
    if which not in OPERATORS:
        raise ValueError(f"unknown operator {which!r}; choose from {OPERATORS}")
    if which in ("d", "delta"):
        return _assemble_difference_operator(lattice, which)
    if which == "D":
        return 1j * (assemble(lattice, "d") + assemble(lattice, "delta"))
    if which == "laplacian":
        M = assemble(lattice, "D")
        return (M @ M).tocsr()
    eye_sites = sp.identity(lattice.n_sites, format="csr")
    J = sp.kron(eye_sites, sp.csr_matrix(iota_star_block()), format="csr")
    if which == "iota_star":
        return J
    eye = sp.identity(dimension(lattice), dtype=complex, format="csr")
    sign = 1.0 if which == "P+" else -1.0
    return (0.5 * (eye + sign * J)).tocsr()


def apply_matrix(M, omega: InhomogeneousForm) -> InhomogeneousForm:
    return InhomogeneousForm.from_array(omega.lattice, M @ omega.flatten(), omega.copy)


# --------------------------------------------------------------------------
# Fourier symbols

def _symbol_d(theta: Sequence[float]) -> np.ndarray:
    t = np.exp(1j * np.asarray(theta, dtype=float)) - 1.0
    S = np.zeros((N_CHANNELS, N_CHANNELS), dtype=complex)
    for r in range(DIM):
        for out in direction_sets(r + 1):
            for pos, axis in enumerate(out):
                face = out[:pos] + out[pos + 1:]
                S[channel(r + 1, out), channel(r, face)] += (-1) ** pos * t[axis]
    return S


def fourier_symbol(theta: Sequence[float], which: str = "D") -> np.ndarray:
    """16x16 block of an operator on the plane wave prod_j exp(i theta_j k_j).

    Built from the coboundary rule and the Hodge matrix (delta = * d *), so it
    shares no code with the stencil tables behind :func:`assemble`.
    """
    Sd = _symbol_d(theta)
    H = hodge_block()
    Sdelta = H @ Sd @ H
    if which == "d":
        return Sd
    if which == "delta":
        return Sdelta
    if which == "D":
        return 1j * (Sd + Sdelta)
    if which == "laplacian":
        return -(Sd @ Sdelta + Sdelta @ Sd)
    raise ValueError(f"no symbol for {which!r}")


def lattice_modes(lattice: LatticeSpec):
    """All admissible wave vectors theta_j = 2 pi n_j / N_j."""
    _require_periodic(lattice)
    ranges = [2 * np.pi * np.arange(n) / n for n in lattice.extents]
    return [np.array(theta) for theta in itertools.product(*ranges)]


def cluster_average(values: np.ndarray, tol: float = ZERO_EIG_TOL) -> np.ndarray:
    """Replace every eigenvalue by the mean of its cluster (single linkage at ``tol``).

    Individual eigenvalues of a perturbed Jordan block scatter by about
    sqrt(eps), but their mean (the trace over the invariant subspace) stays
    accurate to round-off.
    """
    values = np.asarray(values, dtype=complex)
    n = values.size
    labels = np.arange(n)
    close = np.abs(values[:, None] - values[None, :]) <= tol
    changed = True
    while changed:
        # propagate the smallest label through each connected component
        new = np.where(close, labels[None, :], n).min(axis=1)
        changed = bool(np.any(new != labels))
        labels = new
    out = np.empty_like(values)
    for label in np.unique(labels):
        members = labels == label
        out[members] = values[members].mean()
    return out


def symbol_spectrum(lattice: LatticeSpec, which: str = "D") -> np.ndarray:
    """Union over all lattice modes of the symbol eigenvalues, cluster-averaged per mode."""
    return np.concatenate([
        cluster_average(np.linalg.eigvals(fourier_symbol(th, which))) for th in lattice_modes(lattice)
    ])


def match_spectra(a: np.ndarray, b: np.ndarray) -> float:
    """Largest pairwise distance of the optimal one-to-one matching of two multisets."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return float("inf")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if a.size else 0.0


# --------------------------------------------------------------------------
# dense solvers

def _check_desk_scale(lattice: LatticeSpec) -> None:
    if lattice.n_sites > DESK_SCALE_SITES:
        raise ValueError(
            f"{lattice.n_sites} sites exceeds the dense desk-scale cap of {DESK_SCALE_SITES} (3^4)"
        )


def kernel(M, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal null-space basis (rows), singular values <= tol * sigma_max."""
    A = M.toarray() if sp.issparse(M) else np.asarray(M)
    _, s, vh = scipy.linalg.svd(A)
    if s.size == 0 or s[0] == 0.0:
        return vh.conj()
    null = s <= tol * s[0]
    return vh[null].conj()


def spectrum(lattice: LatticeSpec):
    """Dense eigen-decomposition of D: (eigenvalues, eigenvectors as columns)."""
    _require_periodic(lattice)
    _check_desk_scale(lattice)
    return np.linalg.eig(assemble(lattice, "D").toarray())


def matrix_spectrum(lattice: LatticeSpec) -> np.ndarray:
    """Cluster-averaged eigenvalues of the assembled D."""
    _require_periodic(lattice)
    _check_desk_scale(lattice)
    return cluster_average(np.linalg.eigvals(assemble(lattice, "D").toarray()))


def real_positive(eigenvalues: np.ndarray) -> np.ndarray:
    """Indices of eigenvalues with |Im| <= REAL_TOL and Re above the zero threshold."""
    return np.flatnonzero((np.abs(eigenvalues.imag) <= REAL_TOL) & (eigenvalues.real > ZERO_EIG_TOL))


def distinct_values(values, tol: float = REAL_TOL) -> List[float]:
    """Collapse values within ``tol`` of each other (one eigenspace per cluster)."""
    out: List[float] = []
    for v in sorted(float(x) for x in values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


@dataclass
class StackedRecord:
    mass: float
    sigma_self_dual: float
    sigma_anti_self_dual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return min(self.sigma_self_dual, self.sigma_anti_self_dual) > self.threshold


@dataclass
class TrivialityReport:
    lattice: LatticeSpec
    records: List[StackedRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


def smallest_singular_value(A: np.ndarray) -> float:
    return float(scipy.linalg.svdvals(A)[-1])


def certify_triviality(lattice: LatticeSpec, masses: Sequence[float], threshold: float = RANK_TOL,
                   include_spectrum: bool = True) -> TrivialityReport:
    """Smallest singular values of [D - m I ; I -/+ iota_star] for every mass.

    A self-dual or anti-self-dual solution of D Omega = m Omega with m > 0
    would make the corresponding stacked matrix rank deficient.
    """
    _require_periodic(lattice)
    _check_desk_scale(lattice)
    masses = list(masses)
    if not masses:
        raise ValueError("certify_triviality needs at least one mass")
    if any(m <= 0 for m in masses):
        raise ValueError("masses must be strictly positive")
    D = assemble(lattice, "D").toarray()
    if include_spectrum:
        eigenvalues = np.linalg.eigvals(D)
        masses += [eigenvalues[i].real for i in real_positive(eigenvalues)]
    J = assemble(lattice, "iota_star").toarray()
    eye = np.eye(D.shape[0])
    report = TrivialityReport(lattice)
    for m in distinct_values(masses):
        shifted = D - m * eye
        report.records.append(StackedRecord(
            mass=m,
            sigma_self_dual=smallest_singular_value(np.vstack([shifted, eye - J])),
            sigma_anti_self_dual=smallest_singular_value(np.vstack([shifted, eye + J])),
            threshold=threshold,
        ))
    return report


@dataclass
class FlipRecord:
    eigenvalue: complex
    eigen_residual: float
    residual_plus: float
    residual_minus: float
    threshold: float

    @property
    def passed(self) -> bool:
        return max(self.residual_plus, self.residual_minus) <= self.threshold


@dataclass
class FlipReport:
    lattice: LatticeSpec
    records: List[FlipRecord] = field(default_factory=list)
    n_eigenvalues: int = 0
    n_complex: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


def certify_flip(lattice: LatticeSpec, threshold: float = 1e-9) -> FlipReport:
    """Check D Omega+ = m Omega- and D Omega- = m Omega+ on every real positive eigenpair."""
    eigenvalues, vectors = spectrum(lattice)
    report = FlipReport(lattice, n_eigenvalues=eigenvalues.size,
                        n_complex=int(np.sum(np.abs(eigenvalues.imag) > REAL_TOL)))
    for i in real_positive(eigenvalues):
        m = float(eigenvalues[i].real)
        omega = InhomogeneousForm.from_array(lattice, vectors[:, i])
        plus, minus = chirality_flip_check(omega, m)
        report.records.append(FlipRecord(complex(eigenvalues[i]), dk_residual(omega, m), plus, minus, threshold))
    return report


@dataclass
class KernelReport:
    lattice: LatticeSpec
    dimension: int
    max_residual: float
    max_plus: float
    max_minus: float
    threshold: float

    @property
    def passed(self) -> bool:
        return max(self.max_residual, self.max_plus, self.max_minus) <= self.threshold


def certify_massless(lattice: LatticeSpec, threshold: float = 1e-10) -> KernelReport:
    """Chiral invariance of the massless equation on the numerical kernel of D."""
    from .dirac_kahler import chiral_project, dk_operator

    _require_periodic(lattice)
    _check_desk_scale(lattice)
    basis = kernel(assemble(lattice, "D"))
    res = plus = minus = 0.0
    for vec in basis:
        omega = InhomogeneousForm.from_array(lattice, vec)
        parts = chiral_project(omega)
        res = max(res, dk_residual(omega, 0.0))
        plus = max(plus, dk_operator(parts.plus).norm())
        minus = max(minus, dk_operator(parts.minus).norm())
    return KernelReport(lattice, len(basis), res, plus, minus, threshold)
