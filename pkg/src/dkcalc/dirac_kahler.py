"""Inhomogeneous forms, the discrete Dirac-Kahler operator and chirality.

``D = i (d^c + delta^c)`` acts on the sixteen channels per site of an
inhomogeneous form.  The chiral star ``i * B`` maps the plain copy to the
tilde copy; composed with the copy swap it gives the plain-copy involution
``iota_star`` whose +1/-1 eigenspaces are the self-dual and anti-self-dual
forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .calculus import Form, codifferential, coboundary, hodge, iota
from .complex_core import DIM, Copy, LatticeSpec

CHANNEL_OFFSETS = (0, 1, 5, 11, 15, 16)


def reversion_sign(r: int) -> int:
    """(-1)^(r(r-1)/2): +, +, -, -, + for r = 0..4."""
    return -1 if (r * (r - 1) // 2) % 2 else 1


@dataclass(frozen=True, eq=False)
class InhomogeneousForm:
    parts: Tuple[Form, Form, Form, Form, Form]

    def __post_init__(self):
        parts = tuple(self.parts)
        if len(parts) != DIM + 1 or [p.degree for p in parts] != list(range(DIM + 1)):
            raise ValueError("need five parts of degrees 0..4")
        if len({p.copy for p in parts}) != 1 or len({p.lattice for p in parts}) != 1:
            raise ValueError("parts must share copy and lattice")
        object.__setattr__(self, "parts", parts)

    @property
    def lattice(self) -> LatticeSpec:
        return self.parts[0].lattice

    @property
    def copy(self) -> Copy:
        return self.parts[0].copy

    @classmethod
    def zeros(cls, lattice: LatticeSpec, copy=Copy.PLAIN) -> "InhomogeneousForm":
        return cls(tuple(Form.zeros(lattice, r, copy) for r in range(DIM + 1)))

    @classmethod
    def random(cls, lattice: LatticeSpec, rng: np.random.Generator, copy=Copy.PLAIN):
        return cls(tuple(Form.random(lattice, r, rng, copy) for r in range(DIM + 1)))

    @classmethod
    def from_array(cls, lattice: LatticeSpec, values: np.ndarray, copy=Copy.PLAIN):
        """From a site-major array of shape ``storage_shape + (16,)`` or its flattening."""
        values = np.asarray(values, dtype=complex).reshape(lattice.storage_shape + (16,))
        parts = tuple(
            Form(r, copy, lattice, values[..., CHANNEL_OFFSETS[r]:CHANNEL_OFFSETS[r + 1]].copy())
            for r in range(DIM + 1)
        )
        return cls(parts)

    @classmethod
    def homogeneous(cls, form: Form) -> "InhomogeneousForm":
        parts = [Form.zeros(form.lattice, r, form.copy) for r in range(DIM + 1)]
        parts[form.degree] = form
        return cls(tuple(parts))

    def to_array(self) -> np.ndarray:
        return np.concatenate([p.coeffs for p in self.parts], axis=-1)

    def flatten(self) -> np.ndarray:
        """Site-major flat vector: index = site_rank * 16 + channel."""
        return self.to_array().ravel()

    def norm(self) -> float:
        """Euclidean norm over every channel and stored site."""
        return float(np.linalg.norm(self.flatten()))

    def map(self, fn) -> "InhomogeneousForm":
        return InhomogeneousForm(tuple(fn(p) for p in self.parts))

    def __add__(self, other: "InhomogeneousForm") -> "InhomogeneousForm":
        return InhomogeneousForm(tuple(a + b for a, b in zip(self.parts, other.parts)))

    def __sub__(self, other: "InhomogeneousForm") -> "InhomogeneousForm":
        return InhomogeneousForm(tuple(a - b for a, b in zip(self.parts, other.parts)))

    def __mul__(self, c) -> "InhomogeneousForm":
        return self.map(lambda p: p * c)

    __rmul__ = __mul__

    def __neg__(self) -> "InhomogeneousForm":
        return self.map(lambda p: -p)


def antiautomorphism_B(omega: InhomogeneousForm) -> InhomogeneousForm:
    return InhomogeneousForm(tuple(p * reversion_sign(p.degree) for p in omega.parts))


def chiral_star(omega: InhomogeneousForm) -> InhomogeneousForm:
    """i * B Omega; lands in the opposite copy."""
    parts = [None] * (DIM + 1)
    for p in antiautomorphism_B(omega).parts:
        image = hodge(p) * 1j
        parts[image.degree] = image
    return InhomogeneousForm(tuple(parts))


def iota_inhomogeneous(omega: InhomogeneousForm) -> InhomogeneousForm:
    return omega.map(iota)


def iota_star(omega: InhomogeneousForm) -> InhomogeneousForm:
    """iota~ composed with the chiral star: an involution within one copy."""
    return iota_inhomogeneous(chiral_star(omega))


def dirac_sum(omega: InhomogeneousForm) -> InhomogeneousForm:
    """(d^c + delta^c) Omega, degree by degree."""
    parts = []
    for r in range(DIM + 1):
        out = Form.zeros(omega.lattice, r, omega.copy)
        if r >= 1:
            out = out + coboundary(omega.parts[r - 1])
        if r <= DIM - 1:
            out = out + codifferential(omega.parts[r + 1])
        parts.append(out)
    return InhomogeneousForm(tuple(parts))


def dk_operator(omega: InhomogeneousForm) -> InhomogeneousForm:
    """i (d^c + delta^c) Omega.

    Degree r of the result is i (d^c omega^{r-1} + delta^c omega^{r+1});
    missing neighbours in ghost mode read as zero.
    """
    return dirac_sum(omega) * 1j


def dk_residual(omega: InhomogeneousForm, m: float) -> float:
    """Euclidean norm of D Omega - m Omega (a diagnostic, not the Lorentz product)."""
    return (dk_operator(omega) - omega * m).norm()


@dataclass(frozen=True)
class ChiralComponents:
    plus: InhomogeneousForm
    minus: InhomogeneousForm


def chiral_project(omega: InhomogeneousForm) -> ChiralComponents:
    """Omega^(+/-) = (Omega +/- iota~ star Omega) / 2."""
    if omega.copy is not Copy.PLAIN:
        raise ValueError("chiral_project expects a plain-copy form")
    dual = iota_star(omega)
    return ChiralComponents((omega + dual) * 0.5, (omega - dual) * 0.5)


def _duality_defect(omega: InhomogeneousForm, sign: int) -> Tuple[float, float]:
    return (iota_star(omega) - omega * sign).norm(), omega.norm()


def is_self_dual(omega: InhomogeneousForm, tol: float = 1e-12) -> bool:
    defect, size = _duality_defect(omega, +1)
    return defect <= tol * size


def is_anti_self_dual(omega: InhomogeneousForm, tol: float = 1e-12) -> bool:
    defect, size = _duality_defect(omega, -1)
    return defect <= tol * size


def chirality_flip_check(omega: InhomogeneousForm, m: float) -> Tuple[float, float]:
    """Residual norms ||D Omega+ - m Omega-|| and ||D Omega- - m Omega+||."""
    parts = chiral_project(omega)
    return (
        (dk_operator(parts.plus) - parts.minus * m).norm(),
        (dk_operator(parts.minus) - parts.plus * m).norm(),
    )
