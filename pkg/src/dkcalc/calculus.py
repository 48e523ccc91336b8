"""Discrete forms on the double complex and the calculus operators on them.

A degree-r form stores one complex coefficient per (site, direction set),
as a dense array of shape ``lattice.storage_shape + (C(4, r),)``.  Array
index ``k - 1`` holds site ``k``.

The coboundary and codifferential are driven by stencil tables: for every
output channel a list of ``(sign, axis, input_channel)`` triples meaning
``sign * Delta_axis omega^input``.  The coboundary table is generated from the
boundary rule; the codifferential table is written out term by term and is
checked against ``* d *`` in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .complex_core import (
    DIM,
    Copy,
    LatticeSpec,
    complement,
    direction_sets,
    levi_civita,
    n_channels,
    rank,
    time_sign,
)

Stencil = List[List[Tuple[int, int, int]]]


@dataclass(frozen=True, eq=False)
class Form:
    degree: int
    copy: Copy
    lattice: LatticeSpec
    coeffs: np.ndarray

    def __post_init__(self):
        if not 0 <= self.degree <= DIM:
            raise ValueError(f"degree must be in 0..4, got {self.degree}")
        expected = self.lattice.storage_shape + (n_channels(self.degree),)
        if self.coeffs.shape != expected:
            raise ValueError(f"coeffs shape {self.coeffs.shape} != {expected}")
        object.__setattr__(self, "copy", Copy(self.copy))

    @classmethod
    def zeros(cls, lattice: LatticeSpec, degree: int, copy=Copy.PLAIN) -> "Form":
        shape = lattice.storage_shape + (n_channels(degree),)
        return cls(degree, Copy(copy), lattice, np.zeros(shape, dtype=complex))

    @classmethod
    def random(cls, lattice: LatticeSpec, degree: int, rng: np.random.Generator,
               copy=Copy.PLAIN) -> "Form":
        """Independent channels, real and imaginary parts uniform in [-1, 1]."""
        shape = lattice.storage_shape + (n_channels(degree),)
        coeffs = rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)
        return cls(degree, Copy(copy), lattice, coeffs)

    @classmethod
    def basis(cls, lattice: LatticeSpec, site, dirs, copy=Copy.PLAIN, value=1.0) -> "Form":
        """The dual basis element s^k_(dirs) (indicator of one cell)."""
        form = cls.zeros(lattice, len(dirs), copy)
        form.coeffs[tuple(k - 1 for k in site) + (rank(tuple(dirs)),)] = value
        return form

    def component(self, site, dirs) -> complex:
        return self.coeffs[tuple(k - 1 for k in site) + (rank(tuple(dirs)),)]

    def with_coeffs(self, coeffs: np.ndarray) -> "Form":
        return Form(self.degree, self.copy, self.lattice, coeffs)

    def _check_compatible(self, other: "Form") -> None:
        if (self.degree, self.copy, self.lattice) != (other.degree, other.copy, other.lattice):
            raise ValueError("forms differ in degree, copy or lattice")

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __neg__(self) -> "Form":
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, c) -> "Form":
        return self.with_coeffs(c * self.coeffs)

    __rmul__ = __mul__

    def conj(self) -> "Form":
        return self.with_coeffs(self.coeffs.conj())

    def interior(self) -> np.ndarray:
        """Coefficients on the sites of V (k_i in 1..N_i)."""
        return self.coeffs[tuple(slice(0, n) for n in self.lattice.extents)]


def forward(values: np.ndarray, axis: int, lattice: LatticeSpec) -> np.ndarray:
    """values[k + 1_axis]; periodic wrap, or zero beyond ghost storage."""
    if lattice.is_periodic:
        return np.roll(values, -1, axis=axis)
    out = np.zeros_like(values)
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    src[axis] = slice(1, None)
    dst[axis] = slice(0, -1)
    out[tuple(dst)] = values[tuple(src)]
    return out


def difference(form: Form, axis: int) -> np.ndarray:
    """Delta_axis omega_k = omega_{tau_axis k} - omega_k, channel by channel.

    In ghost mode the last storage layer along ``axis`` has no neighbour and
    reads zero there.
    """
    return forward(form.coeffs, axis, form.lattice) - form.coeffs


def _coboundary_stencil(r: int) -> Stencil:
    """(d omega)^I = sum_p (-1)^p Delta_{I[p]} omega^{I without I[p]}."""
    table = []
    for out in direction_sets(r + 1):
        row = []
        for pos, axis in enumerate(out):
            face = out[:pos] + out[pos + 1:]
            row.append((-1 if pos % 2 else 1, axis, rank(face)))
        table.append(row)
    return table


COBOUNDARY_STENCILS: Dict[int, Stencil] = {r: _coboundary_stencil(r) for r in range(DIM)}


def _table(rows: Dict[str, List[Tuple[int, int, str]]], out_degree: int) -> Stencil:
    def parse(s: str):
        return tuple(int(c) for c in s)

    table = []
    for out in direction_sets(out_degree):
        key = "".join(map(str, out))
        table.append([(sign, axis, rank(parse(src))) for sign, axis, src in rows[key]])
    return table


# delta^c on degree r, written out channel by channel (input degree -> rows)
CODIFFERENTIAL_STENCILS: Dict[int, Stencil] = {
    1: _table({
        "": [(+1, 0, "0"), (-1, 1, "1"), (-1, 2, "2"), (-1, 3, "3")],
    }, 0),
    2: _table({
        "0": [(+1, 1, "01"), (+1, 2, "02"), (+1, 3, "03")],
        "1": [(+1, 0, "01"), (+1, 2, "12"), (+1, 3, "13")],
        "2": [(+1, 0, "02"), (-1, 1, "12"), (+1, 3, "23")],
        "3": [(+1, 0, "03"), (-1, 1, "13"), (-1, 2, "23")],
    }, 1),
    3: _table({
        "01": [(-1, 2, "012"), (-1, 3, "013")],
        "02": [(+1, 1, "012"), (-1, 3, "023")],
        "03": [(+1, 1, "013"), (+1, 2, "023")],
        "12": [(+1, 0, "012"), (-1, 3, "123")],
        "13": [(+1, 0, "013"), (+1, 2, "123")],
        "23": [(+1, 0, "023"), (-1, 1, "123")],
    }, 2),
    4: _table({
        "012": [(+1, 3, "0123")],
        "013": [(-1, 2, "0123")],
        "023": [(+1, 1, "0123")],
        "123": [(+1, 0, "0123")],
    }, 3),
}


def apply_stencil(form: Form, table: Stencil, out_degree: int) -> Form:
    diffs = [difference(form, axis) for axis in range(DIM)]
    out = Form.zeros(form.lattice, out_degree, form.copy)
    for o, row in enumerate(table):
        for sign, axis, src in row:
            out.coeffs[..., o] += sign * diffs[axis][..., src]
    return out


def coboundary(form: Form) -> Form:
    """d^c; the degree-4 case returns the zero 4-form (there is no 5-form)."""
    if form.degree == DIM:
        return Form.zeros(form.lattice, DIM, form.copy)
    return apply_stencil(form, COBOUNDARY_STENCILS[form.degree], form.degree + 1)


def codifferential(form: Form) -> Form:
    """delta^c from the explicit difference stencils; zero on 0-forms."""
    if form.degree == 0:
        return Form.zeros(form.lattice, 0, form.copy)
    return apply_stencil(form, CODIFFERENTIAL_STENCILS[form.degree], form.degree - 1)


def codifferential_composed(form: Form) -> Form:
    """delta^c as the composition * d^c *."""
    if form.degree == 0:
        return Form.zeros(form.lattice, 0, form.copy)
    return hodge(coboundary(hodge(form)))


def hodge_inverse(form: Form) -> Form:
    """*^{-1} = (-1)^{r+1} * on degree-r forms."""
    return hodge(form) * (-1.0 if form.degree % 2 == 0 else 1.0)


def codifferential_green(form: Form) -> Form:
    """delta^c as (-1)^r *^{-1} d^c * on degree-r forms."""
    if form.degree == 0:
        return Form.zeros(form.lattice, 0, form.copy)
    sign = -1.0 if form.degree % 2 else 1.0
    return hodge_inverse(coboundary(hodge(form))) * sign


def hodge_sign(dirs) -> int:
    """Sign of * on the basis element with direction set ``dirs``: Q * epsilon."""
    return time_sign(dirs) * levi_civita(dirs)


def hodge(form: Form) -> Form:
    """Hodge star K^r -> K~^(4-r) (and back), keeping the Lorentz signature."""
    out = Form.zeros(form.lattice, DIM - form.degree, form.copy.flip())
    for dirs in direction_sets(form.degree):
        out.coeffs[..., rank(complement(dirs))] = hodge_sign(dirs) * form.coeffs[..., rank(dirs)]
    return out


def iota(form: Form) -> Form:
    """Copy swap K^r <-> K~^r; the coefficients are shared."""
    return Form(form.degree, form.copy.flip(), form.lattice, form.coeffs)


def cup_sign(first: Tuple[int, ...], second: Tuple[int, ...]) -> int:
    """Interchange sign of the tensor extension of the 1D cup product.

    Moving each edge of ``second`` past the edges of ``first`` sitting in
    later slots costs a factor -1, so the sign is (-1)^#{(i, j): i in first,
    j in second, i > j}.  This is the only place the convention lives.
    """
    swaps = sum(1 for i in first for j in second if i > j)
    return -1 if swaps % 2 else 1


def cup(phi: Form, psi: Form) -> Form:
    """Cup product phi U psi.

    Slot by slot: x U x = x, x U e = e at the same site, e U x needs the
    second factor at the shifted site; e U e vanishes.  Hence
    (phi U psi)^{I+J}_k = sign * phi^I_k * psi^J_{k + sum_{i in I} 1_i}.
    """
    if phi.copy is not psi.copy or phi.lattice != psi.lattice:
        raise ValueError("cup product needs forms of the same copy and lattice")
    degree = phi.degree + psi.degree
    if degree > DIM:
        return Form.zeros(phi.lattice, DIM, phi.copy)
    out = Form.zeros(phi.lattice, degree, phi.copy)
    for I in direction_sets(phi.degree):
        shifted = psi.coeffs
        for axis in I:
            shifted = forward(shifted, axis, phi.lattice)
        for J in direction_sets(psi.degree):
            if set(I) & set(J):
                continue
            target = rank(tuple(sorted(I + J)))
            out.coeffs[..., target] += cup_sign(I, J) * phi.coeffs[..., rank(I)] * shifted[..., rank(J)]
    return out


def inner_product(phi: Form, omega: Form) -> complex:
    """(phi, omega)_V = sum_k sum_dirs Q(dirs) phi_k^dirs conj(omega_k^dirs).

    Sums run over the sites of V only; forms of different degree give 0.
    """
    if phi.copy is not omega.copy:
        raise ValueError("inner product needs forms of the same copy")
    if phi.degree != omega.degree:
        return 0j
    signs = np.array([time_sign(d) for d in direction_sets(phi.degree)], dtype=float)
    terms = phi.interior() * omega.interior().conj() * signs
    return complex(terms.ravel().sum())


def laplacian(form: Form) -> Form:
    """-(d^c delta^c + delta^c d^c)."""
    a = coboundary(codifferential(form)) if form.degree > 0 else Form.zeros(form.lattice, 0, form.copy)
    b = codifferential(coboundary(form)) if form.degree < DIM else Form.zeros(form.lattice, DIM, form.copy)
    return -(a + b)


def green_residual(phi: Form, omega: Form, boundary_volume=None) -> complex:
    """(d phi, omega)_V - (phi, delta omega)_V - <dVV, phi (x) *conj(omega)>.

    ``boundary_volume`` may pass a precomputed boundary of the double volume
    chain to avoid rebuilding it on every call.
    """
    from .complex_core import boundary_double, build_double_volume, pair_double

    if omega.degree != phi.degree + 1:
        raise ValueError("green_residual expects phi of degree r-1 and omega of degree r")
    if boundary_volume is None:
        boundary_volume = boundary_double(build_double_volume(phi.lattice))
    lhs = inner_product(coboundary(phi), omega)
    rhs = inner_product(phi, codifferential(omega))
    edge = pair_double(boundary_volume, phi, hodge(omega.conj()))
    return lhs - rhs - edge
