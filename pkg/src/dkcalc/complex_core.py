"""Cubical double complex in four dimensions.

Basis elements of C(4) are tensor products of 1D points ``x`` and edges ``e``.
A basis element is identified by its site ``k`` (a 4-tuple of 1-based lattice
coordinates) and the *direction set*: the sorted tuple of slots that carry an
edge.  The double ``C~(4)`` has the same structure and is distinguished by
the ``copy`` tag.

Chains are sparse (dict based) and only appear on verification paths; forms
are dense and live in :mod:`dkcalc.calculus`.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, Iterator, Mapping, Tuple

DIM = 4

Dirs = Tuple[int, ...]
Site = Tuple[int, int, int, int]


class Copy(str, enum.Enum):
    PLAIN = "plain"
    TILDE = "tilde"

    def flip(self) -> "Copy":
        return Copy.TILDE if self is Copy.PLAIN else Copy.PLAIN


# --------------------------------------------------------------------------
# direction sets

DIRECTION_SETS: Tuple[Tuple[Dirs, ...], ...] = tuple(
    tuple(itertools.combinations(range(DIM), r)) for r in range(DIM + 1)
)
_RANK = {dirs: i for level in DIRECTION_SETS for i, dirs in enumerate(level)}


def direction_sets(degree: int) -> Tuple[Dirs, ...]:
    """Direction sets of ``degree`` in lexicographic order (01,02,03,12,...)."""
    return DIRECTION_SETS[degree]


def rank(dirs: Dirs) -> int:
    """Position of ``dirs`` among the direction sets of its degree."""
    return _RANK[tuple(dirs)]


def n_channels(degree: int) -> int:
    return comb(DIM, degree)


def complement(dirs: Dirs) -> Dirs:
    return tuple(i for i in range(DIM) if i not in dirs)


def check_dirs(dirs: Iterable[int]) -> Dirs:
    dirs = tuple(dirs)
    if any(not 0 <= i < DIM for i in dirs) or any(a >= b for a, b in zip(dirs, dirs[1:])):
        raise ValueError(f"direction set must be strictly increasing in 0..3, got {dirs}")
    return dirs


def permutation_sign(seq: Iterable[int]) -> int:
    """Sign of a permutation given as a sequence of distinct integers."""
    seq = list(seq)
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


def levi_civita(dirs: Dirs) -> int:
    """epsilon: sign of the permutation (dirs, complement(dirs)) of (0,1,2,3)."""
    return permutation_sign(tuple(dirs) + complement(dirs))


def levi_civita_prime(dirs: Dirs) -> int:
    """epsilon': sign of the permutation (complement(dirs), dirs)."""
    return permutation_sign(complement(dirs) + tuple(dirs))


def time_sign(dirs: Dirs) -> int:
    """Lorentz sign Q: -1 when the time slot 0 carries an edge."""
    return -1 if 0 in dirs else 1


# --------------------------------------------------------------------------
# lattice

def _expand_extents(extents) -> Tuple[int, ...]:
    """Accept ``n``, ``n1, n2, n3, n4`` or a single sequence of four extents."""
    if len(extents) == 1 and hasattr(extents[0], "__len__"):
        extents = tuple(extents[0])
    if len(extents) == 1:
        extents = extents * DIM
    return tuple(extents)


@dataclass(frozen=True)
class LatticeSpec:
    """Finite 4D lattice.

    Sites are 1-based.  In ``periodic`` mode coordinates live in ``1..N_i`` and
    wrap; in ``ghost`` mode storage covers ``1..N_i + ghost_margin`` while the
    volume V covers ``1..N_i`` only.
    """

    extents: Tuple[int, int, int, int]
    boundary: str = "periodic"
    ghost_margin: int = 1

    def __post_init__(self):
        extents = tuple(int(n) for n in self.extents)
        object.__setattr__(self, "extents", extents)
        if len(extents) != DIM or any(n < 1 for n in extents):
            raise ValueError(f"extents must be four positive integers, got {self.extents}")
        if self.boundary not in ("periodic", "ghost"):
            raise ValueError(f"boundary must be 'periodic' or 'ghost', got {self.boundary!r}")
        if self.boundary == "ghost" and self.ghost_margin < 1:
            raise ValueError("ghost_margin must be >= 1")

    @classmethod
    def periodic(cls, *extents) -> "LatticeSpec":
        extents = _expand_extents(extents)
        return cls(extents, "periodic")

    @classmethod
    def ghost(cls, *extents, margin: int = 1) -> "LatticeSpec":
        extents = _expand_extents(extents)
        return cls(extents, "ghost", margin)

    @property
    def is_periodic(self) -> bool:
        return self.boundary == "periodic"

    @property
    def storage_shape(self) -> Tuple[int, ...]:
        if self.is_periodic:
            return self.extents
        return tuple(n + self.ghost_margin for n in self.extents)

    @property
    def n_sites(self) -> int:
        out = 1
        for n in self.storage_shape:
            out *= n
        return out

    def volume_sites(self) -> Iterator[Site]:
        """Sites of V in lexicographic order."""
        return itertools.product(*(range(1, n + 1) for n in self.extents))

    def in_storage(self, site: Site) -> bool:
        return all(1 <= k <= n for k, n in zip(site, self.storage_shape))


def shift(site: Site, axis: int, lattice: LatticeSpec) -> Site:
    """tau_axis: add one to coordinate ``axis``."""
    k = list(site)
    k[axis] += 1
    if lattice.is_periodic:
        k[axis] = (k[axis] - 1) % lattice.extents[axis] + 1
    elif not lattice.in_storage(tuple(k)):
        raise IndexError(f"site {tuple(k)} is outside ghost storage {lattice.storage_shape}")
    return tuple(k)


def normalize_site(site: Iterable[int], lattice: LatticeSpec) -> Site:
    site = tuple(int(k) for k in site)
    if lattice.is_periodic:
        return tuple((k - 1) % n + 1 for k, n in zip(site, lattice.extents))
    if not lattice.in_storage(site):
        raise IndexError(f"site {site} is outside ghost storage {lattice.storage_shape}")
    return site


# --------------------------------------------------------------------------
# chains

@dataclass(frozen=True, order=True)
class ChainBasis:
    site: Site
    dirs: Dirs
    copy: Copy = Copy.PLAIN

    @property
    def degree(self) -> int:
        return len(self.dirs)


def _accumulate(terms: Dict, key, value: float) -> None:
    new = terms.get(key, 0.0) + value
    if new == 0.0:
        terms.pop(key, None)
    else:
        terms[key] = new


@dataclass(frozen=True)
class Chain:
    """Sparse real chain in C(4) or C~(4); zero coefficients are never stored."""

    lattice: LatticeSpec
    terms: Mapping[ChainBasis, float] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, lattice: LatticeSpec, items: Iterable[Tuple[ChainBasis, float]]) -> "Chain":
        terms: Dict[ChainBasis, float] = {}
        for basis, coeff in items:
            basis = ChainBasis(normalize_site(basis.site, lattice), check_dirs(basis.dirs), Copy(basis.copy))
            _accumulate(terms, basis, float(coeff))
        return cls(lattice, terms)

    @classmethod
    def basis(cls, lattice: LatticeSpec, site, dirs, copy=Copy.PLAIN) -> "Chain":
        return cls.from_terms(lattice, [(ChainBasis(tuple(site), tuple(dirs), Copy(copy)), 1.0)])

    @property
    def degrees(self) -> set:
        return {b.degree for b in self.terms}

    def items(self):
        """Terms in canonical (lexicographic) order."""
        return sorted(self.terms.items())

    def __add__(self, other: "Chain") -> "Chain":
        return Chain.from_terms(self.lattice, itertools.chain(self.terms.items(), other.terms.items()))

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-1.0) * other

    def __rmul__(self, c: float) -> "Chain":
        return Chain.from_terms(self.lattice, ((b, c * v) for b, v in self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms


def _basis_boundary(basis: ChainBasis, lattice: LatticeSpec):
    """Yield (face, sign) for the boundary of one basis element.

    Expands the tensor Leibniz rule slot by slot: the edge in slot ``i`` picks
    up (-1)^(number of edges before it) and becomes x_{k+1_i} - x_k.
    """
    for pos, axis in enumerate(basis.dirs):
        sign = -1.0 if pos % 2 else 1.0
        face_dirs = basis.dirs[:pos] + basis.dirs[pos + 1:]
        yield ChainBasis(shift(basis.site, axis, lattice), face_dirs, basis.copy), sign
        yield ChainBasis(basis.site, face_dirs, basis.copy), -sign


def boundary(a: Chain) -> Chain:
    """Boundary operator on C(4) (or C~(4)); degree-0 chains map to zero."""
    lattice = a.lattice
    terms: Dict[ChainBasis, float] = {}
    for basis, coeff in a.items():
        for face, sign in _basis_boundary(basis, lattice):
            _accumulate(terms, face, sign * coeff)
    return Chain(lattice, terms)


def star_c_basis(basis: ChainBasis) -> Tuple[ChainBasis, int]:
    """Chain-level star: complement the direction set, swap copy, sign epsilon(dirs)."""
    return ChainBasis(basis.site, complement(basis.dirs), basis.copy.flip()), levi_civita(basis.dirs)


def star_c(a: Chain) -> Chain:
    terms: Dict[ChainBasis, float] = {}
    for basis, coeff in a.items():
        image, sign = star_c_basis(basis)
        _accumulate(terms, image, sign * coeff)
    return Chain(a.lattice, terms)


def build_volume(lattice: LatticeSpec) -> Chain:
    """V: every 4-cell with k_i in 1..N_i, coefficient one."""
    full = tuple(range(DIM))
    return Chain(lattice, {ChainBasis(k, full, Copy.PLAIN): 1.0 for k in lattice.volume_sites()})


# --------------------------------------------------------------------------
# double chains, elements of C(4) (x) C~(4)

@dataclass(frozen=True)
class DoubleChain:
    lattice: LatticeSpec
    terms: Mapping[Tuple[ChainBasis, ChainBasis], float] = field(default_factory=dict)

    def __post_init__(self):
        for a, b in self.terms:
            if a.copy is not Copy.PLAIN or b.copy is not Copy.TILDE:
                raise ValueError("double chain factors must be (plain, tilde)")

    def items(self):
        return sorted(self.terms.items())

    def __add__(self, other: "DoubleChain") -> "DoubleChain":
        terms = dict(self.terms)
        for key, v in other.terms.items():
            _accumulate(terms, key, v)
        return DoubleChain(self.lattice, terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms


def build_V_r(lattice: LatticeSpec, r: int) -> DoubleChain:
    """V_r = sum_k sum_(r) s_k^(r) (x) *^c s_k^(r)."""
    terms = {}
    for k in lattice.volume_sites():
        for dirs in direction_sets(r):
            a = ChainBasis(k, dirs, Copy.PLAIN)
            b, sign = star_c_basis(a)
            terms[(a, b)] = float(sign)
    return DoubleChain(lattice, terms)


def build_double_volume(lattice: LatticeSpec) -> DoubleChain:
    """The full volume double chain, sum of V_r over r = 0..4."""
    out = DoubleChain(lattice, {})
    for r in range(DIM + 1):
        out = out + build_V_r(lattice, r)
    return out


def boundary_double(D: DoubleChain) -> DoubleChain:
    """d(a (x) b) = da (x) b + (-1)^deg(a) a (x) db, extended linearly."""
    lattice = D.lattice
    terms: Dict = {}
    for (a, b), coeff in D.items():
        for face, sign in _basis_boundary(a, lattice):
            _accumulate(terms, (face, b), sign * coeff)
        parity = -1.0 if a.degree % 2 else 1.0
        for face, sign in _basis_boundary(b, lattice):
            _accumulate(terms, (a, face), parity * sign * coeff)
    return DoubleChain(lattice, terms)


# --------------------------------------------------------------------------
# pairing

def _basis_value(basis: ChainBasis, form) -> complex:
    if basis.degree != form.degree:
        return 0.0
    idx = tuple(k - 1 for k in basis.site) + (rank(basis.dirs),)
    return form.coeffs[idx]


def pair(a: Chain, form) -> complex:
    """<a, form>: chain-cochain pairing, accumulated in canonical term order."""
    if any(b.copy is not form.copy for b in a.terms):
        raise ValueError(f"cannot pair chain with a {form.copy.value} form across copies")
    total = 0j
    for basis, coeff in a.items():
        total += coeff * _basis_value(basis, form)
    return total


def pair_double(D: DoubleChain, phi, psi) -> complex:
    """<D, phi (x) psi> = sum coeff <a, phi> <b, psi>."""
    if phi.copy is not Copy.PLAIN or psi.copy is not Copy.TILDE:
        raise ValueError("pair_double expects phi in the plain copy and psi in the tilde copy")
    total = 0j
    for (a, b), coeff in D.items():
        if a.degree != phi.degree or b.degree != psi.degree:
            continue
        total += coeff * _basis_value(a, phi) * _basis_value(b, psi)
    return total


def random_chain(lattice: LatticeSpec, degree: int, rng, n_terms: int = 8,
                 copy: Copy = Copy.PLAIN) -> Chain:
    """Sparse chain of one degree with small integer coefficients on sites of V."""
    sets = direction_sets(degree)
    items = []
    for _ in range(n_terms):
        site = tuple(int(rng.integers(1, n + 1)) for n in lattice.extents)
        dirs = sets[int(rng.integers(len(sets)))]
        coeff = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
        items.append((ChainBasis(site, dirs, copy), coeff))
    return Chain.from_terms(lattice, items)
