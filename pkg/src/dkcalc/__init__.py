"""Discrete Dirac-Kahler calculus on a periodic or ghost-bounded 4D cubical double complex."""
from .complex_core import Chain, ChainBasis, Copy, LatticeSpec
from .calculus import Form, codifferential, coboundary, cup, hodge, inner_product, iota, laplacian
from .dirac_kahler import InhomogeneousForm, chiral_project, chiral_star, dk_operator, iota_star

__all__ = [
    "Chain", "ChainBasis", "Copy", "LatticeSpec", "Form", "InhomogeneousForm",
    "coboundary", "codifferential", "cup", "hodge", "inner_product", "iota", "laplacian",
    "chiral_project", "chiral_star", "dk_operator", "iota_star",
]
