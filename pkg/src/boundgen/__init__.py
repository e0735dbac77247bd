"""Bounded-length factorizations of unitaries and tail permutations, with certificates."""

from .errors import BoundGenError
from .matrix_core import DEFAULT_TOL, TolerancePolicy, random_unitary
from .projections import CornerContext, Projection, conjugator, meet, support_of
from .tailperm import ClassSet, TailPermutation, set_bijection, shift_permutation
from .words import Certificate, Letter, evaluate, verify
from .finite import (
    Ladder,
    TriplePartition,
    five_factor_decompose,
    ladder_build,
    ladder_express,
    symmetry_factorize,
)
from .sinf import (
    cond_c_express_perm,
    five_factor_decompose_perm,
    involution_certificate,
    involution_factorize,
    support_in,
)
from .chains import ChainOracle, fullness_search
from .assemble import assemble_3nm, symbolic_3nm

__all__ = [
    "BoundGenError", "DEFAULT_TOL", "TolerancePolicy", "random_unitary",
    "CornerContext", "Projection", "conjugator", "meet", "support_of",
    "ClassSet", "TailPermutation", "set_bijection", "shift_permutation",
    "Certificate", "Letter", "evaluate", "verify",
    "Ladder", "TriplePartition", "five_factor_decompose", "ladder_build",
    "ladder_express", "symmetry_factorize",
    "cond_c_express_perm", "five_factor_decompose_perm", "involution_certificate",
    "involution_factorize", "support_in",
    "ChainOracle", "fullness_search", "assemble_3nm", "symbolic_3nm",
]
