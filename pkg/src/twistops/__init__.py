"""Doubly twisted isometries: words, truncated representations, Wold decompositions,
classification of irrational pairs and K-groups of the universal algebras."""

__version__ = "0.1.0"

from .angles import GOLDEN, SQRT2_MINUS_1, Angle, parse_angle
from .classify import DirectSum, Single, classify_pair, classify_U_twisted, isomorphic
from .errors import (
    ProximityWarning,
    RelationError,
    StabilizationWarning,
    TwistOpsError,
    UnsupportedParameterError,
    ValidationError,
)
from .fock import (
    Representation,
    Truncation,
    build_fock,
    build_irrep,
    build_scalar_rep,
    relation_residuals,
)
from .gallery import build as build_example
from .ktheory import (
    FgAbelian,
    extension_solve,
    k_of_class,
    k_universal,
    k_universal_recursive,
    pv_crossed,
    smith_normal_form,
)
from .relations import NormalWord, Signature, normal_form, parse_word, words_equal
from .spectral import joint_spectrum, spectral_projections, universal_tuple_report
from .structured import ShiftBlock, StructuredOp, verify_twisted, wold_decompose

__all__ = [
    "Angle", "parse_angle", "GOLDEN", "SQRT2_MINUS_1",
    "Signature", "NormalWord", "parse_word", "normal_form", "words_equal",
    "Truncation", "Representation", "build_fock", "build_scalar_rep", "build_irrep", "relation_residuals",
    "ShiftBlock", "StructuredOp", "verify_twisted", "wold_decompose",
    "joint_spectrum", "spectral_projections", "universal_tuple_report",
    "Single", "DirectSum", "classify_pair", "classify_U_twisted", "isomorphic",
    "FgAbelian", "smith_normal_form", "pv_crossed", "extension_solve",
    "k_universal", "k_universal_recursive", "k_of_class",
    "build_example",
    "TwistOpsError", "ValidationError", "RelationError", "UnsupportedParameterError",
    "ProximityWarning", "StabilizationWarning",
]
