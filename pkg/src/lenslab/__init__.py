"""Finite categories, asymmetric delta lenses and proxy pullbacks."""

from .errors import (
    BudgetExceeded,
    CospanMismatch,
    GenerationFailed,
    LensLabError,
    NotAcyclic,
    NotCommuting,
    NotDiscreteOpfibration,
    PreconditionError,
    UnknownIdentifier,
    ValidationError,
    Violation,
)
from .fincat import (
    FinCat,
    Functor,
    cat_pullback,
    category,
    discrete,
    free_category,
    free_product,
    functor,
    interval,
    pairing,
    terminal,
    validate_category,
    validate_functor,
)
from .lens import (
    Cofunctor,
    Lens,
    compose_lens,
    dopf_to_lens,
    free_product_projections,
    identity_lens,
    is_discrete_opfibration,
    is_split_opfibration,
    lens,
    validate_cofunctor,
    validate_lens,
)
from .spans import (
    comparison_lens,
    enumerate_lens_structures,
    is_independent,
    is_split_independent,
    is_sync_minimal,
    split_opfib_factorisation,
    sync_minimal_core,
    verify_universal_property,
)
from .squares import (
    LensCospan,
    LensSpan,
    LensSquare,
    is_commuting_square,
    is_compatible_square,
    proxy_pullback,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CospanMismatch",
    "GenerationFailed",
    "LensLabError",
    "NotAcyclic",
    "NotCommuting",
    "NotDiscreteOpfibration",
    "PreconditionError",
    "UnknownIdentifier",
    "ValidationError",
    "Violation",
    "FinCat",
    "Functor",
    "cat_pullback",
    "category",
    "discrete",
    "free_category",
    "free_product",
    "functor",
    "interval",
    "pairing",
    "terminal",
    "validate_category",
    "validate_functor",
    "Cofunctor",
    "Lens",
    "compose_lens",
    "dopf_to_lens",
    "free_product_projections",
    "identity_lens",
    "is_discrete_opfibration",
    "is_split_opfibration",
    "lens",
    "validate_cofunctor",
    "validate_lens",
    "comparison_lens",
    "enumerate_lens_structures",
    "is_independent",
    "is_split_independent",
    "is_sync_minimal",
    "split_opfib_factorisation",
    "sync_minimal_core",
    "verify_universal_property",
    "LensCospan",
    "LensSpan",
    "LensSquare",
    "is_commuting_square",
    "is_compatible_square",
    "proxy_pullback",
]
