"""Numerical verification of span and ideal identities for the tensors
``p (x) (1 - p)`` in finite-dimensional multi-matrix algebras."""

from .algebra import Algebra, Element, Tensor, make_algebra
from .subspace import DEFAULT_TOL, Subspace, TolerancePolicy, relate
from .verify import CLAIMS, Report, run_claim

__all__ = [
    "Algebra",
    "Element",
    "Tensor",
    "make_algebra",
    "Subspace",
    "TolerancePolicy",
    "DEFAULT_TOL",
    "relate",
    "Report",
    "CLAIMS",
    "run_claim",
]
__version__ = "0.1.0"
