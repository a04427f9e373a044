"""MU-like bases, linear-inversion tomography and error bounds for N ququarts."""

__version__ = "0.1.0"

from .galois import RingContext, RingElem, ring_context
from .mub import BasisFamily, family_build
from .tomography import ProbabilityTable, born_probabilities, reconstruct_monomial, reconstruct_projector
from .error_analysis import cramer_rao, monte_carlo_table
from .estimator import MuLikeTomography

__all__ = [
    "RingContext", "RingElem", "ring_context", "BasisFamily", "family_build",
    "ProbabilityTable", "born_probabilities", "reconstruct_projector", "reconstruct_monomial",
    "cramer_rao", "monte_carlo_table", "MuLikeTomography",
]
