"""Exact discrete complexity of sets: constructions, cover complexity and fusion."""

from __future__ import annotations

from .core import DiscreteSpace, GroundMismatch, GroundSet, Subset, relativize, set_algebra
from .constructions import (
    Construction, CyclicSequence, RuleSet, evaluate, evaluate_cyclic, unfold_cyclic,
)
from .fusion import Lambda, SemiFilter, compile_lambda, extract_lambda, verify_lambda
from .spaces import make_generators, neq, chessboard

__version__ = "0.1.0"

__all__ = [
    "Construction", "CyclicSequence", "DiscreteSpace", "GroundMismatch", "GroundSet", "Lambda",
    "RuleSet", "SemiFilter", "Subset", "chessboard", "compile_lambda", "evaluate",
    "evaluate_cyclic", "extract_lambda", "make_generators", "neq", "relativize", "set_algebra",
    "unfold_cyclic", "verify_lambda",
]
