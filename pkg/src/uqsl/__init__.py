"""Exact verification workbench for q-difference and free-boson realizations
of quantum superalgebras.

The package proves, at bounded polynomial degree or oscillator energy, that
the realized generators satisfy every defining relation with all parameters
(q, weights, level, structure constants) kept fully formal.
"""

__version__ = "0.1.0"

from .ring import (
    LinForm,
    RingElem,
    RingError,
    SymbolTable,
    affine_symbols,
    bracket_symbols,
    finite_symbols,
    verify_bracket_identity,
)
from .structure import RootData, build_root_data, graded_bracket_sign

__all__ = [
    "LinForm",
    "RingElem",
    "RingError",
    "RootData",
    "SymbolTable",
    "affine_symbols",
    "bracket_symbols",
    "build_root_data",
    "finite_symbols",
    "graded_bracket_sign",
    "verify_bracket_identity",
    "__version__",
]
