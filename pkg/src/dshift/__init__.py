"""Symbolic workbench for shifted symplectic structures on semifree cdgas.

The top level re-exports the entry points most sessions need; the
submodules hold the rest::

    >>> import dshift as ds
    >>> B = ds.parse_presentation("field Q; gen x : 0;")
    >>> T = ds.shifted_cotangent(B, 1, "1/3*x^3")
    >>> ds.verify_symplectic(T.algebra, T.omega, 1).ok
    True
"""
from .cohom import SliceSpec, cohomology
from .cotangent import check_connectivity, cotangent_complex
from .darboux import darboux_pipeline
from .derham import DeRham, VectorField
from .dgmod import DgMap, DgModule, DualityContext, tor_amplitude
from .gca import (AlgebraMap, Generator, GradedRing, Poly, PresentationError, Report,
                  SemifreeCdga, apply_differential, check_presentation, identity_map,
                  localize, mul)
from .shifted import shifted_cotangent, verify_symplectic
from .textio import ParseError, format_poly, format_presentation, parse_presentation
from .witt import surgery_to_lagrangian

__version__ = "0.1.0"

__all__ = [
    "AlgebraMap", "DeRham", "DgMap", "DgModule", "DualityContext", "Generator", "GradedRing",
    "ParseError", "Poly", "PresentationError", "Report", "SemifreeCdga", "SliceSpec",
    "VectorField", "apply_differential", "check_connectivity", "check_presentation",
    "cohomology", "cotangent_complex", "darboux_pipeline", "format_poly", "format_presentation",
    "identity_map", "localize", "mul", "parse_presentation", "shifted_cotangent",
    "surgery_to_lagrangian", "tor_amplitude", "verify_symplectic",
]
