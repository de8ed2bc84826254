"""Indicial roots of the self-dual deformation complex on cylinders
R x Y^3 over constant-curvature cross-sections, with independent numeric
verification of every closed form."""

from . import curvature, fields, indicial, oracle, spectra
from .indicial import (
    IndicialRoot,
    RootCatalog,
    assemble_catalog,
    gluing_window,
    h2plus_predicate,
    spectral_gap,
)
from .spectra import CrossSectionSpec, GroupAction, load_hyperbolic_spectrum

__version__ = "0.1.0"

__all__ = [
    "curvature",
    "fields",
    "indicial",
    "oracle",
    "spectra",
    "CrossSectionSpec",
    "GroupAction",
    "IndicialRoot",
    "RootCatalog",
    "assemble_catalog",
    "gluing_window",
    "h2plus_predicate",
    "spectral_gap",
    "load_hyperbolic_spectrum",
]
