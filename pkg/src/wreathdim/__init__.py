"""Dimension quotients of layered subgroups of iterated wreath products."""

from .construction import (
    ExplicitLayer,
    LayerParams,
    explicit_layers,
    layer_recursion,
    select_invariant_orbit_union,
    verify_layer,
)
from .dimension import DimensionTrace, claim_diagnostics, dimension_trace, growth_diagnostics
from .sequences import PermGroupSpec, SequenceSpec, goodness_check, log_order, standard_generators

__version__ = "0.1.0"

__all__ = [
    "DimensionTrace",
    "ExplicitLayer",
    "LayerParams",
    "PermGroupSpec",
    "SequenceSpec",
    "claim_diagnostics",
    "dimension_trace",
    "explicit_layers",
    "goodness_check",
    "growth_diagnostics",
    "layer_recursion",
    "log_order",
    "select_invariant_orbit_union",
    "standard_generators",
    "verify_layer",
]
