from .orbits import (
    DEFAULT_ENUMERATION_CAP,
    Orbit,
    OrbitPartition,
    complement_invariance_agrees,
    describe_generators,
    enumerate_group,
    is_invariant,
    orbit_of_point,
    orbits,
)
from .perm import Permutation, PermGroup, format_cycles, parse_cycles
from .product import (
    DEFAULT_MAX_POINTS,
    ProductDomain,
    base_generators,
    collapse_top_action,
    coordinate_subgroup_generators,
    moved_coordinates,
    top_action_generators,
)

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "DEFAULT_MAX_POINTS",
    "Orbit",
    "OrbitPartition",
    "PermGroup",
    "Permutation",
    "ProductDomain",
    "base_generators",
    "collapse_top_action",
    "complement_invariance_agrees",
    "coordinate_subgroup_generators",
    "describe_generators",
    "enumerate_group",
    "format_cycles",
    "is_invariant",
    "moved_coordinates",
    "orbit_of_point",
    "orbits",
    "parse_cycles",
    "top_action_generators",
]
