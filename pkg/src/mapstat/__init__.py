"""Statistics of uniform random mappings: largest components and largest trees."""

__version__ = "0.1.0"

from .fungraph import (
    Component,
    Decomposition,
    ExtremalStats,
    Mapping,
    Tree,
    decompose,
    extremal_stats,
    validate_mapping,
)
from .sampling import RandomStream, sample_mapping, sample_vertex, sample_vertex_pair

__all__ = [
    "Component",
    "Decomposition",
    "ExtremalStats",
    "Mapping",
    "RandomStream",
    "Tree",
    "decompose",
    "extremal_stats",
    "sample_mapping",
    "sample_vertex",
    "sample_vertex_pair",
    "validate_mapping",
]
