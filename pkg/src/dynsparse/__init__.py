"""Dynamic vertex-sparsifier hierarchies for cuts, distances and
effective resistances, with exact oracles for checking every answer."""

from .graph import ChangeEvent, DynamicGraph, EdgeRecord, GraphView

__version__ = "0.1.0"

__all__ = ["ChangeEvent", "DynamicGraph", "EdgeRecord", "GraphView"]
