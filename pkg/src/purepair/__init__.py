"""Exact small-scale toolkit for pure pairs in bigraphs that avoid a forest."""

from __future__ import annotations

__version__ = "0.1.0"

from .bigraph import Bigraph, VertexRef, VertexSet, bicomplement, transpose
from .containment import OrderedTreeBigraph, bicontains, enumerate_ordered_trees
from .parade import Parade, Support

__all__ = [
    "__version__",
    "Bigraph",
    "VertexRef",
    "VertexSet",
    "bicomplement",
    "transpose",
    "OrderedTreeBigraph",
    "bicontains",
    "enumerate_ordered_trees",
    "Parade",
    "Support",
]
