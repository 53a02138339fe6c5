"""Net rewriting engine: renetting systems, block homomorphisms, transducers."""

from .net import IN, OUT, Net, Symbol, build_net, frontier, sym
from .jungle import Jungle
from .canon import canonical_form, is_isomorphic

__all__ = [
    "IN",
    "OUT",
    "Net",
    "Symbol",
    "Jungle",
    "build_net",
    "canonical_form",
    "frontier",
    "is_isomorphic",
    "sym",
]
