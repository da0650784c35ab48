"""Stability analysis and simulation of pinning-controlled consensus
networks with a transmission delay and a pinning delay."""

__version__ = "0.1.0"

from .errors import DomainError, NumericalError, PinDelayError
from .graph import (
    DirectedGraph, LaplacianSystem, PinningProblem, PinSet, erdos_renyi, laplacian, load_graph,
    random_pins, save_graph,
)

__all__ = [
    "DirectedGraph", "DomainError", "LaplacianSystem", "NumericalError", "PinDelayError",
    "PinSet", "PinningProblem", "erdos_renyi", "laplacian", "load_graph", "random_pins",
    "save_graph", "__version__",
]
