"""Hypothesis strategies shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from pindelay.graph import PinSet, laplacian, random_connected_graph


@st.composite
def connected_systems(draw, max_n=5, weighted=None):
    n = draw(st.integers(2, max_n))
    seed = draw(st.integers(0, 10_000))
    w = draw(st.booleans()) if weighted is None else weighted
    return laplacian(random_connected_graph(n, seed, p=0.6, weighted=w))


@st.composite
def systems_with_pins(draw, max_n=5):
    sys_ = draw(connected_systems(max_n))
    members = draw(st.lists(st.integers(0, sys_.n - 1), min_size=1, max_size=sys_.n, unique=True))
    return sys_, PinSet(tuple(members), sys_.n)


def scalar_system():
    from pindelay.graph import DirectedGraph
    return laplacian(DirectedGraph(np.zeros((1, 1))))
