import numpy as np
import pytest
from hypothesis import given

from pindelay.errors import NotStronglyConnected
from pindelay.graph import DirectedGraph, PinSet, chain_graph, laplacian
from pindelay.spectral import eigendecompose, undelayed_spectral_abscissa, zero_eigvec_pair

from strategies import connected_systems


@given(connected_systems(max_n=7))
def test_biorthonormal_reconstruction(sys_):
    d = eigendecompose(sys_, 0)
    assert d.diagonalizable
    np.testing.assert_allclose(d.left.T @ d.right, np.eye(sys_.n), atol=1e-9)
    rebuilt = d.right @ np.diag(d.thetas) @ d.left.T
    np.testing.assert_allclose(rebuilt, sys_.L, atol=1e-9)


@given(connected_systems(max_n=7))
def test_pinned_weights_sum_to_one_for_every_node(sys_):
    for p in range(sys_.n):
        assert abs(eigendecompose(sys_, p).weights.sum() - 1.0) < 1e-9


@given(connected_systems(max_n=6))
def test_weights_are_residues_of_the_resolvent(sys_):
    d = eigendecompose(sys_, 0)
    lam = 0.7 + 0.3j
    direct = np.linalg.inv(lam * np.eye(sys_.n) + sys_.L)[0, 0]
    assert abs(direct - np.sum(d.weights / (lam + d.thetas))) < 1e-9


def test_pair_graph_spectrum():
    sys_ = laplacian(DirectedGraph([[0, 1], [1, 0]]))
    d = eigendecompose(sys_, 0)
    np.testing.assert_allclose(d.thetas.real, [0, 2], atol=1e-12)
    np.testing.assert_allclose(d.weights.real, [0.5, 0.5], atol=1e-12)
    assert d.unique_zero and d.real_spectrum and d.zero_index == 0


@given(connected_systems(max_n=7))
def test_left_null_vector_is_positive_stochastic(sys_):
    phi, psi = zero_eigvec_pair(sys_)
    assert np.all(psi > 0) and abs(psi.sum() - 1) < 1e-12
    np.testing.assert_allclose(psi @ sys_.L, 0, atol=1e-10)
    np.testing.assert_array_equal(phi, 1)


def test_zero_eigvec_pair_rejects_chain():
    g = chain_graph(3)
    with pytest.raises(NotStronglyConnected):
        zero_eigvec_pair(laplacian(g), g)


def test_undelayed_abscissa_of_pinned_pair():
    sys_ = laplacian(DirectedGraph([[0, 1], [1, 0]]))
    # -(L + D_0) has eigenvalues -(3 -+ sqrt 5)/2
    val = undelayed_spectral_abscissa(sys_, PinSet((0,), 2), 1.0)
    assert abs(val + (3 - np.sqrt(5)) / 2) < 1e-12
