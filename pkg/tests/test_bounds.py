import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pindelay.bounds import (
    F_value, a_b_values, lambert_polynomial, lambert_stability_test, min_F_over_omega,
    modulus_double_sum, single_node_tau_pM, tau_p_star, tau_p_star_scan, tau_star_single,
)
from pindelay.charroots import dominant_root
from pindelay.errors import DomainError, EmptyPinSet, NotNormalized
from pindelay.graph import (
    DirectedGraph, PinningProblem, PinSet, chain_graph, laplacian, normalized, random_connected_graph,
)
from pindelay.spectral import eigendecompose
from pindelay.verdict import Verdict

from oracles import critical_tau_p
from strategies import connected_systems, scalar_system

gains = st.floats(0.05, 20)
degrees = st.floats(0.0, 10)
pair = laplacian(DirectedGraph([[0, 1], [1, 0]]))


def test_F_examples():
    assert F_value(0.0, 1.0, 2.0, 0.3) == pytest.approx(1 + 4)
    assert F_value(1.0, 1.0, 0.0, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert F_value(2.0, 3.0, 1.0, 0.0) == pytest.approx(9 + 4 + 6)


def test_min_F_examples():
    w, f = min_F_over_omega(1.0, 0.0, math.pi / 2)
    assert abs(abs(w) - 1) < 1e-6 and abs(f) < 1e-12
    # no delay: F = (w^2 + c^2 + 2cl) >= c^2 + 2cl, attained at w = 0
    w, f = min_F_over_omega(2.0, 1.0, 0.0)
    assert abs(w) < 1e-6 and f == pytest.approx(8.0)


@pytest.mark.parametrize("c, expected", [(1.0, math.pi / 2), (2.0, math.pi / 4), (0.5, math.pi)])
def test_isolated_pinned_node_bound(c, expected):
    assert tau_p_star(c, [0.0]).value == pytest.approx(expected, abs=1e-9)


@given(gains, degrees)
def test_min_F_touches_zero_at_the_bound(c, l):
    H, _ = tau_star_single(c, l)
    assert H <= math.pi / c * (1 + 1e-12)
    _, f_at = min_F_over_omega(c, l, H)
    assert abs(f_at) < 1e-6 * (c * c + c * l + 1)
    _, f_before = min_F_over_omega(c, l, 0.98 * H)
    assert f_before > 0


@given(gains, degrees, st.floats(1.01, 3))
def test_bound_decreases_in_gain_and_degree(c, l, k):
    H = tau_star_single(c, l)[0]
    assert tau_star_single(c * k, l)[0] <= H * (1 + 1e-9)
    assert tau_star_single(c, l * k + 0.01)[0] <= H * (1 + 1e-9)


@settings(max_examples=15)
@given(st.floats(0.2, 5), st.lists(st.floats(0.1, 6), min_size=1, max_size=3))
def test_scan_oracle_agrees(c, degs):
    closed = tau_p_star(c, degs).value
    scan = tau_p_star_scan(c, degs).value
    assert abs(closed - scan) < 1e-5 * max(1.0, closed)


def test_bound_uses_the_worst_pinned_degree():
    r = tau_p_star(1.0, [0.5, 3.0, 1.0])
    assert r.value == pytest.approx(tau_star_single(1.0, 3.0)[0])
    assert r.diagnostics["limiting_degree"] == 3.0


def test_bound_domain():
    with pytest.raises(DomainError):
        tau_p_star(0.0, [1.0])
    with pytest.raises(EmptyPinSet):
        tau_p_star(1.0, [])


@settings(max_examples=10)
@given(connected_systems(max_n=4))
def test_bound_is_sufficient(sys_):
    pins = PinSet((0,), sys_.n)
    star = tau_p_star(1.0, [sys_.K[0]]).value
    for tau_r in (0.0, 0.5):
        assert dominant_root(PinningProblem(sys_, pins, 1.0, tau_r, 0.95 * star)).lam.real < 0


def test_a_b_on_pair_graph():
    a, b = a_b_values(2.0, 1.0, eigendecompose(pair, 0))
    assert a == pytest.approx(1 / 8) and b == pytest.approx(3 / 8)


@given(connected_systems(max_n=6), st.floats(0.05, 30), st.integers(0, 5))
def test_double_sum_identity(sys_, omega, p):
    d = eigendecompose(sys_, p % sys_.n)
    a, b = a_b_values(omega, 1.0, d)
    assert modulus_double_sum(omega, d) == pytest.approx(a * a + b * b, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
def test_tau_pM_singleton(c):
    d = eigendecompose(scalar_system(), 0)
    assert single_node_tau_pM(d, c).value == pytest.approx(math.pi / (2 * c), rel=1e-9)


@pytest.mark.parametrize("sys_, node", [
    (pair, 0),
    (laplacian(DirectedGraph([[0, 1, 0], [1, 0, 1], [0, 1, 0]])), 0),
    (laplacian(DirectedGraph([[0, 1, 0], [1, 0, 1], [0, 1, 0]])), 1),
])
def test_tau_pM_matches_root_crossing(sys_, node):
    value = single_node_tau_pM(eigendecompose(sys_, node), 1.0).value
    oracle = critical_tau_p(sys_, PinSet((node,), sys_.n), 1.0, hi=3 * value)
    assert value == pytest.approx(oracle, abs=1e-6)


def test_tau_pM_is_invariant_to_eigenpair_order():
    sys_ = laplacian(random_connected_graph(5, 3, weighted=True))
    d = eigendecompose(sys_, 2)
    perm = np.array([3, 0, 4, 1, 2])
    from dataclasses import replace
    shuffled = replace(d, thetas=d.thetas[perm], right=d.right[:, perm], left=d.left[:, perm])
    assert single_node_tau_pM(shuffled, 1.3).value == pytest.approx(single_node_tau_pM(d, 1.3).value,
                                                                   rel=1e-12)


def test_lambert_polynomial_singleton():
    np.testing.assert_allclose(lambert_polynomial([0.0], [1.0], 2.0, 0.0), [1.0, 2.0])


@pytest.mark.parametrize("tau, verdict", [(1.0, Verdict.STABLE), (1.6, Verdict.UNSTABLE)])
def test_lambert_singleton(tau, verdict):
    assert lambert_stability_test(scalar_system(), 0, 1.0, tau).verdict is verdict


@settings(max_examples=10)
@given(st.integers(2, 4), st.integers(0, 1000), st.floats(0.5, 8), st.sampled_from([0.1, 0.3, 0.7]))
def test_lambert_dominant_root_matches_charroots(n, seed, c, tau):
    sys_ = laplacian(normalized(random_connected_graph(n, seed, weighted=True), 1.0))
    v = lambert_stability_test(sys_, 0, c, tau)
    root = dominant_root(PinningProblem(sys_, PinSet((0,), n), c, tau, tau)).lam
    assert abs(v.dominant.real - root.real) < 1e-7


def test_lambert_preconditions():
    with pytest.raises(DomainError):
        lambert_stability_test(scalar_system(), 0, 0.0, 1.0)
    with pytest.raises(DomainError):
        lambert_stability_test(scalar_system(), 0, 1.0, 0.0)
    with pytest.raises(NotNormalized):
        lambert_stability_test(laplacian(chain_graph(3)), 0, 1.0, 0.5)
