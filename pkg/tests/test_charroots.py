import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pindelay.charroots import (
    QuasiPoly, chi, chi_log_derivative, dominant_root, find_roots, normalized_residual,
    verdict_from_root,
)
from pindelay.graph import DirectedGraph, PinningProblem, PinSet, laplacian
from pindelay.verdict import Verdict

from oracles import scalar_root
from strategies import scalar_system, systems_with_pins

delays = st.sampled_from([0.0, 0.1, 0.5, 1.0])


def scalar(tau_p, c=1.0):
    return PinningProblem(scalar_system(), PinSet((0,), 1), c, 0.0, tau_p)


@pytest.mark.parametrize("tau", [0.1, 0.3, 0.36])
def test_scalar_real_roots(tau):
    assert abs(dominant_root(scalar(tau)).lam - scalar_root(tau)) < 1e-9


def test_scalar_boundary_root_is_imaginary():
    r = dominant_root(scalar(math.pi / 2)).lam
    assert abs(r.real) < 1e-9 and abs(r.imag - 1) < 1e-9
    assert verdict_from_root(dominant_root(scalar(math.pi / 2 + 0.1))).verdict is Verdict.UNSTABLE


@settings(max_examples=20)
@given(systems_with_pins(max_n=4), st.floats(0.1, 5), delays, delays)
def test_no_delay_matches_matrix_eigenvalues(sp, c, tau_r, tau_p):
    sys_, pins = sp
    pr = PinningProblem(sys_, pins, c, 0.0, 0.0)
    eig = np.max(np.linalg.eigvals(-(sys_.L + c * pins.matrix())).real)
    assert abs(dominant_root(pr).lam.real - eig) < 1e-8


@settings(max_examples=20)
@given(systems_with_pins(max_n=4), st.floats(0.1, 5), delays, delays)
def test_found_roots_are_roots(sp, c, tau_r, tau_p):
    sys_, pins = sp
    qp = QuasiPoly.from_problem(PinningProblem(sys_, pins, c, tau_r, tau_p))
    roots = find_roots(qp)
    assert roots
    for r in roots[:5]:
        assert normalized_residual(qp, r.lam) < 1e-8
    # every root is a zero of the determinant in absolute terms too
    lam = roots[0].lam
    M = qp.matrix(lam)
    assert abs(chi(qp, lam)) <= 1e-7 * max(1.0, np.prod(np.abs(M).sum(axis=1)))


def test_log_derivative_matches_finite_difference():
    sys_ = laplacian(DirectedGraph([[0, 1, 0], [1, 0, 2], [0.5, 1, 0]]))
    qp = QuasiPoly.from_problem(PinningProblem(sys_, PinSet((1,), 3), 1.5, 0.2, 0.4))
    lam, h = 0.3 + 0.7j, 1e-6
    fd = (chi(qp, lam + h) - chi(qp, lam - h)) / (2 * h) / chi(qp, lam)
    assert abs(chi_log_derivative(qp, lam) - fd) < 1e-6


def test_consensus_root_without_pinning_gain():
    sys_ = laplacian(DirectedGraph([[0, 1], [1, 0]]))
    r = dominant_root(PinningProblem(sys_, PinSet((0,), 2), 0.0, 0.3, 0.0))
    assert abs(r.lam) < 1e-9
    assert verdict_from_root(r).verdict is Verdict.INCONCLUSIVE
