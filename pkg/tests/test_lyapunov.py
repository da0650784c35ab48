import math

import pytest
from hypothesis import given, settings, strategies as st

from pindelay.charroots import dominant_root
from pindelay.dde import HistoryFunction
from pindelay.errors import DegenerateNorm, DomainError
from pindelay.graph import DirectedGraph, PinningProblem, PinSet, laplacian
from pindelay.lyapunov import choose_step, largest_exponent
from pindelay.spectral import undelayed_spectral_abscissa

from oracles import scalar_root
from strategies import scalar_system, systems_with_pins


def scalar(tau_p):
    return PinningProblem(scalar_system(), PinSet((0,), 1), 1.0, 0.0, tau_p)


@pytest.mark.parametrize("tau", [0.2, 0.35])
def test_scalar_real_root(tau):
    est = largest_exponent(scalar(tau), HistoryFunction.constant([1.0]))
    assert est.value == pytest.approx(scalar_root(tau).real, abs=2e-3)
    assert est.converged and est.method == "segments"


def test_boundary_exponent_is_near_zero():
    est = largest_exponent(scalar(math.pi / 2), HistoryFunction.constant([1.0]), N_segments=400)
    assert abs(est.value) < 5e-3


def test_no_delay_uses_spectral_abscissa():
    sys_ = laplacian(DirectedGraph([[0, 1], [1, 0]]))
    pins = PinSet((0,), 2)
    est = largest_exponent(PinningProblem(sys_, pins, 1.0, 0.0, 0.0))
    assert est.method == "spectral_abscissa"
    assert est.value == undelayed_spectral_abscissa(sys_, pins, 1.0)


def test_scale_invariance():
    sys_ = laplacian(DirectedGraph([[0, 1, 1], [1, 0, 0], [1, 0, 0]]))
    pr = PinningProblem(sys_, PinSet((1,), 3), 0.8, 0.2, 0.3)
    hist = HistoryFunction.constant([0.3, -1.0, 0.6])
    base = largest_exponent(pr, hist, N_segments=100).value
    for alpha in (1e-6, 1e6):
        assert abs(largest_exponent(pr, hist.scaled(alpha), N_segments=100).value - base) < 1e-9


def test_longer_horizon_does_not_get_worse():
    sys_ = laplacian(DirectedGraph([[0, 1], [1, 0]]))
    pr = PinningProblem(sys_, PinSet((0,), 2), 1.0, 0.1, 0.5)
    exact = dominant_root(pr).lam.real
    short = abs(largest_exponent(pr, N_segments=100).value - exact)
    long = abs(largest_exponent(pr, N_segments=800).value - exact)
    assert long <= short + 1e-4


@settings(max_examples=10)
@given(systems_with_pins(max_n=5), st.floats(0.2, 3), st.sampled_from([0.0, 0.1, 0.5]),
       st.sampled_from([0.1, 0.5]))
def test_agrees_with_dominant_root(sp, c, tau_r, tau_p):
    sys_, pins = sp
    pr = PinningProblem(sys_, pins, c, tau_r, tau_p)
    est = largest_exponent(pr, N_segments=400, samples_per_segment=64)
    assert abs(est.value - dominant_root(pr).lam.real) < 1e-2


def test_step_choice_respects_both_caps():
    sys_ = laplacian(DirectedGraph([[0, 1], [1, 0]]))
    pr = PinningProblem(sys_, PinSet((0,), 2), 50.0, 0.1, 0.02)
    h, r = choose_step(pr, 64)
    assert h <= 0.02 / 4 and h <= 0.5 / 52 and h * 64 * r == pytest.approx(0.1)


def test_argument_checks():
    with pytest.raises(DomainError):
        largest_exponent(scalar(0.5), N_segments=10)
    with pytest.raises(DomainError):
        largest_exponent(scalar(0.5), samples_per_segment=8)
    with pytest.raises(DegenerateNorm):
        largest_exponent(scalar(0.5), HistoryFunction.constant([0.0]))
