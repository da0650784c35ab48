import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pindelay.dde import HistoryFunction, simulate
from pindelay.kernels import BACKEND, hermite_weights, interpolation_plan
from pindelay.graph import PinningProblem

from strategies import systems_with_pins

compiled = pytest.mark.skipif(BACKEND != "cython", reason="compiled kernel not built")


@given(st.floats(0, 1), st.floats(0.01, 2))
def test_hermite_reproduces_cubics(theta, h):
    # p(t) = t^3 - 2 t^2 + 0.5 t + 1 on [0, h]
    p = lambda t: t ** 3 - 2 * t ** 2 + 0.5 * t + 1
    dp = lambda t: 3 * t ** 2 - 4 * t + 0.5
    w = hermite_weights(theta, h)
    approx = w @ [p(0), dp(0), p(h), dp(h)]
    assert approx == pytest.approx(p(theta * h), abs=1e-12)


def test_plan_offsets_for_whole_step_delay():
    off, wts, zero = interpolation_plan((0.1, 0.0), 0.025)
    assert list(zero) == [0, 1]
    np.testing.assert_array_equal(off[0], [-4, -4, -3])
    np.testing.assert_allclose(wts[0, 0], [1, 0, 0, 0])
    np.testing.assert_allclose(wts[0, 1], hermite_weights(0.5, 0.025))


@compiled
@settings(max_examples=20)
@given(systems_with_pins(max_n=6), st.floats(0, 4), st.sampled_from([0.0, 0.05, 0.3]),
       st.sampled_from([0.0, 0.1, 0.25]))
def test_backends_agree(sp, c, tau_r, tau_p):
    sys_, pins = sp
    pr = PinningProblem(sys_, pins, c, tau_r, tau_p)
    hist = HistoryFunction.random_constant(sys_.n, 5)
    a = simulate(pr, hist, T=3.0, h=0.0125, backend="cython").samples
    b = simulate(pr, hist, T=3.0, h=0.0125, backend="python").samples
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)
