"""Independent reference computations used by several test modules."""
import math

from pindelay.charroots import dominant_root
from pindelay.graph import PinningProblem


def critical_tau_p(sys_, pins, c, tau_r=0.0, lo=0.0, hi=20.0, tol=1e-7):
    """First pinning delay where the dominant characteristic root reaches
    the imaginary axis, by bisection on the sign of its real part.  ``lo``
    must be stable and ``hi`` unstable."""
    def unstable(t):
        return dominant_root(PinningProblem(sys_, pins, c, tau_r, t)).lam.real > 0
    assert not unstable(lo) and unstable(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if unstable(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def scalar_root(tau):
    """Rightmost root of lam + exp(-lam tau) = 0 (real when tau < 1/e)."""
    from scipy.special import lambertw
    return complex(lambertw(-tau, 0)) / tau if tau > 0 else -1.0 + 0j


PI = math.pi
