"""Pure-numpy RK4 stepping kernel (fallback for the compiled one).

Buffer layout shared with the compiled kernel: row ``k`` of ``Y`` holds the
state at grid time ``k``; ``DL``/``DR`` hold left/right derivatives used by
the cubic Hermite interpolant of the past.  They coincide everywhere except
at the junction with the initial history.

``off[d, s]`` and ``wts[d, s]`` describe where delay ``d`` (0: transmission,
1: pinning) reads from when evaluating RK stage ``s`` (abscissae 0, 1/2, 1)
of the step leaving row ``k``: the interval ``[k + off, k + off + 1]`` with
Hermite weights ``(y_a, h dy_a, y_b, h dy_b)``.  ``zero[d]`` marks a zero
delay, which reads the current stage value instead.
"""
from __future__ import annotations

import numpy as np


def advance(Y, DL, DR, k0, nsteps, h, K, A, D, c, off, wts, zero, cap):
    """Advance ``nsteps`` RK4 steps from row ``k0``.

    Returns ``(steps_done, diverged)``; stops early when ``max|y|`` exceeds
    ``cap`` or stops being finite.
    """
    cD = c * D

    def delayed(k, d, s, ystage):
        if zero[d]:
            return ystage
        a = k + off[d, s]
        w = wts[d, s]
        return w[0] * Y[a] + w[1] * DR[a] + w[2] * Y[a + 1] + w[3] * DL[a + 1]

    def rhs(k, s, ystage):
        return -K * ystage + A @ delayed(k, 0, s, ystage) - cD * delayed(k, 1, s, ystage)

    DR[k0] = rhs(k0, 0, Y[k0])
    half = 0.5 * h
    for k in range(k0, k0 + nsteps):
        y = Y[k]
        k1 = DR[k]
        k2 = rhs(k, 1, y + half * k1)
        k3 = rhs(k, 1, y + half * k2)
        k4 = rhs(k, 2, y + h * k3)
        ynew = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        Y[k + 1] = ynew
        big = np.max(np.abs(ynew)) if ynew.size else 0.0
        if not big <= cap:
            return k + 1 - k0, True
        f = rhs(k + 1, 0, ynew)
        DR[k + 1] = f
        DL[k + 1] = f
    return nsteps, False
