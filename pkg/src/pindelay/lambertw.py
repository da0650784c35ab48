"""Lambert W on arbitrary branches.

Branch cuts follow the usual convention (Corless et al.): ``W_0`` is cut
along ``(-inf, -1/e]``, the other branches along ``(-inf, 0]``, and values on
a cut are continuous with the upper half plane (counter-clockwise
continuity).  Branch ``k`` satisfies ``W_k(z) + log W_k(z) = log z + 2 pi i k``
away from the cuts; that identity drives the starting guess.
"""
from __future__ import annotations

import cmath
import math

from .errors import DomainError, NonConvergence

_INV_E = math.exp(-1.0)
_TWO_PI_I = 2j * math.pi


def _branch_point_series(p: complex) -> complex:
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def _guesses(z: complex, k: int):
    near_bp = abs(z + _INV_E) < 0.3
    if k == 0:
        if near_bp:
            yield _branch_point_series(cmath.sqrt(2.0 * (math.e * z + 1.0)))
        if abs(z) < 0.5:
            yield z - z * z  # Taylor series at the origin
        if abs(z + 1.0) > 0.1:
            yield cmath.log(1.0 + z)
    elif near_bp and ((k == -1 and z.imag >= 0) or (k == 1 and z.imag < 0)):
        # W_0, W_-1 and W_1 meet at -1/e; the negative root of the series
        # lands on the neighbouring branch on the appropriate side of the cut
        yield _branch_point_series(-cmath.sqrt(2.0 * (math.e * z + 1.0)))
    L1 = cmath.log(z) + _TWO_PI_I * k
    if L1 == 0:
        yield 0.5
    else:
        L2 = cmath.log(L1)
        yield L1 - L2 + L2 / L1


def _halley(z: complex, w: complex, tol: float, max_iter: int) -> complex | None:
    for _ in range(max_iter):
        ew = cmath.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0:
            return w  # exactly at the branch point
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if not cmath.isfinite(w):
            return None
        if abs(step) <= tol * (1.0 + abs(w)):
            return w
    if abs(w * cmath.exp(w) - z) <= 1e-12 * max(1.0, abs(z)):
        return w
    return None


def lambert_w(z: complex, k: int = 0, tol: float = 1e-15, max_iter: int = 100) -> complex:
    """Solve ``w * exp(w) = z`` on branch ``k`` by Halley iteration.

    Several starting points are tried in order; the first root whose branch
    index checks out is returned.  Exactly on a cut the check is ambiguous,
    so the first converged root is the fallback.
    """
    z = complex(z)
    k = int(k)
    if z == 0:
        if k == 0:
            return 0j
        raise DomainError(f"W_{k}(0) is undefined (only the principal branch is finite)")
    fallback = None
    for w0 in _guesses(z, k):
        w = _halley(z, w0, tol, max_iter)
        if w is None:
            continue
        if fallback is None:
            fallback = w
        if w == 0 or branch_of(w, z) == k or abs(w + 1.0) < 1e-6:
            return w
    if fallback is not None:
        return fallback
    raise NonConvergence(f"Lambert W_{k}({z}) did not converge in {max_iter} iterations")


def branch_of(w: complex, z: complex) -> int:
    """Branch index ``k`` for which ``w = W_k(z)`` (off the cuts)."""
    return round(((w + cmath.log(w) - cmath.log(z)) / _TWO_PI_I).real)
