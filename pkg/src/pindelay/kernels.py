"""Backend selection for the RK4 stepping kernel.

The compiled kernel is used when it imports; setting ``PINDELAY_PURE_PYTHON=1``
forces the numpy fallback.  Both implement the same buffer contract
(documented in ``_kernel_py``) and agree to rounding.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from . import _kernel_py

_compiled = None
if os.environ.get("PINDELAY_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernel as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
STAGES = (0.0, 0.5, 1.0)


def hermite_weights(theta: float, h: float) -> np.ndarray:
    t2, t3 = theta * theta, theta ** 3
    return np.array([2 * t3 - 3 * t2 + 1, h * (t3 - 2 * t2 + theta), -2 * t3 + 3 * t2, h * (t3 - t2)])


def interpolation_plan(delays, h: float):
    """Offsets, Hermite weights and zero flags for each delay and RK stage."""
    off = np.zeros((2, 3), dtype=np.int64)
    wts = np.zeros((2, 3, 4))
    zero = np.zeros(2, dtype=np.int32)
    for d, tau in enumerate(delays):
        if tau == 0:
            zero[d] = 1
            continue
        for s, alpha in enumerate(STAGES):
            u = alpha - tau / h
            base = math.floor(u)
            theta = u - base
            if theta > 1.0 - 1e-12:
                base, theta = base + 1, 0.0
            elif theta < 1e-12:
                theta = 0.0
            off[d, s] = base
            wts[d, s] = hermite_weights(theta, h)
    return off, wts, zero


@dataclass
class StepPlan:
    """Everything the kernel needs besides the buffers."""

    h: float
    K: np.ndarray
    A: np.ndarray
    D: np.ndarray
    c: float
    off: np.ndarray
    wts: np.ndarray
    zero: np.ndarray
    backend: str = BACKEND

    def __post_init__(self):
        self.K = np.ascontiguousarray(self.K, dtype=float)
        self.D = np.ascontiguousarray(self.D, dtype=float)
        self.A = np.ascontiguousarray(self.A, dtype=float)
        sp = csr_matrix(self.A)
        self._csr = (np.ascontiguousarray(sp.data, dtype=float),
                     np.ascontiguousarray(sp.indices, dtype=np.int32),
                     np.ascontiguousarray(sp.indptr, dtype=np.int32))
        if self.backend == "cython" and _compiled is None:
            raise RuntimeError("compiled kernel is not available")

    @property
    def lookback(self) -> int:
        """Rows of past needed before the first step."""
        return int(-self.off.min()) if self.zero.min() == 0 else 0

    def advance(self, Y, DL, DR, k0: int, nsteps: int, cap: float = 1e12) -> tuple[int, bool]:
        if self.backend == "cython":
            data, idx, ptr = self._csr
            return _compiled.advance(Y, DL, DR, k0, nsteps, self.h, self.K, data, idx, ptr,
                                     self.D, self.c, self.off, self.wts, self.zero, cap)
        return _kernel_py.advance(Y, DL, DR, k0, nsteps, self.h, self.K, self.A, self.D,
                                  self.c, self.off, self.wts, self.zero, cap)
