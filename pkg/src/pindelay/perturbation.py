"""First-order estimates of the dominant root for weak and strong pinning."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .charroots import QuasiPoly, dominant_root
from .errors import AllPinned, DomainError
from .graph import LaplacianSystem, PinSet, require_pins
from .spectral import zero_eigvec_pair


class Regime(str, enum.Enum):
    SMALL_C = "SmallC"
    LARGE_C = "LargeC"


@dataclass(frozen=True)
class PerturbationEstimate:
    regime: Regime
    dominant_root_estimate: complex
    ingredients: dict = field(default_factory=dict)


def small_c_dominant(sys: LaplacianSystem, pins: PinSet, tau_r: float, c: float) -> PerturbationEstimate:
    """Weak-pinning slope of the consensus root.

    With ``phi = 1`` and ``psi`` the positive left null vector of ``L``
    (summing to one), the zero root moves to

        -(psi' D phi) / (1 + tau_r psi' K phi) * c + o(c).

    ``psi' A phi`` equals ``psi' K phi`` because ``psi' L phi = 0``; both
    are reported.
    """
    require_pins(pins)
    if c < 0 or tau_r < 0:
        raise DomainError("c and tau_r must be nonnegative")
    phi, psi = zero_eigvec_pair(sys)
    pDp = float(psi @ (pins.indicator() * phi))
    pKp = float(psi @ (np.asarray(sys.K) * phi))
    pAp = float(psi @ np.asarray(sys.A) @ phi)
    slope = -pDp / (1.0 + tau_r * pKp)
    return PerturbationEstimate(Regime.SMALL_C, complex(slope * c), {
        "psiDphi": pDp, "psiKphi": pKp, "psiAphi": pAp, "slope": slope,
    })


def mean_field_estimate(pin_fraction: float, mean_degree: float, tau_r: float, c: float) -> float:
    """``-f c / (1 + tau_r d)``: the weak-pinning estimate for an undirected
    graph whose degrees are all close to the mean ``d``."""
    if min(pin_fraction, mean_degree, tau_r, c) < 0 or pin_fraction > 1:
        raise DomainError("inputs must be nonnegative and the pin fraction at most 1")
    return -pin_fraction * c / (1.0 + tau_r * mean_degree)


def reduced_system(sys: LaplacianSystem, pins: PinSet):
    """Unpinned block of the dynamics.

    Returns ``(K2, A22, perm)``: ``perm`` lists pinned nodes first (in
    increasing order) followed by the unpinned ones, ``K2`` is the vector
    of unpinned in-degrees and ``A22`` the adjacency among unpinned nodes,
    both in the order ``perm[m:]``.
    """
    if pins.n != sys.n:
        raise DomainError("pin set size does not match the system")
    unpinned = [i for i in range(sys.n) if i not in pins]
    if not unpinned:
        raise AllPinned("every node is pinned; the reduced system is empty")
    perm = np.array(list(pins.members) + unpinned, dtype=int)
    idx = np.array(unpinned, dtype=int)
    K2 = np.asarray(sys.K)[idx].copy()
    A22 = np.asarray(sys.A)[np.ix_(idx, idx)].copy()
    return K2, A22, perm


def large_c_dominant(K2, A22, tau_r: float, **root_kwargs) -> PerturbationEstimate:
    """Dominant root ``mu*`` of ``det(mu I + K2 - A22 e^{-mu tau_r})``: the
    limit of the dominant root as ``c -> inf`` with ``c tau_p < pi/2``."""
    K2 = np.atleast_1d(np.asarray(K2, dtype=float))
    if K2.size == 0:
        raise AllPinned("the reduced system is empty")
    if tau_r < 0:
        raise DomainError("tau_r must be nonnegative")
    qp = QuasiPoly(K2, A22, np.zeros_like(K2), 0.0, tau_r, 0.0)
    root = dominant_root(qp, **root_kwargs)
    return PerturbationEstimate(Regime.LARGE_C, root.lam, {
        "mu_star": root.lam, "residual": root.residual, "size": int(K2.size),
    })


def check_large_c_condition(c: float, tau_p: float) -> bool:
    """Whether ``c tau_p < pi/2``, so that the pinned block stays stable."""
    return c * tau_p < math.pi / 2.0
