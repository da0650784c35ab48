"""Admissible pinning-delay bounds.

* ``tau_p_star``: any pinning delay below it keeps the network stable for
  every transmission delay, given the pinned nodes' in-degrees.
* ``single_node_tau_pM``: single pinned node, no transmission delay.
* ``lambert_stability_test``: single pinned node, equal delays, all
  in-degrees equal; exact root location through Lambert W.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ComplexSpectrum, DomainError, EmptyPinSet, NoRootFound, NotNormalized
from .graph import LaplacianSystem
from .lambertw import lambert_w
from .spectral import SpectralDecomp, eigendecompose
from .verdict import StabilityVerdict

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundResult:
    value: float
    kind: str  # "tau_p_star" | "tau_pM" | "lambert"
    diagnostics: dict = field(default_factory=dict)
    capped: bool = False


# -- the function F and its minimum over frequency -------------------------

def F_value(omega, c: float, l: float, tau: float):
    """``c^2 + w^2 + 2c (l cos(w tau) - w sin(w tau))`` (vectorised in ``omega``)."""
    omega = np.asarray(omega, dtype=float)
    return c * c + omega * omega + 2.0 * c * (l * np.cos(omega * tau) - omega * np.sin(omega * tau))


def omega_cap(c: float, l: float, tau: float) -> float:
    # F >= (|w| - c)^2 - 2cl > 0 beyond this frequency
    return 2.0 * c + 2.0 * math.sqrt(c * max(l, 1.0)) + c * l * tau + 1.0


def _golden_min(f, a: float, b: float, tol: float = 1e-13) -> tuple[float, float]:
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol * (1.0 + abs(a) + abs(b)):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def min_F_over_omega(c: float, l: float, tau: float, points: int = 4096,
                     refine: int = 8) -> tuple[float, float]:
    """Global minimum ``(omega*, F*)`` of ``F`` over the real line.

    Scans ``[-W, W]`` (``W = omega_cap``, outside which ``F > 0``) on a
    uniform grid, then golden-section refines the ``refine`` lowest
    bracketed local minima.
    """
    if min(c, l, tau) < 0:
        raise DomainError("c, l and tau must be nonnegative")
    W = omega_cap(c, l, tau)
    # at least ~32 samples per oscillation period 2 pi / tau
    m = max(points, int(math.ceil(2.0 * W * tau / (2.0 * math.pi) * 32.0)) + 1)
    w = np.linspace(-W, W, m)
    f = F_value(w, c, l, tau)
    interior = np.flatnonzero((f[1:-1] <= f[:-2]) & (f[1:-1] <= f[2:])) + 1
    best = (float(w[np.argmin(f)]), float(f.min()))
    if interior.size:
        cand = interior[np.argsort(f[interior])[:refine]]
        for k in cand:
            x, fx = _golden_min(lambda x: float(F_value(x, c, l, tau)), w[k - 1], w[k + 1])
            if fx < best[1]:
                best = (x, fx)
    return best


# -- tau_p* ----------------------------------------------------------------

def _crossing_delay(omega, c: float, l: float):
    """Smallest ``tau >= 0`` with ``F(omega, c, l, tau) <= 0``.

    ``F = c^2 + w^2 + 2c R cos(w tau + phi)`` with ``R = hypot(l, w)`` and
    ``phi = atan2(w, l)``, so ``F <= 0`` first happens at
    ``w tau = arccos(-kappa) - phi``, ``kappa = (c^2 + w^2) / (2 c R)``;
    it requires ``kappa <= 1``, i.e. ``|w^2 - c^2| <= 2 c l``.
    """
    omega = np.asarray(omega, dtype=float)
    R = np.hypot(l, omega)
    kappa = np.minimum((c * c + omega * omega) / (2.0 * c * R), 1.0)
    return (np.arccos(-kappa) - np.arctan2(omega, l)) / omega


def tau_star_single(c: float, l: float, points: int = 4096) -> tuple[float, float]:
    """``(H, omega)``: first delay at which ``min_w F(w, c, l, tau)`` reaches 0."""
    lo = math.sqrt(max(0.0, c * c - 2.0 * c * l))
    hi = math.sqrt(c * c + 2.0 * c * l)
    if hi - lo <= 1e-12 * hi:
        return float(_crossing_delay(c, c, l)), c
    lo = max(lo, 1e-12 * hi)
    w = np.linspace(lo, hi, points)
    t = _crossing_delay(w, c, l)
    k = int(np.argmin(t))
    a, b = w[max(k - 1, 0)], w[min(k + 1, w.size - 1)]
    x, tx = _golden_min(lambda x: float(_crossing_delay(x, c, l)), a, b)
    if t[k] < tx:
        x, tx = float(w[k]), float(t[k])
    return tx, x


def tau_p_star(c: float, pinned_degrees, cap: float | None = None) -> BoundResult:
    """Largest pinning delay below which ``min_w min_i F > 0`` throughout,
    minimised over the pinned nodes' in-degrees."""
    degrees = [float(l) for l in pinned_degrees]
    if not degrees:
        raise EmptyPinSet("tau_p_star needs at least one pinned node")
    if c <= 0:
        raise DomainError("tau_p_star needs c > 0")
    if min(degrees) < 0:
        raise DomainError("in-degrees must be nonnegative")
    cap = 1e3 / c if cap is None else cap
    per = {}
    for l in sorted(set(degrees)):
        per[l] = tau_star_single(c, l)
    l_min = min(per, key=lambda l: per[l][0])
    tau, omega = per[l_min]
    capped = tau >= cap
    value = math.inf if capped else tau
    diag = {
        "limiting_degree": l_min,
        "omega": omega,
        "per_degree": {str(l): v[0] for l, v in per.items()},
    }
    if not capped:
        diag["min_F_at_bound"] = min_F_over_omega(c, l_min, tau)[1]
    return BoundResult(value, "tau_p_star", diag, capped)


def tau_p_star_scan(c: float, pinned_degrees, cap: float | None = None,
                    rel_tol: float = 1e-6) -> BoundResult:
    """Cross-check of :func:`tau_p_star` by scanning ``tau`` upward on a
    geometric-then-linear grid for the first ``min F <= 0`` and bisecting.

    Only detects genuine sign changes; for in-degree 0 the minimum merely
    touches zero and the scan runs to the cap.
    """
    degrees = [float(l) for l in pinned_degrees]
    if not degrees:
        raise EmptyPinSet("tau_p_star needs at least one pinned node")
    cap = 1e3 / c if cap is None else cap

    def G(tau):
        return min(min_F_over_omega(c, l, tau)[1] for l in set(degrees))

    grid = list(np.geomspace(1e-3 / c, 0.1 / c, 24))
    t = grid[-1]
    step = 0.01 / c
    prev = 0.0
    while True:
        for tau in grid:
            if G(tau) <= 0:
                lo, hi = prev, tau
                while hi - lo > rel_tol * hi:
                    mid = 0.5 * (lo + hi)
                    if G(mid) <= 0:
                        hi = mid
                    else:
                        lo = mid
                return BoundResult(hi, "tau_p_star", {"method": "scan"})
            prev = tau
        if t >= cap:
            return BoundResult(math.inf, "tau_p_star", {"method": "scan"}, capped=True)
        grid = [t + step * k for k in range(1, 101)]
        t = grid[-1]


# -- single pinned node, no transmission delay -----------------------------

def a_b_values(omega, c: float, decomp: SpectralDecomp):
    """``a = c sum w_i th_i / (om^2 + th_i^2)``, ``b = c sum w_i om / (om^2 + th_i^2)``."""
    th, wts = decomp.real_parts()
    omega = np.asarray(omega, dtype=float)
    den = omega[..., None] ** 2 + th ** 2
    a = c * np.sum(wts * th / den, axis=-1)
    b = c * np.sum(wts * omega[..., None] / den, axis=-1)
    return a, b


def modulus_double_sum(omega: float, decomp: SpectralDecomp) -> float:
    """``(a^2 + b^2) / c^2`` written as the explicit diagonal + pairwise sum."""
    th, w = decomp.real_parts()
    o2 = omega * omega
    total = float(np.sum(w * w / (o2 + th * th)))
    n = th.size
    for i in range(n):
        for j in range(i):
            total += 2.0 * w[i] * w[j] * (th[i] * th[j] + o2) / ((o2 + th[i] ** 2) * (o2 + th[j] ** 2))
    return total


def _bisect_all(g, lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    glo = g(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        left = np.sign(gm) == np.sign(glo)
        lo = np.where(left, mid, lo)
        glo = np.where(left, gm, glo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= tol * np.maximum(1.0, hi)):
            break
    return 0.5 * (lo + hi)


def single_node_tau_pM(decomp: SpectralDecomp, c: float, points: int = 20000) -> BoundResult:
    """Pinning-delay bound for one pinned node (``decomp.pinned``) and no
    transmission delay.

    Finds every crossing frequency ``om > 0`` with ``a^2 + b^2 = 1`` and,
    for each, the smallest delay putting ``j om`` on the characteristic
    curve (``cos(om tau) = -a``, ``sin(om tau) = b``).  The reported value
    is the minimum of those delays; ``diagnostics['arccos_at_max']`` holds
    ``arccos(-a(om_max)) / om_max`` evaluated at the largest crossing.
    """
    decomp.require_diagonalizable()
    th, w = decomp.real_parts()
    if not decomp.unique_zero:
        raise DomainError("the Laplacian needs a simple zero eigenvalue (irreducible L)")
    if c <= 0:
        raise DomainError("single_node_tau_pM needs c > 0")
    diag: dict = {}
    if np.any(w < -1e-12):
        warnings.warn("negative eigenvector product weights; positivity assumption violated",
                      RuntimeWarning, stacklevel=2)
        diag["negative_weights"] = True
    om_max = c * float(np.sum(np.abs(w))) * (1.0 + float(np.max(np.abs(th)))) + 1.0

    def g(om):
        a, b = a_b_values(om, c, decomp)
        return a * a + b * b - 1.0

    grid = np.geomspace(1e-8, om_max, points)
    vals = g(grid)
    br = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    exact = grid[vals == 0]
    if br.size == 0 and exact.size == 0:
        raise NoRootFound("a^2 + b^2 = 1 has no bracketed positive solution")
    roots = np.concatenate([_bisect_all(g, grid[br], grid[br + 1], 1e-10), exact]) if br.size else exact
    roots = np.sort(roots)
    a, b = a_b_values(roots, c, decomp)
    angle = np.mod(np.arctan2(b, -a), 2.0 * math.pi)
    angle = np.where(angle <= 0, 2.0 * math.pi, angle)
    taus = angle / roots
    om_top = roots[-1]
    a_top = float(a_b_values(om_top, c, decomp)[0])
    arccos_at_max = math.acos(min(1.0, max(-1.0, -a_top))) / om_top
    k = int(np.argmin(taus))
    value = float(taus[k])
    diag.update({
        "Z": (roots ** 2).tolist(),
        "crossing_delays": taus.tolist(),
        "omega": float(roots[k]),
        "arccos_at_max": arccos_at_max,
        "differs_from_arccos_at_max": bool(abs(value - arccos_at_max) > 1e-9 * max(value, 1.0)),
    })
    return BoundResult(value, "tau_pM", diag)


# -- equal delays, normalised Laplacian ------------------------------------

def lambert_polynomial(thetas, weights, c: float, l: float) -> np.ndarray:
    """Coefficients (highest first) of
    ``prod_k (u + th_k - l) + c sum_k w_k prod_{j != k} (u + th_j - l)``."""
    shifts = l - np.asarray(thetas, dtype=float)
    poly = np.poly(shifts)
    extra = np.zeros(poly.size - 1)
    for k in range(shifts.size):
        extra = extra + weights[k] * np.poly(np.delete(shifts, k))
    return poly + c * np.concatenate([[0.0], extra])


def lambert_stability_test(sys: LaplacianSystem, pinned: int, c: float, tau: float,
                           l: float | None = None, margin: float = 10.0,
                           tol: float = 1e-8, max_branch: int = 200) -> StabilityVerdict:
    """Verdict for one pinned node and equal delays ``tau_r = tau_p = tau``.

    With every in-degree equal to ``l`` the characteristic roots are
    ``W_k(s) / tau - l`` over all branches ``k`` and all roots ``s`` of
    ``1 + c sum_k w_k / (e^{-l tau} s / tau + th_k - l) = 0``.
    """
    K = np.asarray(sys.K)
    if l is None:
        l = float(K[0])
    if np.any(np.abs(K - l) > 1e-9 * max(1.0, abs(l))):
        raise NotNormalized(f"in-degrees are not all equal to {l}")
    if c <= 0:
        raise DomainError("lambert_stability_test needs c > 0")
    if tau <= 0:
        raise DomainError("lambert_stability_test needs a positive delay")
    decomp = eigendecompose(sys, pinned)
    decomp.require_diagonalizable()
    if not decomp.real_spectrum:
        raise ComplexSpectrum("Lambert criterion needs a real Laplacian spectrum")
    th, w = decomp.real_parts()
    coeffs = lambert_polynomial(th, w, c, l)
    us = np.roots(coeffs)
    residuals = np.abs(np.polyval(coeffs, us))
    svals = tau * math.exp(l * tau) * us
    best = None
    for s in svals:
        s = complex(s)
        if s == 0:
            cands = [0j]
        else:
            cands = [lambert_w(s, 0)]
            k = 1
            while k <= max_branch:
                wk = [lambert_w(s, k), lambert_w(s, -k)]
                cands.extend(wk)
                if all(x.real < tau * l - margin for x in wk):
                    break
                k += 1
        for x in cands:
            lam = x / tau - l
            if best is None or lam.real > best.real:
                best = lam
    method = f"lambert(max poly residual {residuals.max():.2e})"
    return StabilityVerdict.from_real_part(best.real, best, method, tol)
