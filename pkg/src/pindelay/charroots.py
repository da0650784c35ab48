"""Characteristic quasipolynomial of the delayed pinning system and a
dominant-root search.

    chi(lam) = det(lam I + K - A exp(-lam tau_r) + c D exp(-lam tau_p))

The search seeds Newton's method (step ``1 / (chi'/chi)``) from a grid in
the upper half plane plus eigenvalues of the frozen-delay matrix
``-K + A exp(-s tau_r) - c D exp(-s tau_p)``, keeps every converged root
whose normalised residual is small, and reports the one with the largest
real part.  Seeds are iterated in batches with numpy.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoRootFound, SingularAtPoint
from .graph import PinningProblem
from .verdict import StabilityVerdict

RESIDUAL_TOL = 1e-8
DEDUP_TOL = 1e-6
_CHUNK_ELEMS = 2_000_000  # complex entries per batched inverse


@dataclass(frozen=True, eq=False)
class QuasiPoly:
    """``K`` and ``D`` are diagonals (vectors), ``A`` a dense matrix."""

    K: np.ndarray
    A: np.ndarray
    D: np.ndarray
    c: float = 0.0
    tau_r: float = 0.0
    tau_p: float = 0.0

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        D = np.asarray(self.D, dtype=float)
        K = np.diag(K).copy() if K.ndim == 2 else K
        D = np.diag(D).copy() if D.ndim == 2 else D
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = K.size
        if A.shape != (n, n) or D.size != n:
            raise ValueError(f"dimension mismatch: K {K.shape}, A {A.shape}, D {D.shape}")
        if min(self.c, self.tau_r, self.tau_p) < 0:
            raise ValueError("c and delays must be nonnegative")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "A", A)

    @classmethod
    def from_problem(cls, p: PinningProblem) -> "QuasiPoly":
        return cls(p.system.K, p.system.A, p.pins.indicator(), p.c, p.tau_r, p.tau_p)

    @property
    def n(self) -> int:
        return self.K.size

    @property
    def scale(self) -> float:
        return 1.0 + np.abs(self.K).max() + np.abs(self.A).sum(axis=1).max() + self.c

    @property
    def tau_m(self) -> float:
        return max(self.tau_r, self.tau_p)

    def matrix(self, lam: complex) -> np.ndarray:
        lam = complex(lam)
        M = -self.A * np.exp(-lam * self.tau_r)
        M[np.diag_indices(self.n)] += lam + self.K + self.c * self.D * np.exp(-lam * self.tau_p)
        return M

    def dmatrix(self, lam: complex) -> np.ndarray:
        lam = complex(lam)
        M = self.tau_r * self.A * np.exp(-lam * self.tau_r)
        M[np.diag_indices(self.n)] += 1.0 - self.c * self.tau_p * self.D * np.exp(-lam * self.tau_p)
        return M

    def frozen_matrix(self, s: complex) -> np.ndarray:
        """``-K + A e^{-s tau_r} - c D e^{-s tau_p}``; its eigenvalues equal
        ``s`` exactly when ``s`` is a characteristic root."""
        return -self.matrix(s) + complex(s) * np.eye(self.n)

    def undelayed_abscissa(self) -> float:
        return float(np.max(np.linalg.eigvals(-np.diag(self.K) + self.A - self.c * np.diag(self.D)).real))


@dataclass(frozen=True)
class ComplexRoot:
    lam: complex
    residual: float
    multiplicity_hint: int = 1


@dataclass(frozen=True)
class SearchRegion:
    sigma_lo: float
    sigma_hi: float
    omega: float

    @classmethod
    def default(cls, qp: QuasiPoly) -> "SearchRegion":
        R = np.abs(qp.A).sum(axis=1)
        # Gershgorin: a root with Re >= 0 satisfies |lam + K_i + c d_i e^{-lam tau_p}| <= R_i,
        # hence Re lam <= R_i - K_i + c d_i
        hi = max(0.0, float(np.max(R - qp.K + qp.c * qp.D))) + 0.1
        lo = -(float(np.max(qp.K + R)) + qp.c + 1.0)
        omega = 2.0 * (float(np.max(qp.K)) + qp.c) + 2.0 * math.pi / max(qp.tau_r, qp.tau_p, 1.0)
        return cls(lo, hi, omega)


def _lu_det(M: np.ndarray) -> complex:
    with warnings.catch_warnings():
        # an exactly singular matrix is a legitimate input here: det = 0
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    sign = (-1) ** int(np.sum(piv != np.arange(piv.size)))
    return complex(sign * np.prod(np.diag(lu)))


def chi(qp: QuasiPoly, lam: complex) -> complex:
    """Value of the characteristic function (complex LU, partial pivoting)."""
    return _lu_det(qp.matrix(lam))


def chi_log_derivative(qp: QuasiPoly, lam: complex) -> complex:
    """``chi'(lam) / chi(lam) = trace(M(lam)^{-1} M'(lam))``."""
    M = qp.matrix(lam)
    lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    if np.any(np.diag(lu) == 0):
        raise SingularAtPoint(f"characteristic matrix is singular at {lam}")
    return complex(np.trace(scipy.linalg.lu_solve((lu, piv), qp.dmatrix(lam), check_finite=False)))


def normalized_residual(qp: QuasiPoly, lam: complex) -> float:
    """Smallest singular value of ``M(lam)`` over the largest row sum of the
    absolute sizes of its terms (taken before they cancel)."""
    return float(_batch_residual(qp, np.array([complex(lam)]))[0])


def _batch_matrices(qp: QuasiPoly, lam: np.ndarray):
    er = np.exp(-lam * qp.tau_r)
    ep = np.exp(-lam * qp.tau_p)
    M = -qp.A[None, :, :] * er[:, None, None]
    idx = np.arange(qp.n)
    M[:, idx, idx] += lam[:, None] + qp.K[None, :] + qp.c * qp.D[None, :] * ep[:, None]
    return M, er, ep


def _batch_residual(qp: QuasiPoly, lam: np.ndarray) -> np.ndarray:
    out = np.empty(lam.size)
    step = max(1, _CHUNK_ELEMS // (qp.n * qp.n))
    for s in range(0, lam.size, step):
        chunk = lam[s:s + step]
        M, er, ep = _batch_matrices(qp, chunk)
        rows = (np.abs(chunk)[:, None] + np.abs(qp.K)[None, :]
                + np.abs(er)[:, None] * np.abs(qp.A).sum(axis=1)[None, :]
                + qp.c * np.abs(qp.D)[None, :] * np.abs(ep)[:, None])
        smin = np.linalg.svd(M, compute_uv=False)[:, -1]
        out[s:s + step] = smin / np.maximum(rows.max(axis=1), 1.0)
    return out


def _batch_logderiv(qp: QuasiPoly, lam: np.ndarray) -> np.ndarray:
    """chi'/chi at many points; ``inf`` where the matrix is singular."""
    out = np.empty(lam.size, dtype=complex)
    step = max(1, _CHUNK_ELEMS // (qp.n * qp.n))
    for s in range(0, lam.size, step):
        chunk = lam[s:s + step]
        M, er, ep = _batch_matrices(qp, chunk)
        try:
            inv = np.linalg.inv(M)
        except np.linalg.LinAlgError:
            # rare: a seed sits exactly on a root; screen singular members
            ok = np.linalg.det(M) != 0
            inv = np.full_like(M, np.inf)
            if ok.any():
                inv[ok] = np.linalg.inv(M[ok])
        tr = np.trace(inv, axis1=1, axis2=2)
        trA = np.einsum("kij,ji->k", inv, qp.A)
        diag = np.diagonal(inv, axis1=1, axis2=2)
        trD = diag @ qp.D
        out[s:s + step] = tr + qp.tau_r * er * trA - qp.c * qp.tau_p * ep * trD
    return out


def _batch_logabsdet(qp: QuasiPoly, lam: np.ndarray) -> np.ndarray:
    out = np.empty(lam.size)
    step = max(1, _CHUNK_ELEMS // (qp.n * qp.n))
    for s in range(0, lam.size, step):
        M, _, _ = _batch_matrices(qp, lam[s:s + step])
        out[s:s + step] = np.linalg.slogdet(M)[1]
    return out


def _stretch_crawling(qp: QuasiPoly, lam: np.ndarray, step: np.ndarray, prev: np.ndarray,
                      usable: np.ndarray) -> np.ndarray:
    """Lengthen Newton steps that crawl.

    Far from a cluster of ``m`` roots the Newton step covers about ``1/m``
    of the distance, so consecutive steps look alike.  For those iterates
    the multiples ``2, 4, ..., 2^K`` of the step are tried and the longest
    one along which ``|chi|`` keeps decreasing is taken.
    """
    with np.errstate(all="ignore"):
        ratio = np.where(prev != 0, step / np.where(prev != 0, prev, 1.0), 0.0)
    crawl = usable & (np.abs(ratio) > 0.6) & (ratio.real > 0.8 * np.abs(ratio))
    if not crawl.any():
        return step
    mults = 2.0 ** np.arange(0, int(math.ceil(math.log2(max(qp.n, 2)))) + 2)
    ci = np.flatnonzero(crawl)
    trial = lam[ci, None] - step[ci, None] * mults[None, :]
    with np.errstate(all="ignore"):
        f = _batch_logabsdet(qp, trial.ravel()).reshape(trial.shape)
        f = np.where(np.isfinite(f), f, np.inf)
        falling = np.cumprod(np.diff(f, axis=1) < 0, axis=1).sum(axis=1)
    out = step.copy()
    out[ci] = step[ci] * mults[falling]
    return out


def newton_roots(qp: QuasiPoly, seeds, max_iter: int = 60, tol: float = 1e-13,
                 floor: float | None = None, box: SearchRegion | None = None) -> list[ComplexRoot]:
    """Run batched Newton from every seed; return accepted, deduplicated
    roots (upper half plane representatives) sorted by real part, descending.

    Steps that crawl towards a distant cluster of roots are lengthened
    (see ``_stretch_crawling``); near a simple root plain Newton steps
    shrink quickly and are left alone.
    """
    lam = np.asarray(seeds, dtype=complex).ravel().copy()
    if floor is None:
        floor = -1e6
    # keep exp(-lam tau) finite
    tmax = qp.tau_m
    if tmax > 0:
        floor = max(floor, -600.0 / tmax)
    active = np.ones(lam.size, dtype=bool)
    converged = np.zeros(lam.size, dtype=bool)
    prev = np.zeros(lam.size, dtype=complex)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        with np.errstate(all="ignore"):
            ell = _batch_logderiv(qp, lam[idx])
            step = np.where(np.isfinite(ell) & (ell != 0), 1.0 / ell, 0.0)
            singular = ~np.isfinite(ell)
        newton = step
        step = _stretch_crawling(qp, lam[idx], step, prev[idx], ~singular)
        prev[idx] = newton
        new = lam[idx] - step
        done = (np.abs(step) <= tol * (1.0 + np.abs(new))) | singular
        lost = ~np.isfinite(new) | (new.real < floor) | (np.abs(new) > 1e8)
        if box is not None:
            lost |= (new.real > box.sigma_hi + box.omega) | (np.abs(new.imag) > 4.0 * box.omega)
        lam[idx] = new
        converged[idx[done & ~lost]] = True
        active[idx[done | lost]] = False
    cand = lam[converged]
    if cand.size == 0:
        return []
    cand = np.where(cand.imag < 0, cand.conj(), cand)
    cand = np.where(np.abs(cand.imag) < 1e-12 * (1 + np.abs(cand)), cand.real + 0j, cand)
    order = np.lexsort((cand.imag, -cand.real))
    groups: list[list] = []
    for k in order:
        z = cand[k]
        for gr in groups:
            if abs(gr[0] - z) < DEDUP_TOL * (1 + abs(z)):
                gr[1] += 1
                break
        else:
            groups.append([z, 1])
    zs = np.array([gr[0] for gr in groups])
    res = _batch_residual(qp, zs)
    roots = [ComplexRoot(complex(z), float(r), int(gr[1]))
             for z, r, gr in zip(zs, res, groups) if r < RESIDUAL_TOL]
    roots.sort(key=lambda r: (-r.lam.real, r.lam.imag))
    return roots


def spectral_seeds(qp: QuasiPoly, region: SearchRegion, iterations: int = 40) -> np.ndarray:
    """Eigenvalues of the frozen-delay matrix at a few real shifts, plus a
    successive-substitution path ``s <- rightmost eig(frozen_matrix(s))``."""
    out = []
    for s in (0.0, region.sigma_hi, 0.5 * region.sigma_lo):
        out.append(np.linalg.eigvals(qp.frozen_matrix(s)))
    s = 0.0 + 0j
    for _ in range(iterations):
        ev = np.linalg.eigvals(qp.frozen_matrix(s))
        nxt = ev[np.argmax(ev.real)]
        if not np.isfinite(nxt) or nxt.real < region.sigma_lo * 4:
            break
        if abs(nxt - s) < 1e-12 * (1 + abs(s)):
            s = nxt
            break
        s = nxt
    out.append(np.linalg.eigvals(qp.frozen_matrix(s)))
    out.append(np.array([s]))
    seeds = np.concatenate(out)
    return seeds[np.isfinite(seeds)]


def _grid(region: SearchRegion, g: int) -> np.ndarray:
    # offsets keep seeds off exact lattice points such as lam = 0
    re = np.linspace(region.sigma_lo, region.sigma_hi, g) + 1.234567e-7
    im = np.linspace(0.0, region.omega, g)
    im[1:] += 2.345678e-7
    return (re[:, None] + 1j * im[None, :]).ravel()


def default_grid(n: int) -> int:
    return 20 if n <= 12 else 10


def find_roots(qp: QuasiPoly, region: SearchRegion | None = None, grid: int | None = None,
               confirmations: int = 2, max_rounds: int = 4) -> list[ComplexRoot]:
    """All roots reached from the seeds.

    The seed grid is refined (seed count doubled per round) until the
    dominant root has stayed put, within 1e-8, for ``confirmations``
    consecutive rounds.
    """
    region = region or SearchRegion.default(qp)
    g = float(grid or default_grid(qp.n))
    floor = region.sigma_lo - 10.0 * (1.0 + abs(region.sigma_lo))
    seeds = np.concatenate([_grid(region, int(g)), spectral_seeds(qp, region)])
    found = newton_roots(qp, seeds, floor=floor, box=region)
    stable = 0
    for _ in range(max_rounds):
        if stable >= confirmations:
            break
        g *= math.sqrt(2.0)
        more = newton_roots(qp, _grid(region, int(round(g))), floor=floor, box=region)
        before = found[0].lam if found else None
        found = _merge(found, more)
        after = found[0].lam if found else None
        if before is not None and after is not None and abs(after - before) < 1e-8:
            stable += 1
        else:
            stable = 0
    return found


def _merge(a: list[ComplexRoot], b: list[ComplexRoot]) -> list[ComplexRoot]:
    out = list(a)
    for r in b:
        for k, q in enumerate(out):
            if abs(q.lam - r.lam) < DEDUP_TOL * (1 + abs(r.lam)):
                out[k] = ComplexRoot(q.lam, min(q.residual, r.residual),
                                     q.multiplicity_hint + r.multiplicity_hint)
                break
        else:
            out.append(r)
    out.sort(key=lambda r: (-r.lam.real, r.lam.imag))
    return out


def dominant_root(qp: QuasiPoly | PinningProblem, region: SearchRegion | None = None,
                  grid: int | None = None, confirmations: int = 2) -> ComplexRoot:
    """Characteristic root with the largest real part (``Im >= 0`` representative)."""
    if isinstance(qp, PinningProblem):
        qp = QuasiPoly.from_problem(qp)
    explicit = region is not None
    region = region or SearchRegion.default(qp)
    for _ in range(3):
        roots = find_roots(qp, region, grid, confirmations)
        if roots:
            return roots[0]
        if explicit:
            break
        region = SearchRegion(4.0 * region.sigma_lo, region.sigma_hi, 2.0 * region.omega)
    raise NoRootFound("no characteristic root found; enlarge the search region or grid")


def verdict_from_root(root: ComplexRoot, tol: float = 1e-8) -> StabilityVerdict:
    return StabilityVerdict.from_real_part(root.lam.real, root.lam, "charroots", tol)
