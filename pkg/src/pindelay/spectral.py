"""Laplacian eigen-decomposition with biorthonormal left/right eigenvectors."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import ComplexSpectrum, NonDiagonalizable, NotStronglyConnected
from .graph import DirectedGraph, LaplacianSystem, PinSet

COND_LIMIT = 1e10
ZERO_TOL = 1e-9  # relative to ||L||
REAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralDecomp:
    """Eigenvalues sorted by real part, ``right[:, i]`` / ``left[:, i]``
    scaled so ``left.T @ right == I``.

    ``weights[i] = right[p, i] * left[p, i]`` for the pinned node ``p``;
    these are the residues of ``((lam I + L)^{-1})[p, p]`` at ``-theta_i``
    and always sum to one.
    """

    thetas: np.ndarray
    right: np.ndarray
    left: np.ndarray
    zero_index: int | None
    unique_zero: bool
    diagonalizable: bool
    real_spectrum: bool
    condition: float
    pinned: int

    @property
    def n(self) -> int:
        return self.thetas.size

    @property
    def weights(self) -> np.ndarray:
        return self.right[self.pinned, :] * self.left[self.pinned, :]

    @property
    def xi(self) -> np.ndarray:
        return self.right[self.pinned, :]

    @property
    def zeta(self) -> np.ndarray:
        return self.left[self.pinned, :]

    def real_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """``(thetas, weights)`` as real arrays; refuses complex spectra."""
        if not self.real_spectrum:
            raise ComplexSpectrum("this analysis needs a real Laplacian spectrum")
        return self.thetas.real.copy(), self.weights.real.copy()

    def require_diagonalizable(self) -> None:
        if not self.diagonalizable:
            raise NonDiagonalizable(
                f"eigenvector matrix condition number {self.condition:.3g} exceeds {COND_LIMIT:g}")

    def to_json(self) -> str:
        def cplx(a):
            return [[float(z.real), float(z.imag)] for z in np.ravel(a)]
        return json.dumps({
            "thetas": cplx(self.thetas),
            "weights": cplx(self.weights),
            "zero_index": self.zero_index,
            "unique_zero": self.unique_zero,
            "diagonalizable": self.diagonalizable,
            "real_spectrum": self.real_spectrum,
            "condition": self.condition,
            "pinned": self.pinned,
        })


def _pair_left(thetas, right, lthetas, lvecs):
    """Greedy nearest pairing of left eigenvectors onto the right ones, then
    block biorthonormalisation inside clusters of equal eigenvalues."""
    n = thetas.size
    scale = max(1.0, float(np.max(np.abs(thetas))))
    free = list(range(n))
    left = np.empty_like(right, dtype=complex)
    for i in range(n):
        d = [abs(lthetas[k] - thetas[i]) for k in free]
        k = free.pop(int(np.argmin(d)))
        left[:, i] = lvecs[:, k]
    # clusters: eigenvalues equal within tolerance
    tol = 1e-7 * scale
    done = np.zeros(n, dtype=bool)
    for i in range(n):
        if done[i]:
            continue
        idx = np.flatnonzero((np.abs(thetas - thetas[i]) < tol) & ~done)
        done[idx] = True
        M = left[:, idx].T @ right[:, idx]
        left[:, idx] = left[:, idx] @ np.linalg.inv(M).T
    return left


def eigendecompose(sys: LaplacianSystem | np.ndarray, pinned_node: int = 0) -> SpectralDecomp:
    L = np.asarray(sys.L if isinstance(sys, LaplacianSystem) else sys, dtype=float)
    n = L.shape[0]
    if not 0 <= pinned_node < n:
        raise ValueError(f"pinned node {pinned_node} out of range")
    th, X = np.linalg.eig(L)
    order = np.lexsort((th.imag, th.real))
    th, X = th[order].astype(complex), X[:, order].astype(complex)
    normL = max(np.linalg.norm(L, 2), 1.0)
    small = np.abs(th) < ZERO_TOL * normL
    th[small] = 0.0
    # column normalisation keeps the condition number meaningful
    X = X / np.linalg.norm(X, axis=0)
    cond = float(np.linalg.cond(X))
    diagonalizable = bool(np.isfinite(cond) and cond < COND_LIMIT)
    lth, Y = np.linalg.eig(L.T)
    lth = lth.astype(complex)
    lth[np.abs(lth) < ZERO_TOL * normL] = 0.0
    if diagonalizable:
        left = _pair_left(th, X, lth, Y.astype(complex))
    else:
        left = np.full_like(X, np.nan)
    real = bool(np.all(np.abs(th.imag) <= REAL_TOL * normL))
    if real:
        th = th.real.astype(complex)
    zeros = np.flatnonzero(small)
    zero_index = int(zeros[0]) if zeros.size else None
    return SpectralDecomp(
        thetas=th, right=X, left=left, zero_index=zero_index,
        unique_zero=zeros.size == 1, diagonalizable=diagonalizable,
        real_spectrum=real, condition=cond, pinned=pinned_node,
    )


def zero_eigvec_pair(sys: LaplacianSystem, graph: DirectedGraph | None = None):
    """``(phi, psi)`` with ``phi = 1`` and ``psi`` the left null vector of
    ``L`` scaled to sum to one."""
    L = np.asarray(sys.L)
    n = L.shape[0]
    if graph is not None:
        from .graph import is_strongly_connected
        if not is_strongly_connected(graph):
            raise NotStronglyConnected("graph is not strongly connected")
    phi = np.ones(n)
    if n == 1:
        return phi, np.ones(1)
    ns = null_space(L.T, rcond=1e-10)
    if ns.shape[1] != 1:
        raise NotStronglyConnected(f"zero eigenvalue has multiplicity {ns.shape[1]}")
    psi = ns[:, 0] / ns[:, 0].sum()
    if np.any(psi <= 0):
        raise NotStronglyConnected("left null vector is not strictly positive")
    return phi, psi


def undelayed_spectral_abscissa(sys: LaplacianSystem, pins: PinSet, c: float) -> float:
    """Largest real part of the spectrum of ``-(L + c D)``."""
    M = -(np.asarray(sys.L) + c * pins.matrix())
    return float(np.max(np.linalg.eigvals(M).real))


def gershgorin_discs(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row Gershgorin discs ``(centres, radii)`` of a square matrix."""
    M = np.asarray(M)
    centres = np.diag(M).copy()
    radii = np.abs(M).sum(axis=1) - np.abs(centres)
    return centres, radii
