"""Largest Lyapunov exponent of the linear delay system from segment-norm growth."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dde import HistoryFunction, Integrator
from .errors import DegenerateNorm, DomainError, NonConvergence
from .graph import PinningProblem
from .spectral import undelayed_spectral_abscissa

BURN_IN = 0.2
CONVERGENCE_REL = 0.05
CONVERGENCE_ABS = 1e-3  # rates this close to zero count as settled
_RENORM_CAP = 1e150


@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    segments_used: int
    per_segment_logs: np.ndarray = field(repr=False)
    converged: bool
    method: str = "segments"
    h: float | None = None
    tau_m: float = 0.0


def choose_step(problem: PinningProblem, samples_per_segment: int) -> tuple[float, int]:
    """``(h, r)`` with ``h = tau_m / (samples_per_segment * r)`` for the
    smallest integer ``r`` meeting the delay rule (``h <= min delay / 4``)
    and an accuracy cap of ``0.5 / rate`` for the fastest undelayed rate."""
    tau_m = problem.tau_m
    positive = [t for t in (problem.tau_r, problem.tau_p) if t > 0]
    K = np.asarray(problem.system.K)
    scale = float(np.max(2.0 * K + problem.c * problem.pins.indicator(), initial=0.0))
    cap = min(min(positive) / 4.0, 0.5 / scale if scale > 0 else math.inf)
    r = max(1, math.ceil(tau_m / (samples_per_segment * cap) - 1e-9))
    return tau_m / (samples_per_segment * r), r


def largest_exponent(problem: PinningProblem, history: HistoryFunction | None = None,
                     N_segments: int = 400, samples_per_segment: int = 64,
                     burn_in: float = BURN_IN, backend: str | None = None) -> ExponentEstimate:
    """Average log growth of the sampled state over segments of length
    ``tau_m = max(tau_r, tau_p)``.

    After every segment the stored past is rescaled to unit sample norm,
    which keeps magnitudes bounded without changing the linear dynamics.
    The first ``burn_in`` fraction of segments is discarded.  Without
    delays the exponent is the spectral abscissa of ``-(L + c D)``, and
    that is returned with ``method='spectral_abscissa'``.
    """
    tau_m = problem.tau_m
    if tau_m == 0:
        value = undelayed_spectral_abscissa(problem.system, problem.pins, problem.c)
        return ExponentEstimate(value, 0, np.empty(0), True, "spectral_abscissa", None, 0.0)
    if N_segments < 50:
        raise DomainError("need at least 50 segments")
    if samples_per_segment < 16:
        raise DomainError("need at least 16 samples per segment")
    if history is None:
        history = HistoryFunction.random_constant(problem.n)
    M = samples_per_segment
    h, r = choose_step(problem, M)
    S = M * r
    integ = Integrator(problem, h, backend)
    L = integ.lookback
    Y, DL, DR = integ.buffers(history, S)
    picks = L - S + r * np.arange(1, M + 1)  # the M samples of the segment ending at row L
    picks = picks[picks >= 0]
    norm0 = float(np.linalg.norm(Y[picks])) if picks.size else float(np.linalg.norm(Y[L]))
    if not norm0 > 0:
        raise DegenerateNorm("initial history is identically zero")
    for B in (Y, DL, DR):
        B /= norm0
    seg = L + r * np.arange(1, M + 1)
    logs = np.empty(N_segments)
    for k in range(N_segments):
        done, diverged = integ.plan.advance(Y, DL, DR, L, S, _RENORM_CAP)
        if diverged:
            raise NonConvergence("state left the representable range within one segment")
        nrm = float(np.linalg.norm(Y[seg]))
        if not nrm > 0:
            raise DegenerateNorm(f"segment {k} has zero norm")
        logs[k] = math.log(nrm)
        tail = slice(S, S + L + 1)
        for B in (Y, DL, DR):
            B[:L + 1] = B[tail] / nrm
    start = int(math.floor(burn_in * N_segments))
    used = logs[start:]
    value = float(used.sum() / (used.size * tau_m))
    three_q = start + 3 * (N_segments - start) // 4
    earlier = float(logs[start:three_q].sum() / ((three_q - start) * tau_m))
    converged = abs(earlier - value) < max(CONVERGENCE_REL * abs(value), CONVERGENCE_ABS)
    return ExponentEstimate(value, used.size, logs, bool(converged), "segments", h, tau_m)
