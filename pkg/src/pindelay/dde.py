"""Fixed-step integration of the delayed error dynamics

    y'(t) = -K y(t) + A y(t - tau_r) - c D y(t - tau_p)

with classical RK4 and cubic Hermite interpolation of the stored past.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, StepTooLarge
from .graph import PinningProblem
from .kernels import StepPlan, interpolation_plan

DIVERGENCE_CAP = 1e12
DEFAULT_HISTORY_SEED = 20240917


class HistoryKind(str, enum.Enum):
    CONSTANT = "Constant"
    SAMPLED = "SampledSegment"


@dataclass(frozen=True, eq=False)
class HistoryFunction:
    """Initial data on ``[-tau_m, 0]``.

    ``values`` is an n-vector for a constant history, or an array of shape
    ``(m, n)`` sampled uniformly on ``[-span, 0]`` (last row at ``t = 0``).
    """

    kind: HistoryKind
    values: np.ndarray
    span: float = 0.0

    @classmethod
    def constant(cls, values) -> "HistoryFunction":
        return cls(HistoryKind.CONSTANT, np.atleast_1d(np.asarray(values, dtype=float)))

    @classmethod
    def sampled(cls, values, span: float) -> "HistoryFunction":
        v = np.asarray(values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] < 2 or span <= 0:
            raise DomainError("a sampled history needs at least two samples over a positive span")
        return cls(HistoryKind.SAMPLED, v, float(span))

    @classmethod
    def random_constant(cls, n: int, seed: int = DEFAULT_HISTORY_SEED) -> "HistoryFunction":
        rng = np.random.Generator(np.random.PCG64(seed))
        return cls.constant(rng.uniform(-1.0, 1.0, size=n))

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    def scaled(self, alpha: float) -> "HistoryFunction":
        return HistoryFunction(self.kind, alpha * self.values, self.span)

    def evaluate(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values and derivatives at times ``t <= 0``, shape ``(len(t), n)``."""
        t = np.asarray(t, dtype=float)
        if self.kind is HistoryKind.CONSTANT:
            return np.tile(self.values, (t.size, 1)), np.zeros((t.size, self.n))
        grid = np.linspace(-self.span, 0.0, self.values.shape[0])
        if np.any(t < -self.span - 1e-9 * self.span):
            raise DomainError(f"history covers [-{self.span}, 0] but earlier values are needed")
        if grid.size >= 4:
            cs = CubicSpline(grid, self.values, axis=0)
            return cs(t), cs(t, 1)
        # too few samples for a cubic: piecewise linear
        vals = np.column_stack([np.interp(t, grid, self.values[:, i]) for i in range(self.n)])
        slopes = np.diff(self.values, axis=0) / np.diff(grid)[:, None]
        seg = np.clip(np.searchsorted(grid, t, side="right") - 1, 0, grid.size - 2)
        return vals, slopes[seg]


@dataclass(frozen=True, eq=False)
class Trajectory:
    t0: float
    h: float
    samples: np.ndarray  # rows y(t0 + k h), k = 0..
    delays: tuple[float, float]
    history: np.ndarray  # rows before t0, same spacing
    diverged: bool = False
    offset: float = 0.0  # added to every sample (x = y + s)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.samples.shape[0])

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]

    def to_csv(self, path_or_file) -> None:
        """Header ``t,y0,...``; 17 significant digits, so floats round-trip."""
        n = self.samples.shape[1]
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t"] + [f"y{i}" for i in range(n)])
            for t, row in zip(self.times, self.samples):
                w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])
        finally:
            if own:
                fh.close()


def default_step(tau_r: float, tau_p: float) -> float:
    positive = [t for t in (tau_r, tau_p) if t > 0]
    if not positive:
        return 1e-3
    return min(positive + [0.01]) / 4.0


def check_step(h: float, tau_r: float, tau_p: float) -> None:
    if not (h > 0 and math.isfinite(h)):
        raise DomainError(f"step must be positive, got {h}")
    positive = [t for t in (tau_r, tau_p) if t > 0]
    if positive and h > min(positive) / 4.0 * (1.0 + 1e-12):
        raise StepTooLarge(f"step {h} exceeds a quarter of the smallest positive delay {min(positive)}")


class Integrator:
    """Owns a buffer laid out as ``[history rows | t0 | steps...]``."""

    def __init__(self, problem: PinningProblem, h: float, backend: str | None = None):
        check_step(h, problem.tau_r, problem.tau_p)
        off, wts, zero = interpolation_plan((problem.tau_r, problem.tau_p), h)
        kw = {} if backend is None else {"backend": backend}
        self.plan = StepPlan(h, problem.system.K, problem.system.A, problem.pins.indicator(),
                             problem.c, off, wts, zero, **kw)
        self.problem = problem
        self.h = h
        self.lookback = self.plan.lookback

    def buffers(self, history: HistoryFunction, steps: int):
        n = self.problem.n
        if history.n != n:
            raise DomainError(f"history has dimension {history.n}, problem has {n}")
        H = self.lookback
        rows = H + steps + 1
        Y = np.zeros((rows, n))
        DL = np.zeros((rows, n))
        DR = np.zeros((rows, n))
        t = self.h * np.arange(-H, 1)
        vals, ders = history.evaluate(t)
        Y[:H + 1] = vals
        DL[:H + 1] = ders
        DR[:H + 1] = ders
        return Y, DL, DR


def simulate(problem: PinningProblem, history: HistoryFunction | None = None, T: float = 10.0,
             h: float | None = None, backend: str | None = None) -> Trajectory:
    """Integrate on ``[0, T]`` with step ``h``.

    Samples are returned at ``t = k h`` for ``k <= floor(T / h)``.  If any
    component exceeds 1e12 in magnitude the run stops and the trajectory
    is flagged ``diverged`` (all returned samples are finite).
    """
    h = default_step(problem.tau_r, problem.tau_p) if h is None else float(h)
    if history is None:
        history = HistoryFunction.random_constant(problem.n)
    if not T >= h:
        raise DomainError(f"horizon {T} shorter than the step {h}")
    steps = int(math.floor(T / h + 1e-9))
    integ = Integrator(problem, h, backend)
    Y, DL, DR = integ.buffers(history, steps)
    H = integ.lookback
    done, diverged = integ.plan.advance(Y, DL, DR, H, steps, DIVERGENCE_CAP)
    # a diverged run drops the offending step
    last = H + done + (0 if diverged else 1)
    return Trajectory(0.0, h, Y[H:last].copy(), (problem.tau_r, problem.tau_p),
                      Y[:H].copy(), bool(diverged))


def simulate_x(problem: PinningProblem, x_history: HistoryFunction | None = None, T: float = 10.0,
               h: float | None = None, backend: str | None = None) -> Trajectory:
    """Simulate the agent states ``x = y + s`` for a history given in ``x``."""
    s = problem.s
    if x_history is None:
        y_hist = None
    else:
        y_hist = HistoryFunction(x_history.kind, x_history.values - s, x_history.span)
    tr = simulate(problem, y_hist, T, h, backend)
    return Trajectory(tr.t0, tr.h, tr.samples + s, tr.delays, tr.history + s, tr.diverged, s)
