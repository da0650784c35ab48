"""Two-parameter stability sweeps written as CSV plus a gnuplot script."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import tau_p_star
from .charroots import dominant_root, verdict_from_root
from .dde import HistoryFunction
from .errors import DomainError, PinDelayError
from .graph import LaplacianSystem, PinningProblem, PinSet
from .lyapunov import largest_exponent
from .perturbation import large_c_dominant, reduced_system, small_c_dominant
from .verdict import StabilityVerdict

AXIS_NAMES = ("c", "tau_r", "tau_p")
METHODS = ("bound", "charroots", "lyapunov", "small_c", "large_c")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise DomainError(f"unknown sweep parameter {self.name!r}; choose from {AXIS_NAMES}")
        if not self.values:
            raise DomainError(f"axis {self.name} has no values")

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """``name=v1,v2,...`` or ``name=start:stop:count`` (inclusive linspace)."""
        name, sep, rest = text.partition("=")
        if not sep or not rest.strip():
            raise DomainError(f"axis spec {text!r} should look like c=0.1,0.2 or c=0:1:11")
        if rest.count(":") == 2:
            a, b, k = rest.split(":")
            vals = np.linspace(float(a), float(b), int(k))
        else:
            vals = [float(v) for v in rest.split(",") if v.strip()]
        return cls(name.strip(), tuple(float(v) for v in vals))


@dataclass(frozen=True)
class SweepSettings:
    c: float = 1.0
    tau_r: float = 0.0
    tau_p: float = 0.0
    tau_p_times_c: float | None = None  # when set, tau_p = this / c in every cell
    segments: int = 400
    samples: int = 64
    history_seed: int = 20240917


@dataclass
class SweepGrid:
    axis1: SweepAxis
    axis2: SweepAxis | None
    methods: tuple[str, ...]
    cells: list[dict] = field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        cols = [self.axis1.name] + ([self.axis2.name] if self.axis2 else [])
        cols += [k for k in AXIS_NAMES if k not in cols]
        for m in self.methods:
            cols += [f"{m}_value", f"{m}_verdict"]
        return cols

    def to_csv(self, fh) -> None:
        cols = self.columns
        fh.write(",".join(cols) + "\n")
        for cell in self.cells:
            fh.write(",".join(_fmt(cell.get(k, "")) for k in cols) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _cell(system: LaplacianSystem, pins: PinSet, params: dict, methods, settings: SweepSettings) -> dict:
    out = dict(params)
    c, tau_r, tau_p = params["c"], params["tau_r"], params["tau_p"]
    for m in methods:
        try:
            problem = PinningProblem(system, pins, c, tau_r, tau_p)
            if m == "bound":
                b = tau_p_star(c, [system.K[i] for i in pins.members])
                value = b.value - tau_p
                verdict = "Stable" if value > 0 else "Unknown"
            elif m == "charroots":
                root = dominant_root(problem)
                value = root.lam.real
                verdict = verdict_from_root(root).verdict.value
            elif m == "lyapunov":
                hist = HistoryFunction.random_constant(system.n, settings.history_seed)
                est = largest_exponent(problem, hist, settings.segments, settings.samples)
                value = est.value
                verdict = StabilityVerdict.from_real_part(value, None, "lyapunov", 1e-3).verdict.value
                if est.method != "segments":
                    verdict += f"({est.method})"
            elif m == "small_c":
                value = small_c_dominant(system, pins, tau_r, c).dominant_root_estimate.real
                verdict = "Estimate"
            elif m == "large_c":
                K2, A22, _ = reduced_system(system, pins)
                value = large_c_dominant(K2, A22, tau_r).dominant_root_estimate.real
                verdict = "Estimate"
            else:
                raise DomainError(f"unknown method {m}")
        except PinDelayError as exc:
            value, verdict = math.nan, f"ERROR:{type(exc).__name__}"
        out[f"{m}_value"] = float(value)
        out[f"{m}_verdict"] = verdict
    return out


def _cell_star(args):
    return _cell(*args)


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("PINDELAY_THREADS")
    n = requested or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise DomainError(f"PINDELAY_THREADS must be an integer, got {cap!r}")
    return max(1, n)


def run_sweep(system: LaplacianSystem, pins: PinSet, axis1: SweepAxis, axis2: SweepAxis | None,
              methods, settings: SweepSettings = SweepSettings(), jobs: int | None = None) -> SweepGrid:
    """Evaluate every cell; axis1 is the outer loop.  Rows come back in
    index order whatever the number of workers."""
    methods = tuple(methods)
    if not methods:
        raise DomainError("choose at least one method")
    for m in methods:
        if m not in METHODS:
            raise DomainError(f"unknown method {m!r}; choose from {METHODS}")
    if axis2 is not None and axis2.name == axis1.name:
        raise DomainError("the two axes must be different parameters")
    tasks = []
    for v1 in axis1.values:
        for v2 in (axis2.values if axis2 else (None,)):
            params = {"c": settings.c, "tau_r": settings.tau_r, "tau_p": settings.tau_p,
                      axis1.name: v1}
            if axis2 is not None:
                params[axis2.name] = v2
            if settings.tau_p_times_c is not None:
                params["tau_p"] = settings.tau_p_times_c / params["c"] if params["c"] > 0 else math.inf
            tasks.append((system, pins, params, methods, settings))
    workers = worker_count(jobs)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_cell_star, tasks))
    else:
        cells = [_cell_star(t) for t in tasks]
    return SweepGrid(axis1, axis2, methods, cells)


def gnuplot_script(grid: SweepGrid, csv_name: str) -> str:
    """A plotting script for the CSV; one curve per value of the second
    axis, or a colour-coded scatter of the first method for two axes."""
    cols = grid.columns
    lines = [
        "# gnuplot script for " + csv_name,
        "set datafile separator ','",
        "set key outside",
        f"set xlabel '{grid.axis1.name}'",
    ]
    first = cols.index(f"{grid.methods[0]}_value") + 1
    if grid.axis2 is not None and len(grid.axis2.values) > 1:
        lines += [
            f"set ylabel '{grid.axis2.name}'",
            f"set cblabel '{grid.methods[0]}'",
            f"plot '{csv_name}' skip 1 using 1:2:{first} with points pt 5 palette notitle",
        ]
    else:
        lines.append("set ylabel 'value'")
        parts = [f"'{csv_name}' skip 1 using 1:{cols.index(f'{m}_value') + 1} with linespoints title '{m}'"
                 for m in grid.methods]
        lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"
