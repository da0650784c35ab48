"""Command-line interface: ``pindelay <command> [options]``.

Exit codes: 0 success, 2 usage error, 3 precondition/domain error,
4 numerical failure.  Option values come from the command line first,
then from a JSON config file (``--config``, with ``"schema": 1``), then
from built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import math
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import lambert_stability_test, single_node_tau_pM, tau_p_star
from .charroots import QuasiPoly, dominant_root, find_roots, verdict_from_root
from .dde import DEFAULT_HISTORY_SEED, HistoryFunction, simulate, simulate_x
from .errors import DomainError, NumericalError, PinDelayError
from .graph import (
    PinningProblem, PinSet, check_hypothesis_H, erdos_renyi, has_spanning_tree,
    laplacian, load_graph, random_pins, save_graph, strongly_connected_components,
)
from .lyapunov import largest_exponent
from .spectral import eigendecompose
from .sweep import SweepAxis, SweepSettings, gnuplot_script, run_sweep

CONFIG_SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULTS = {
    "graph": None, "er": None, "pins": None, "pin_count": None, "pin_seed": 0,
    "c": 1.0, "tau_r": 0.0, "tau_p": 0.0, "s": 0.0,
    "T": 10.0, "h": None, "seed": DEFAULT_HISTORY_SEED, "coords": "y",
    "segments": 400, "samples": 64,
    "method": "taup_star", "tau": None,
    "count": 1,
    "axis1": None, "axis2": None, "methods": "charroots", "tau_p_times_c": None, "jobs": 1,
    "gnuplot": None, "out": None,
    "n": None, "p": None,
}


class UsageError(Exception):
    pass


# -- argument plumbing ------------------------------------------------------

def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must be in [0, 1], got {text}")
    return v


def _nonneg(text: str) -> float:
    v = float(text)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a finite nonnegative number, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_problem_args(p: argparse.ArgumentParser, delays: bool = True) -> None:
    g = p.add_argument_group("network")
    g.add_argument("--graph", help="graph JSON file ({\"n\": ..., \"edges\": [[i, j, w], ...]})")
    g.add_argument("--er", nargs=3, metavar=("N", "P", "SEED"),
                   help="use a seeded Erdos-Renyi graph instead of a file")
    g.add_argument("--pins", help="comma-separated pinned node indices")
    g.add_argument("--pin-count", type=int, help="pin this many nodes chosen at random")
    g.add_argument("--pin-seed", type=int, help="seed for --pin-count (default 0)")
    g.add_argument("--c", type=_nonneg, help="pinning gain (default 1)")
    if delays:
        g.add_argument("--tau-r", type=_nonneg, help="transmission delay (default 0)")
        g.add_argument("--tau-p", type=_nonneg, help="pinning delay (default 0)")
        g.add_argument("--s", type=float, help="reference value (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pindelay",
        description="Delay bounds, characteristic roots, simulation and Lyapunov exponents "
                    "for pinning-controlled consensus networks.")
    parser.add_argument("--version", action="version", version=f"pindelay {__version__}")
    parser.add_argument("--config", help="JSON config file (flags override it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded Erdos-Renyi graph")
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--p", type=_probability)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = sub.add_parser("check", help="connectivity and pinning-hypothesis report")
    _add_problem_args(p, delays=False)
    p.add_argument("--out")

    p = sub.add_parser("bound", help="admissible pinning-delay bounds")
    _add_problem_args(p, delays=False)
    p.add_argument("--method", choices=["taup_star", "tau_pM", "lambert"])
    p.add_argument("--tau", type=_nonneg, help="common delay for --method lambert")
    p.add_argument("--out")

    p = sub.add_parser("roots", help="dominant characteristic root")
    _add_problem_args(p)
    p.add_argument("--count", type=_positive_int, help="also list this many rightmost roots")
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="integrate the delayed dynamics, CSV output")
    _add_problem_args(p)
    p.add_argument("--T", type=_nonneg, help="horizon (default 10)")
    p.add_argument("--h", type=float, help="step (default: a quarter of the smallest delay)")
    p.add_argument("--seed", type=int, help="seed of the random constant history")
    p.add_argument("--coords", choices=["y", "x"], help="error coordinates y or states x = y + s")
    p.add_argument("--out")

    p = sub.add_parser("lyapunov", help="largest Lyapunov exponent")
    _add_problem_args(p)
    p.add_argument("--segments", type=_positive_int)
    p.add_argument("--samples", type=_positive_int)
    p.add_argument("--seed", type=int, help="seed of the random constant history")
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="evaluate a parameter grid, CSV + gnuplot script")
    _add_problem_args(p)
    p.add_argument("--axis1", help="e.g. c=0.1,0.2 or tau_p=0:1:21")
    p.add_argument("--axis2")
    p.add_argument("--methods", help="comma list from bound,charroots,lyapunov,small_c,large_c")
    p.add_argument("--tau-p-times-c", type=_nonneg, help="set tau_p = value / c in every cell")
    p.add_argument("--segments", type=_positive_int)
    p.add_argument("--samples", type=_positive_int)
    p.add_argument("--seed", type=int, help="seed of the random constant history")
    p.add_argument("--jobs", type=_positive_int, help="worker processes (capped by PINDELAY_THREADS)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--gnuplot", help="gnuplot script path (default <out>.gp)")
    return parser


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    if data.get("schema") != CONFIG_SCHEMA:
        raise UsageError(f"config schema must be {CONFIG_SCHEMA}, got {data.get('schema')!r}")
    unknown = set(data) - set(DEFAULTS) - {"schema"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def resolve(args: argparse.Namespace, config: dict) -> dict:
    """flags > config > defaults."""
    opts = {}
    for key, default in DEFAULTS.items():
        v = getattr(args, key, None)
        if v is None:
            v = config.get(key, default)
        opts[key] = v
    return opts


def _problem_parts(opts: dict):
    if opts["graph"] and opts["er"]:
        raise UsageError("give either --graph or --er, not both")
    if opts["graph"]:
        g = load_graph(opts["graph"])
    elif opts["er"]:
        n, p, seed = opts["er"]
        try:
            n, p, seed = int(n), float(p), int(seed)
        except ValueError:
            raise UsageError("--er expects N P SEED") from None
        if not 0 <= p <= 1:
            raise UsageError(f"probability must be in [0, 1], got {p}")
        g = erdos_renyi(n, p, seed)
    else:
        raise UsageError("a network is required: --graph FILE or --er N P SEED")
    if opts["pins"] is not None and opts["pin_count"] is not None:
        raise UsageError("give either --pins or --pin-count, not both")
    if opts["pin_count"] is not None:
        pins = random_pins(g.n, int(opts["pin_count"]), int(opts["pin_seed"]))
    elif opts["pins"] is not None:
        raw = opts["pins"]
        try:
            members = [int(v) for v in raw.split(",") if v.strip()] if isinstance(raw, str) else [int(v) for v in raw]
        except ValueError:
            raise UsageError(f"--pins expects comma-separated integers, got {raw!r}") from None
        pins = PinSet(tuple(members), g.n)
    else:
        pins = PinSet((), g.n)
    return g, pins


def _problem(opts: dict) -> PinningProblem:
    g, pins = _problem_parts(opts)
    return PinningProblem(laplacian(g), pins, float(opts["c"]), float(opts["tau_r"]),
                          float(opts["tau_p"]), float(opts["s"]))


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return _cplx(v)
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


class Output:
    def __init__(self, argv, seed):
        self.command = "pindelay " + shlex.join(argv)
        self.seed = seed

    def json(self, result: dict, path=None) -> None:
        doc = {"tool_version": __version__, "seed": self.seed, "command": self.command,
               "result": _jsonable(result)}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if path:
            Path(path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


# -- commands -----------------------------------------------------------------

def cmd_generate(opts, out: Output):
    missing = [k for k in ("n", "p", "out") if opts[k] is None]
    if missing:
        raise UsageError("generate needs " + ", ".join("--" + k for k in missing))
    if not 0 <= float(opts["p"]) <= 1:
        raise UsageError(f"probability must be in [0, 1], got {opts['p']}")
    g = erdos_renyi(int(opts["n"]), float(opts["p"]), int(opts["seed"]))
    save_graph(g, opts["out"])
    out.json({"written": str(opts["out"]), "n": g.n, "edges": len(g.edges())})


def cmd_check(opts, out: Output):
    g, pins = _problem_parts(opts)
    rep = strongly_connected_components(g)
    result = {
        "n": g.n,
        "edges": len(g.edges()),
        "strongly_connected": len(rep.components) == 1,
        "spanning_tree": has_spanning_tree(g),
        "components": [list(c) for c in rep.components],
        "source_components": [list(c) for c in rep.source_components],
        "pins": list(pins.members),
        "hypothesis_H": check_hypothesis_H(g, pins) if pins.m else False,
    }
    out.json(result, opts["out"])


def cmd_bound(opts, out: Output):
    g, pins = _problem_parts(opts)
    sys_ = laplacian(g)
    c = float(opts["c"])
    method = opts["method"]
    if pins.m == 0:
        raise DomainError("at least one pinned node is required")
    if method == "taup_star":
        r = tau_p_star(c, [sys_.K[i] for i in pins.members])
        result = {"method": method, "value": r.value, "capped": r.capped, "diagnostics": r.diagnostics}
    elif method == "tau_pM":
        if pins.m != 1:
            raise DomainError("tau_pM applies to a single pinned node")
        r = single_node_tau_pM(eigendecompose(sys_, pins.members[0]), c)
        result = {"method": method, "value": r.value, "pinned_node": pins.members[0],
                  "diagnostics": r.diagnostics}
    else:
        if pins.m != 1:
            raise DomainError("the Lambert test applies to a single pinned node")
        if opts["tau"] is None:
            raise UsageError("--method lambert needs --tau")
        v = lambert_stability_test(sys_, pins.members[0], c, float(opts["tau"]))
        result = {"method": method, "tau": float(opts["tau"]), "verdict": v.verdict.value,
                  "dominant": v.dominant, "detail": v.method}
    out.json(result, opts["out"])


def cmd_roots(opts, out: Output):
    pr = _problem(opts)
    root = dominant_root(pr)
    result = {"dominant": root.lam, "residual": root.residual,
              "verdict": verdict_from_root(root).verdict.value}
    if int(opts["count"]) > 1:
        roots = find_roots(QuasiPoly.from_problem(pr))
        result["roots"] = [r.lam for r in roots[:int(opts["count"])]]
    out.json(result, opts["out"])


def cmd_simulate(opts, out: Output):
    pr = _problem(opts)
    hist = HistoryFunction.random_constant(pr.n, int(opts["seed"]))
    T = float(opts["T"])
    h = opts["h"]
    if opts["coords"] == "x":
        hist = HistoryFunction.constant(hist.values + pr.s)
        tr = simulate_x(pr, hist, T, h)
    else:
        tr = simulate(pr, hist, T, h)
    if tr.diverged:
        print(f"warning: trajectory exceeded 1e12 and was truncated at t={tr.times[-1]:.6g}",
              file=sys.stderr)
    if opts["out"]:
        tr.to_csv(opts["out"])
    else:
        tr.to_csv(sys.stdout)


def cmd_lyapunov(opts, out: Output):
    pr = _problem(opts)
    hist = HistoryFunction.random_constant(pr.n, int(opts["seed"]))
    est = largest_exponent(pr, hist, int(opts["segments"]), int(opts["samples"]))
    result = {"value": est.value, "converged": est.converged, "method": est.method,
              "segments_used": est.segments_used, "h": est.h, "tau_m": est.tau_m}
    if est.method == "spectral_abscissa":
        result["note"] = "no delay: spectral abscissa of -(L + cD) reported instead of a simulation"
    out.json(result, opts["out"])


def cmd_sweep(opts, out: Output):
    if not opts["axis1"]:
        raise UsageError("--axis1 is required")
    try:
        axis1 = SweepAxis.parse(opts["axis1"])
        axis2 = SweepAxis.parse(opts["axis2"]) if opts["axis2"] else None
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    g, pins = _problem_parts(opts)
    methods = [m.strip() for m in str(opts["methods"]).split(",") if m.strip()]
    settings = SweepSettings(float(opts["c"]), float(opts["tau_r"]), float(opts["tau_p"]),
                             None if opts["tau_p_times_c"] is None else float(opts["tau_p_times_c"]),
                             int(opts["segments"]), int(opts["samples"]), int(opts["seed"]))
    try:
        grid = run_sweep(laplacian(g), pins, axis1, axis2, methods, settings, int(opts["jobs"]))
    except DomainError as exc:
        if "method" in str(exc) or "axes" in str(exc):
            raise UsageError(str(exc)) from None
        raise
    if opts["out"]:
        with open(opts["out"], "w", newline="") as fh:
            grid.to_csv(fh)
        gp = opts["gnuplot"] or str(opts["out"]) + ".gp"
        Path(gp).write_text(gnuplot_script(grid, Path(opts["out"]).name), encoding="utf-8")
    else:
        grid.to_csv(sys.stdout)
        if opts["gnuplot"]:
            Path(opts["gnuplot"]).write_text(gnuplot_script(grid, "-"), encoding="utf-8")


COMMANDS = {
    "generate": cmd_generate, "check": cmd_check, "bound": cmd_bound, "roots": cmd_roots,
    "simulate": cmd_simulate, "lyapunov": cmd_lyapunov, "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = load_config(args.config) if args.config else {}
        opts = resolve(args, config)
        seed = opts["seed"] if args.command in ("generate", "simulate", "lyapunov", "sweep") else None
        if opts["er"] and seed is None:
            seed = int(opts["er"][2])
        COMMANDS[args.command](opts, Output(argv, seed))
    except UsageError as exc:
        print(f"pindelay {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"pindelay {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"pindelay {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PinDelayError as exc:
        print(f"pindelay {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
