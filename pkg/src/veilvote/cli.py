"""Command-line front end.

    veilvote equilibrium --p0 0.6 --c 0.1 --r 1 --la 35 --lb 3
    veilvote sweep-cost --p0 0.6 --r 1 --la 35 --lb 3 --grid 400 --out cost_sweep.csv

Single computations print JSON to stdout; sweeps write CSV to --out (or
stdout).  Exit codes: 0 ok, 1 model error, 2 usage error, 3 I/O error.
A JSON output fed back through --config reproduces the same run.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field

from . import __version__
from .analysis import (
    approval_report,
    default_cost_grid,
    ex_ante_payoffs,
    sweep_cost,
    sweep_prior,
)
from .arrival import check_mlr, equilibrium_general, exponential, from_spec
from .errors import InvalidRuleWarning, ModelError, OutOfRange
from .model import ModelParams, solve_equilibrium
from .simulate import SimConfig, compare_closed_form, run_sim
from .welfare import optimal_rule

COMMANDS = ("equilibrium", "approve", "payoffs", "welfare", "sweep-cost",
            "sweep-prior", "simulate", "general")
PARAM_KEYS = ("p0", "c", "r", "la", "lb")
_ALIASES = {"lambda_a": "la", "lambda_b": "lb"}
DEFAULTS = {
    "variant": "discounted",
    "grid": 400,
    "n": 1_000_000,
    "seed": 0,
    "deadline": None,
    "workers": 1,
    "backend": None,
    "alpha": None,
    "out": None,
    "process": None,
    "grid_size": 512,
}
COMMAND_OPTIONS = {
    "equilibrium": (),
    "approve": ("variant",),
    "payoffs": ("variant",),
    "welfare": ("alpha",),
    "sweep-cost": ("grid", "out", "variant"),
    "sweep-prior": ("grid", "out", "variant"),
    "simulate": ("n", "seed", "deadline", "workers", "backend"),
    "general": ("process", "grid_size"),
}
PRIOR_NOTE = ("approval probability and both payoffs decrease in p0 above p_star "
              "(payoff_A constant at 0 when c >= c_bar, payoff_B constant at 0 when c = 1/2)")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict
    options: dict = field(default_factory=dict)

    def model_params(self, **override) -> ModelParams:
        p = {**self.params, **override}
        return ModelParams(p["p0"], p["c"], p["r"], p["la"], p["lb"])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="veilvote", description="Committee approval under distributive uncertainty")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", help="flat JSON object of parameters/options")
        sp.add_argument("--p0", type=float)
        sp.add_argument("--c", type=float)
        sp.add_argument("--r", type=float)
        sp.add_argument("--la", type=float, help="signal intensity for type a")
        sp.add_argument("--lb", type=float, help="signal intensity for type b")
        opts = COMMAND_OPTIONS[cmd]
        if "variant" in opts:
            sp.add_argument("--variant", choices=("discounted", "undiscounted"))
        if "alpha" in opts:
            sp.add_argument("--alpha", type=float)
        if "grid" in opts:
            sp.add_argument("--grid", type=int, help="number of grid points")
        if "out" in opts:
            sp.add_argument("--out")
        if "n" in opts:
            sp.add_argument("--n", type=int)
            sp.add_argument("--seed", type=int)
            sp.add_argument("--deadline", type=float)
            sp.add_argument("--workers", type=int)
            sp.add_argument("--backend", choices=("numba", "numpy"))
        if "process" in opts:
            sp.add_argument("--process", help="process JSON or path to a JSON file")
            sp.add_argument("--grid-size", dest="grid_size", type=int)
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as e:
        raise UsageError(f"config {path}: {e}") from None
    if not isinstance(raw, dict):
        raise UsageError(f"config {path}: expected a JSON object")
    # accept our own output documents as well as flat objects
    flat = {}
    for k, v in raw.items():
        if k in ("params", "options") and isinstance(v, dict):
            flat.update(v)
        elif k not in ("result", "command", "version"):
            flat[k] = v
    return {_ALIASES.get(k, k): v for k, v in flat.items()}


def parse_config(argv) -> RunConfig:
    ns = _build_parser().parse_args(argv)
    cfg = _load_config(ns.config) if ns.config else {}
    cmd = ns.command
    params = {}
    for k in PARAM_KEYS:
        v = getattr(ns, k)
        params[k] = v if v is not None else cfg.get(k)
    skip = {"sweep-cost": "c", "sweep-prior": "p0"}.get(cmd)
    if skip:
        params.pop(skip)
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise UsageError(f"{cmd}: missing parameter(s) {', '.join('--' + m for m in missing)}")
    options = {}
    for k in COMMAND_OPTIONS[cmd]:
        v = getattr(ns, k, None)
        options[k] = v if v is not None else cfg.get(k, DEFAULTS[k])
    if cmd == "welfare":
        a = options["alpha"]
        if a is None:
            raise UsageError("welfare: --alpha is required")
        if not 0.0 <= a <= 1.0:
            raise UsageError(f"welfare: alpha={a} outside [0, 1]")
    if "grid" in options and options["grid"] < 1:
        raise UsageError("--grid must be >= 1")
    if cmd == "simulate":
        if options["n"] < 1:
            raise UsageError("--n must be >= 1")
        if options["workers"] < 1:
            raise UsageError("--workers must be >= 1")
        if options["deadline"] is not None and not options["deadline"] >= 0:
            raise UsageError("--deadline must be >= 0")
    if cmd == "general" and options["grid_size"] < 64:
        raise UsageError("--grid-size must be >= 64")
    rc = RunConfig(cmd, params, options)
    # validate parameters up front so bad input is a usage error
    try:
        if skip == "c":
            rc.model_params(c=0.25)
        elif skip == "p0":
            rc.model_params(p0=min(0.999, max(0.5, params["c"] + 1e-3)))
        else:
            rc.model_params()
    except ModelError as e:
        raise UsageError(f"{cmd}: {e}") from None
    return rc


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _document(rc: RunConfig, result: dict) -> dict:
    return _clean({"command": rc.command, "version": __version__,
                   "params": rc.params, "options": rc.options, "result": result})


def _load_process(spec):
    if isinstance(spec, dict):
        return from_spec(spec)
    text = spec.strip()
    if not text.startswith("{"):
        with open(text) as fh:
            text = fh.read()
    try:
        return from_spec(json.loads(text))
    except (json.JSONDecodeError, ValueError) as e:
        if isinstance(e, ModelError):
            raise
        raise UsageError(f"--process: {e}") from None


def _run_sweep(rc: RunConfig, out):
    o = rc.options
    discounted = o["variant"] == "discounted"
    n = o["grid"]
    header = {"command": rc.command, **rc.params, **{k: o[k] for k in ("grid", "variant")}}
    if rc.command == "sweep-cost":
        base = rc.model_params(c=0.25)
        table = sweep_cost(base, default_cost_grid(n), discounted)
        ann = table.annotations
        header["argmin_c"] = f"{ann['argmin']:.12g}"
        header["plateau_edge"] = "none" if ann["plateau_edge"] is None else f"{ann['plateau_edge']:.12g}"
    else:
        c = rc.params["c"]
        grid = [c + (1.0 - c) * i / (n + 1) for i in range(1, n + 1)]
        base = rc.model_params(p0=grid[0])
        table = sweep_prior(base, grid, discounted)
        header["note"] = PRIOR_NOTE
        header["observed_direction"] = ";".join(
            f"{k}:{v}" for k, v in table.annotations["direction_above_p_star"].items())
    text = table.to_csv(header)
    if o["out"]:
        with open(o["out"], "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def dispatch(rc: RunConfig, out=None) -> int:
    out = out or sys.stdout
    cmd, o = rc.command, rc.options
    if cmd in ("sweep-cost", "sweep-prior"):
        _run_sweep(rc, out)
        return 0
    p = rc.model_params()
    if cmd == "equilibrium":
        result = solve_equilibrium(p).to_dict()
    elif cmd == "approve":
        result = approval_report(p, o["variant"] == "discounted").to_dict()
    elif cmd == "payoffs":
        a, b = ex_ante_payoffs(p, o["variant"] == "discounted")
        result = {"payoff_A": a, "payoff_B": b, "variant": o["variant"]}
    elif cmd == "welfare":
        result = optimal_rule(p, o["alpha"]).to_dict()
    elif cmd == "simulate":
        cfg = SimConfig(p, n=o["n"], seed=o["seed"], deadline=o["deadline"])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", InvalidRuleWarning)
            res = run_sim(cfg, o["workers"], o["backend"])
        result = res.to_dict()
        result["warnings"] = [str(w.message) for w in caught
                              if issubclass(w.category, InvalidRuleWarning)]
        if o["deadline"] is None:
            rep = compare_closed_form(cfg, o["workers"], o["backend"])
            result["closed_form"] = rep.expected
            result["z"] = rep.z
            result["passed"] = rep.passed
    elif cmd == "general":
        proc = _load_process(o["process"]) if o["process"] else exponential(p.lambda_a, p.lambda_b)
        mlr = check_mlr(proc)
        result = {"process": proc.spec, "horizon": proc.horizon,
                  "mlr": {"passed": mlr.passed, "interval": mlr.interval}}
        result.update(equilibrium_general(proc, p, o["grid_size"]).to_dict())
    else:  # pragma: no cover - argparse restricts commands
        raise UsageError(f"unknown command {cmd}")
    json.dump(_document(rc, result), out, indent=2)
    out.write("\n")
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        rc = parse_config(argv)
        return dispatch(rc)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 2
    except (ModelError, OutOfRange) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
