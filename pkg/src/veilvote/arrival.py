"""Equilibrium under general signal-time distributions.

The type-theta signal arrives at a random time with survival S_theta.  As
long as S_a/S_b is strictly decreasing (monotone likelihood ratio) the
belief drifts down, A approves while the belief is at least c, and B solves
a stopping problem on [0, t_A] with no closed form; it is solved here by a
grid scan plus golden-section refinement, finished by bisecting the sign of
the exact derivative built from the densities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import HorizonExceeded, HorizonTooShort, MLRViolated, NotApprovable, OutOfRange
from .model import ModelParams, Regime, expit, logit
from .numerics import bisect, maximize_on_interval

NEGLIGIBLE = 1e-9
DEFAULT_HORIZON_CAP = 1e3


@dataclass(frozen=True)
class ArrivalProcess:
    """Pair of log-survival functions on [0, horizon].

    ``natural_horizon`` is True when both survivals are below 1e-9 at the
    horizon, i.e. a signal has almost surely arrived by then.  The densities
    -S' are optional; without them B's problem is polished by finite
    differences.
    """

    log_survival_a: Callable
    log_survival_b: Callable
    horizon: float
    natural_horizon: bool
    kind: str
    spec: dict = field(default_factory=dict)
    density_a: Optional[Callable] = None
    density_b: Optional[Callable] = None

    def survival_a(self, t):
        return np.exp(self.log_survival_a(t))

    def survival_b(self, t):
        return np.exp(self.log_survival_b(t))

    def log_ratio(self, t):
        return self.log_survival_a(t) - self.log_survival_b(t)


def _find_horizon(log_sa, log_sb, cap: float) -> tuple[float, bool]:
    """Smallest t with max(S_a, S_b) < 1e-9, capped at ``cap``."""
    thr = math.log(NEGLIGIBLE)
    top = lambda t: max(float(log_sa(t)), float(log_sb(t)))
    hi = min(1.0, cap)
    while top(hi) >= thr:
        if hi >= cap:
            return cap, False
        hi = min(2.0 * hi, cap)
    if top(0.0) < thr:
        return 0.0, True
    t = bisect(lambda x: top(x) - thr, 0.0, hi, xtol=1e-12 * max(1.0, hi))
    # bisect may stop just short of the crossing
    while top(t) >= thr:
        t = np.nextafter(t, math.inf)
    return float(t), True


def _build(kind, spec, log_sa, log_sb, horizon_cap, dens_a=None, dens_b=None):
    cap = DEFAULT_HORIZON_CAP if horizon_cap is None else float(horizon_cap)
    if not cap > 0.0:
        raise OutOfRange("horizon", cap, "(0, inf)")
    h, natural = _find_horizon(log_sa, log_sb, cap)
    return ArrivalProcess(log_sa, log_sb, h, natural, kind, spec, dens_a, dens_b)


def _linear(rate: float):
    def log_s(t):
        return -rate * (np.asarray(t, dtype=float) if np.ndim(t) else float(t))
    return log_s


def exponential(lambda_a: float, lambda_b: float, horizon: float | None = None) -> ArrivalProcess:
    if lambda_a < 0 or lambda_b < 0:
        raise OutOfRange("lambda", (lambda_a, lambda_b), "[0, inf)")
    la, lb = float(lambda_a), float(lambda_b)
    spec = {"kind": "exponential", "lambda_a": la, "lambda_b": lb}
    return _build("exponential", spec, _linear(la), _linear(lb), horizon,
                  lambda t: la * math.exp(-la * t), lambda t: lb * math.exp(-lb * t))


def weibull(rate_a: float, shape_a: float, rate_b: float, shape_b: float,
            horizon: float | None = None) -> ArrivalProcess:
    """S_theta(t) = exp(-rate_theta * t**shape_theta)."""
    for name, v in (("rate_a", rate_a), ("rate_b", rate_b)):
        if v < 0:
            raise OutOfRange(name, v, "[0, inf)")
    for name, v in (("shape_a", shape_a), ("shape_b", shape_b)):
        if v <= 0:
            raise OutOfRange(name, v, "(0, inf)")
    ra, ka, rb, kb = map(float, (rate_a, shape_a, rate_b, shape_b))
    spec = {"kind": "weibull", "rate_a": ra, "shape_a": ka, "rate_b": rb, "shape_b": kb}
    return _build("weibull", spec,
                  lambda t: -ra * np.power(t, ka), lambda t: -rb * np.power(t, kb), horizon,
                  _weibull_density(ra, ka), _weibull_density(rb, kb))


def _weibull_density(rate, shape):
    def f(t):
        if t == 0.0:
            return rate if shape == 1.0 else (0.0 if shape > 1.0 or rate == 0.0 else math.inf)
        return rate * shape * t ** (shape - 1.0) * math.exp(-rate * t ** shape)
    return f


def table(t: Sequence[float], S_a: Sequence[float], S_b: Sequence[float],
          horizon: float | None = None) -> ArrivalProcess:
    """Tabulated survivals with monotone (PCHIP) interpolation."""
    t = np.asarray(t, dtype=float)
    sa = np.asarray(S_a, dtype=float)
    sb = np.asarray(S_b, dtype=float)
    if t.ndim != 1 or t.shape != sa.shape or t.shape != sb.shape or t.size < 2:
        raise ValueError("t, S_a, S_b must be 1-d arrays of equal length >= 2")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t must start at 0 and be strictly increasing")
    for name, s in (("S_a", sa), ("S_b", sb)):
        if s[0] != 1.0:
            raise ValueError(f"{name}(0) must equal 1")
        if np.any(np.diff(s) > 0) or np.any(s < 0):
            raise ValueError(f"{name} must be non-negative and non-increasing")
    ia, ib = PchipInterpolator(t, sa), PchipInterpolator(t, sb)
    end = float(t[-1])

    def _log(interp):
        def f(x):
            if np.any(np.asarray(x) > end * (1 + 1e-12)) or np.any(np.asarray(x) < 0):
                raise HorizonExceeded(f"t outside tabulated range [0, {end}]")
            v = np.log(np.clip(interp(x), 1e-300, 1.0))
            return v if np.ndim(x) else float(v)
        return f

    def _density(interp):
        d = interp.derivative()
        return lambda x: max(0.0, -float(d(x)))

    spec = {"kind": "table", "t": t.tolist(), "S_a": sa.tolist(), "S_b": sb.tolist()}
    cap = end if horizon is None else min(float(horizon), end)
    return _build("table", spec, _log(ia), _log(ib), cap, _density(ia), _density(ib))


def from_spec(spec: dict) -> ArrivalProcess:
    """Build a process from its JSON form.

    {"kind": "exponential", "lambda_a", "lambda_b"} |
    {"kind": "weibull", "rate_a", "shape_a", "rate_b", "shape_b"} |
    {"kind": "table", "t", "S_a", "S_b"}; optional "horizon" cap.
    """
    kind = spec.get("kind")
    h = spec.get("horizon")
    try:
        if kind == "exponential":
            return exponential(spec["lambda_a"], spec["lambda_b"], h)
        if kind == "weibull":
            return weibull(spec["rate_a"], spec["shape_a"], spec["rate_b"], spec["shape_b"], h)
        if kind == "table":
            return table(spec["t"], spec["S_a"], spec["S_b"], h)
    except KeyError as e:
        raise ValueError(f"process spec of kind {kind!r} is missing {e}") from None
    raise ValueError(f"unknown process kind {kind!r}")


@dataclass(frozen=True)
class MLRCheck:
    passed: bool
    interval: Optional[tuple[float, float]] = None


def check_mlr(process: ArrivalProcess, grid_size: int = 1024) -> MLRCheck:
    """Strict decrease of S_a/S_b on a uniform grid over [0, horizon]."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    grid = np.linspace(0.0, process.horizon, grid_size)
    ratio = np.asarray(process.log_ratio(grid), dtype=float)
    bad = np.flatnonzero(~(np.diff(ratio) < 0.0))
    if bad.size:
        k = int(bad[0])
        return MLRCheck(False, (float(grid[k]), float(grid[k + 1])))
    return MLRCheck(True)


def belief_general(process: ArrivalProcess, p0: float, t):
    """p0 S_a / (p0 S_a + (1 - p0) S_b), computed through log-odds."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0) or np.any(tt > process.horizon):
        raise HorizonExceeded(f"t outside [0, {process.horizon}]")
    z = logit(p0) + process.log_ratio(t)
    if np.ndim(z):
        return 1.0 / (1.0 + np.exp(-z))
    return expit(float(z))


def cutoff_time_A(process: ArrivalProcess, params: ModelParams) -> Optional[float]:
    """Time at which the belief reaches c, after which A blocks.

    Returns None (never binds) when the belief stays above c through a
    horizon at which the signal has almost surely arrived; raises
    HorizonTooShort when the horizon was cut before that.
    """
    p0, c = params.p0, params.c
    if c > p0:
        raise NotApprovable(f"c={c} > p0={p0}: A never approves")
    if c == p0:
        return 0.0
    f = lambda t: belief_general(process, p0, t) - c
    if f(process.horizon) > 0.0:
        if process.natural_horizon:
            return None
        raise HorizonTooShort(
            f"belief still above c at horizon {process.horizon}; raise the horizon cap")
    return bisect(f, 0.0, process.horizon, xtol=0.0)  # to float resolution; t_A is a corner optimum


def switch_value_general(process: ArrivalProcess, params: ModelParams, t):
    p0, c = params.p0, params.c
    return np.exp(-params.r * np.asarray(t, dtype=float)) * (
        -p0 * c * process.survival_a(t) + (1.0 - p0) * (1.0 - c) * process.survival_b(t))


def best_switch_time(process: ArrivalProcess, params: ModelParams,
                     grid_size: int = 512) -> tuple[float, float]:
    """B's optimal switching time on [0, t_A] and its value."""
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    t_a = cutoff_time_A(process, params)
    if t_a is None:
        t_a = process.horizon
    f = lambda t: switch_value_general(process, params, t)
    if t_a == 0.0:
        return 0.0, float(f(0.0))
    res = maximize_on_interval(f, 0.0, t_a, grid_size=grid_size, slope=_switch_slope(process, params))
    return res.x, res.value


def _switch_slope(process: ArrivalProcess, params: ModelParams):
    """Sign-exact derivative of B's switch value, up to the factor e^{-rt}."""
    if process.density_a is None or process.density_b is None:
        return None
    p0, c, r = params.p0, params.c, params.r
    wa, wb = p0 * c, (1.0 - p0) * (1.0 - c)

    def slope(t):
        gain = wa * (process.density_a(t) + r * float(process.survival_a(t)))
        loss = wb * (process.density_b(t) + r * float(process.survival_b(t)))
        return gain - loss
    return slope


@dataclass(frozen=True)
class GeneralOutcome:
    regime: Regime
    p_star: Optional[float] = None
    t_star: Optional[float] = None
    t_A: Optional[float] = None
    value_B: Optional[float] = None

    def to_dict(self) -> dict:
        return {"regime": self.regime.value, "p_star": self.p_star, "t_star": self.t_star,
                "t_A": self.t_A, "value_B": self.value_B}


def equilibrium_general(process: ArrivalProcess, params: ModelParams,
                        grid_size: int = 512) -> GeneralOutcome:
    mlr = check_mlr(process)
    if not mlr.passed:
        raise MLRViolated(mlr.interval)
    if not params.approvable:
        return GeneralOutcome(Regime.NEVER)
    t_a = cutoff_time_A(process, params)
    t_b, value = best_switch_time(process, params, grid_size)
    if t_b == 0.0:
        return GeneralOutcome(Regime.IMMEDIATE, params.p0, 0.0, t_a, value)
    return GeneralOutcome(Regime.DELAYED, belief_general(process, params.p0, t_b), t_b, t_a, value)


def approval_probability_general(process: ArrivalProcess, params: ModelParams,
                                 grid_size: int = 512) -> float:
    out = equilibrium_general(process, params, grid_size)
    if out.regime is Regime.NEVER:
        return 0.0
    t = out.t_star
    return float(params.p0 * process.survival_a(t) + (1.0 - params.p0) * process.survival_b(t))
