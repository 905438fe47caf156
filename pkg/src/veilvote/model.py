"""Model primitives, belief dynamics and the closed-form Markov equilibrium.

Two factions, A and B, must both vote for a project of unknown type
theta in {a, b}.  Type theta is revealed by a Poisson signal with intensity
lambda_theta; while no signal has arrived the common belief that theta = a
drifts down (lambda_a > lambda_b).  Faction A approves while the belief is
at least c; faction B picks the stopping belief that maximises its ex-ante
value subject to A still approving.

All payoffs are normalised to t = 0.  The discount factor e^{-rt} that
multiplies the myopic payoffs is a common positive factor which never
changes a vote, so myopic payoffs are stored undiscounted and discounting
enters only through ex-ante values.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import (
    ImmediateRegime,
    NegativeTime,
    NotApprovable,
    OutOfRange,
    RequiresLambdaOrder,
    StaticBelief,
    TargetAbovePrior,
)


def logit(p: float) -> float:
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    return math.log(p) - math.log1p(-p)


def expit(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


class Regime(str, enum.Enum):
    NEVER = "never"
    IMMEDIATE = "immediate"
    DELAYED = "delayed"


@dataclass(frozen=True)
class ModelParams:
    """Primitive tuple (p0, c, r, lambda_a, lambda_b).

    p0 is the prior that the project benefits A, c the cost to each faction
    (benefit normalised to 1), r the discount rate and lambda_* the signal
    intensities.  Factions are never relabelled: lambda_a < lambda_b is an
    error because faction identity matters for welfare weights.
    """

    p0: float
    c: float
    r: float
    lambda_a: float
    lambda_b: float

    def __post_init__(self):
        for name in ("p0", "c", "r", "lambda_a", "lambda_b"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise OutOfRange(name, v, "finite reals")
            object.__setattr__(self, name, float(v))
        if not 0.0 < self.p0 < 1.0:
            raise OutOfRange("p0", self.p0, "(0, 1)")
        if not 0.0 < self.c < 1.0:
            raise OutOfRange("c", self.c, "(0, 1)")
        if self.r < 0.0:
            raise OutOfRange("r", self.r, "[0, inf)")
        if self.lambda_a < 0.0:
            raise OutOfRange("lambda_a", self.lambda_a, "[0, inf)")
        if self.lambda_b < 0.0:
            raise OutOfRange("lambda_b", self.lambda_b, "[0, inf)")
        if self.lambda_a < self.lambda_b:
            raise RequiresLambdaOrder(
                f"lambda_a={self.lambda_a} < lambda_b={self.lambda_b}; "
                "factions are not relabelled"
            )

    @property
    def static(self) -> bool:
        """True when the belief never moves (equal intensities)."""
        return self.lambda_a == self.lambda_b

    @property
    def interesting_case(self) -> bool:
        return self.c <= min(self.p0, 0.5)

    @property
    def approvable(self) -> bool:
        return self.c <= 0.5 and self.p0 >= self.c

    def replace(self, **changes) -> "ModelParams":
        d = asdict(self)
        d.update(changes)
        return ModelParams(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def validate_params(p0, c, r, lambda_a, lambda_b) -> ModelParams:
    return ModelParams(p0, c, r, lambda_a, lambda_b)


def _check_time(t: float) -> None:
    if t < 0.0 or math.isnan(t):
        raise NegativeTime(f"t={t} must be >= 0")


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(name, p, "[0, 1]")


def belief_at(params: ModelParams, t: float) -> float:
    """Posterior that theta = a given no signal by time t."""
    _check_time(t)
    if params.static or t == 0.0:
        return params.p0
    z = logit(params.p0) - (params.lambda_a - params.lambda_b) * t
    return expit(z)


def time_to_reach(params: ModelParams, p_target: float) -> float:
    """Time at which the no-signal belief falls to ``p_target``."""
    if params.static:
        raise StaticBelief("belief is constant when lambda_a == lambda_b")
    if not 0.0 < p_target <= 1.0:
        raise OutOfRange("p_target", p_target, "(0, 1]")
    if p_target > params.p0:
        raise TargetAbovePrior(f"p_target={p_target} > p0={params.p0}")
    if p_target == params.p0:
        return 0.0
    return (logit(params.p0) - logit(p_target)) / (params.lambda_a - params.lambda_b)


def myopic_payoffs(params: ModelParams, p: float) -> tuple[float, float]:
    """(u_A, u_B) from approving at belief p, undiscounted."""
    _check_prob("p", p)
    return p - params.c, 1.0 - params.c - p


def deviation_value_A(params: ModelParams, p: float, tau: float) -> float:
    """A's value at belief p from blocking for tau and then approving."""
    _check_prob("p", p)
    _check_time(tau)
    if math.isinf(tau):
        return 0.0
    c, r = params.c, params.r
    return (p * (1.0 - c) * math.exp(-(params.lambda_a + r) * tau)
            - (1.0 - p) * c * math.exp(-(params.lambda_b + r) * tau))


def c_bar(params: ModelParams) -> float:
    """Cost threshold separating interior from corner stopping for B.

    Equals 1/2 when lambda_a == lambda_b (including the 0/0 limit r = 0,
    lambda = 0) and 0 when lambda_b + r == 0.
    """
    sa = math.sqrt(params.lambda_a + params.r)
    sb = math.sqrt(params.lambda_b + params.r)
    if sa + sb == 0.0:
        return 0.5
    return sb / (sa + sb)


def log_intensity_ratio(params: ModelParams) -> float:
    """ln((lambda_a + r) / (lambda_b + r)); +inf if lambda_b + r == 0."""
    num = params.lambda_a + params.r
    den = params.lambda_b + params.r
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return math.log(num) - math.log(den)


def _interior_p_star(params: ModelParams) -> float:
    return expit(-(log_intensity_ratio(params) + logit(params.c)))


def p_star(params: ModelParams) -> float:
    """Belief at which B switches to approval."""
    if not params.approvable:
        raise NotApprovable(f"c={params.c}, p0={params.p0}: project is never approved")
    if params.c <= c_bar(params):
        return _interior_p_star(params)
    return params.c


def switch_value_B(params: ModelParams, t: float) -> float:
    """B's ex-ante value of switching to approval at time t."""
    _check_time(t)
    if math.isinf(t):
        return 0.0
    p0, c, r = params.p0, params.c, params.r
    return (-p0 * c * math.exp(-(params.lambda_a + r) * t)
            + (1.0 - p0) * (1.0 - c) * math.exp(-(params.lambda_b + r) * t))


def unrestricted_switch_time(params: ModelParams) -> float:
    """Maximiser of switch_value_B ignoring A's participation constraint."""
    if params.static:
        raise StaticBelief("belief is constant when lambda_a == lambda_b")
    if params.p0 <= p_star(params):
        raise ImmediateRegime(f"p0={params.p0} <= p*: switch value decreasing from t=0")
    lk = log_intensity_ratio(params)
    if math.isinf(lk):
        return math.inf
    return (lk + logit(params.p0) + logit(params.c)) / (params.lambda_a - params.lambda_b)


@dataclass(frozen=True)
class EquilibriumOutcome:
    """Regime plus (c_bar, p_star, t_star).

    ``p_star`` is the switching belief of B (the stopping threshold); in the
    immediate regime the project is approved at p0 <= p_star.  With equal
    intensities there is no threshold and ``p_star`` is p0.
    """

    regime: Regime
    c_bar: float
    p_star: Optional[float] = None
    t_star: Optional[float] = None

    @property
    def approved_ever(self) -> bool:
        return self.regime is not Regime.NEVER

    def approval_belief(self, p0: float) -> Optional[float]:
        if self.regime is Regime.NEVER:
            return None
        if self.regime is Regime.IMMEDIATE:
            return p0
        return self.p_star

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "c_bar": self.c_bar,
            "p_star": self.p_star,
            "t_star": self.t_star,
        }


def solve_equilibrium(params: ModelParams) -> EquilibriumOutcome:
    cb = c_bar(params)
    if not params.approvable:
        return EquilibriumOutcome(Regime.NEVER, cb)
    if params.static:
        if params.c <= params.p0 <= 1.0 - params.c:
            return EquilibriumOutcome(Regime.IMMEDIATE, cb, params.p0, 0.0)
        return EquilibriumOutcome(Regime.NEVER, cb)
    ps = p_star(params)
    if params.p0 <= ps:
        return EquilibriumOutcome(Regime.IMMEDIATE, cb, ps, 0.0)
    return EquilibriumOutcome(Regime.DELAYED, cb, ps, time_to_reach(params, ps))
