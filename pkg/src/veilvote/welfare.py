"""Utilitarian welfare of approval-time rules and the optimal deadline.

A rule (deadline or minimum waiting time) amounts to an approval time T
used if no signal has arrived.  Faction A carries weight alpha.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import OutOfRange, StaticBelief
from .model import (
    ModelParams,
    Regime,
    c_bar,
    log_intensity_ratio,
    logit,
    solve_equilibrium,
)

T_TOL = 1e-10


class Classification(str, enum.Enum):
    NO_INTERVENTION = "NoInterventionOptimal"
    DEADLINE = "DeadlineOptimal"
    NO_EFFECT = "NoEffect"
    NEVER_APPROVABLE = "NeverApprovable"


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise OutOfRange("alpha", alpha, "[0, 1]")


def welfare_at(params: ModelParams, alpha: float, T: float) -> float:
    _check_alpha(alpha)
    if T < 0.0:
        raise OutOfRange("T", T, "[0, inf)")
    if math.isinf(T):
        return 0.0
    p0, c, r = params.p0, params.c, params.r
    return (p0 * (alpha - c) * math.exp(-(params.lambda_a + r) * T)
            + (1.0 - p0) * (1.0 - alpha - c) * math.exp(-(params.lambda_b + r) * T))


def feasible_window(params: ModelParams) -> Optional[tuple[float, float]]:
    """[T_lo, T_hi] of approval times at which both factions would consent.

    The belief at T must lie in [c, min(1 - c, p0)].  None when the project
    can never be approved.
    """
    if params.static:
        raise StaticBelief("approval time does not move the belief when lambda_a == lambda_b")
    if not params.approvable:
        return None
    d = params.lambda_a - params.lambda_b
    lp0, lc = logit(params.p0), logit(params.c)
    lo = max(lp0 + lc, 0.0) / d
    hi = (lp0 - lc) / d
    return lo, hi


def alpha_bar(params: ModelParams) -> Optional[float]:
    """Weight of A below which leaving the committee alone is optimal.

    Defined only for c_bar < c <= 1/2 (None otherwise).  Solves
    (1-c)/c = K (c - a) / (1 - c - a) with K = (lambda_a + r)/(lambda_b + r),
    which is linear in a.  At c = 1/2 the root is c itself.
    """
    c = params.c
    if params.static or not params.approvable or c <= c_bar(params):
        return None
    # divide through by K to avoid overflow; q = R/K < 1 since K > R^2 >= R
    q = math.exp(math.log((1.0 - c) / c) - log_intensity_ratio(params))
    return (c - q * (1.0 - c)) / (1.0 - q)


@dataclass(frozen=True)
class WelfarePolicy:
    alpha: float
    T_opt: Optional[float]
    classification: Classification
    W_opt: float
    alpha_bar: Optional[float]
    t_star: Optional[float]
    window: Optional[tuple[float, float]] = None

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "T_opt": self.T_opt,
            "classification": self.classification.value,
            "W_opt": self.W_opt,
            "alpha_bar": self.alpha_bar,
            "t_star": self.t_star,
        }


def optimal_rule(params: ModelParams, alpha: float) -> WelfarePolicy:
    """Welfare-maximising approval time and how it compares with equilibrium."""
    _check_alpha(alpha)
    eq = solve_equilibrium(params)
    ab = alpha_bar(params)
    if eq.regime is Regime.NEVER:
        return WelfarePolicy(alpha, None, Classification.NEVER_APPROVABLE, 0.0, ab, None)
    if params.static:
        return WelfarePolicy(alpha, 0.0, Classification.NO_EFFECT,
                             welfare_at(params, alpha, 0.0), ab, 0.0)
    window = feasible_window(params)
    t_lo, t_hi = window
    c = params.c
    if alpha < c and eq.regime is Regime.DELAYED:
        # welfare rises until the stationary point, falls after
        lk = log_intensity_ratio(params)
        x = lk + logit(params.p0) + math.log(c - alpha) - math.log(1.0 - c - alpha)
        t_s = x / (params.lambda_a - params.lambda_b)
        t_opt = min(max(t_s, t_lo), t_hi)
    else:
        # welfare falls over the whole window
        t_opt = t_lo
    t_star = eq.t_star
    if eq.regime is Regime.IMMEDIATE:
        cls = Classification.NO_EFFECT
    elif t_opt < t_star - T_TOL:
        cls = Classification.DEADLINE
    elif t_opt <= t_star + T_TOL:
        cls = Classification.NO_INTERVENTION
    else:
        raise RuntimeError(f"optimal approval time {t_opt} exceeds equilibrium time {t_star}")
    return WelfarePolicy(alpha, t_opt, cls, welfare_at(params, alpha, t_opt), ab, t_star, window)
