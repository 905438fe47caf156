"""Continuous-time Monte Carlo of equilibrium play (or an imposed deadline).

Each replication draws the type (a with probability p0) and an exponential
signal time with rate lambda_theta; the project is approved at the rule's
time tau iff no signal arrived before.  Payoffs are e^{-r tau}(1 - c) to the
favoured faction and -c e^{-r tau} to the other; 0 if never approved.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from statistics import NormalDist
from typing import Optional

import numpy as np

from .analysis import approval_probability, ex_ante_payoffs
from .errors import InvalidRuleWarning, OutOfRange
from .kernels import approval_counts, replication_draws
from .model import ModelParams, Regime, belief_at, solve_equilibrium

Z_PASS = 4.0


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    n: int = 1_000_000
    seed: int = 0
    deadline: Optional[float] = None  # None: equilibrium play

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise OutOfRange("n", self.n, "integers >= 1")
        if self.deadline is not None and not self.deadline >= 0.0:
            raise OutOfRange("deadline", self.deadline, "[0, inf)")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise OutOfRange("seed", self.seed, "[0, 2^64)")

    @property
    def rule(self) -> str:
        return "equilibrium" if self.deadline is None else f"deadline({self.deadline})"


@dataclass(frozen=True)
class SimResult:
    est_prob: float
    est_payoff_A: float
    est_payoff_B: float
    se_prob: float
    se_payoff_A: float
    se_payoff_B: float
    n_effective: int
    approval_time: Optional[float]
    counts: tuple[int, int, int] = field(default=(0, 0, 0))

    def ci(self, name: str, level: float = 0.99) -> tuple[float, float]:
        z = NormalDist().inv_cdf(0.5 + level / 2.0)
        est = getattr(self, f"est_{name}")
        se = getattr(self, f"se_{name}")
        return est - z * se, est + z * se

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counts"] = list(self.counts)
        return d


def approval_time(params: ModelParams, deadline: Optional[float] = None) -> Optional[float]:
    """Time at which the committee approves absent a signal, None if never.

    A deadline T moves approval to min(t*, T).  If the belief at that time is
    above 1 - c, faction B blocks and the project is rejected forever; this is
    reported as an InvalidRuleWarning.
    """
    eq = solve_equilibrium(params)
    if eq.regime is Regime.NEVER:
        if deadline is not None:
            warnings.warn("project is never approvable; deadline has no effect", InvalidRuleWarning)
        return None
    tau = eq.t_star
    if deadline is not None and deadline < tau:
        tau = deadline
        p = belief_at(params, tau)
        if not params.c <= p <= 1.0 - params.c:
            warnings.warn(
                f"deadline {deadline} precedes the feasible window (belief {p:.6g} "
                f"outside [c, 1-c]); simulated as reject-forever", InvalidRuleWarning)
            return None
    return tau


def _mean_se(n: int, values_counts: list[tuple[float, int]]) -> tuple[float, float]:
    """Mean and sample sd / sqrt(n) of a variable taking few distinct values."""
    total = math.fsum(v * k for v, k in values_counts)
    mean = total / n
    if n < 2:
        return mean, math.nan
    ss = math.fsum(k * (v - mean) ** 2 for v, k in values_counts)
    return mean, math.sqrt(ss / (n - 1) / n)


def run_sim(config: SimConfig, workers: int = 1, backend: str | None = None) -> SimResult:
    p = config.params
    n = int(config.n)
    tau = approval_time(p, config.deadline)
    if tau is None:
        return SimResult(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, n, None, (0, 0, 0))
    surv_a = math.exp(-p.lambda_a * tau)
    surv_b = math.exp(-p.lambda_b * tau)
    n_a, app_a, app_b = approval_counts(config.seed, n, p.p0, surv_a, surv_b, workers, backend)
    not_app = n - app_a - app_b
    d = math.exp(-p.r * tau)
    win, lose = (1.0 - p.c) * d, -p.c * d
    prob, se_prob = _mean_se(n, [(1.0, app_a + app_b), (0.0, not_app)])
    pa, se_a = _mean_se(n, [(win, app_a), (lose, app_b), (0.0, not_app)])
    pb, se_b = _mean_se(n, [(lose, app_a), (win, app_b), (0.0, not_app)])
    return SimResult(prob, pa, pb, se_prob, se_a, se_b, n, tau, (n_a, app_a, app_b))


def replication_outcomes(config: SimConfig) -> dict[str, np.ndarray]:
    """Per-replication type, signal time, approval flag and realised payoffs."""
    p = config.params
    n = int(config.n)
    tau = approval_time(p, config.deadline)
    is_a, s, u = replication_draws(config.seed, n, p.p0, p.lambda_a, p.lambda_b)
    if tau is None:
        approved = np.zeros(n, dtype=bool)
        d = 0.0
    else:
        surv = np.where(is_a, math.exp(-p.lambda_a * tau), math.exp(-p.lambda_b * tau))
        approved = u < surv
        d = math.exp(-p.r * tau)
    win, lose = (1.0 - p.c) * d, -p.c * d
    pay_a = np.where(approved, np.where(is_a, win, lose), 0.0)
    pay_b = np.where(approved, np.where(is_a, lose, win), 0.0)
    disc_mass = np.where(approved, d, 0.0)
    return {"is_a": is_a, "signal_time": s, "approved": approved,
            "payoff_A": pay_a, "payoff_B": pay_b, "discounted_mass": disc_mass}


@dataclass(frozen=True)
class CompareReport:
    z: dict
    expected: dict
    estimate: dict
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _z(est: float, expected: float, se: float) -> float:
    if se > 0.0:
        return (est - expected) / se
    return 0.0 if abs(est - expected) <= 1e-12 else math.inf


def compare_closed_form(config: SimConfig, workers: int = 1, backend: str | None = None,
                        expected: dict | None = None) -> CompareReport:
    """z-scores of the simulated estimates against the closed forms.

    ``expected`` overrides the closed-form values (keys prob, payoff_A,
    payoff_B); used to check that the harness detects a wrong formula.
    """
    if config.deadline is not None:
        raise ValueError("closed-form comparison needs equilibrium play")
    p = config.params
    if expected is None:
        a, b = ex_ante_payoffs(p, discounted=True)
        expected = {"prob": approval_probability(p), "payoff_A": a, "payoff_B": b}
    res = run_sim(config, workers, backend)
    est = {"prob": res.est_prob, "payoff_A": res.est_payoff_A, "payoff_B": res.est_payoff_B}
    se = {"prob": res.se_prob, "payoff_A": res.se_payoff_A, "payoff_B": res.se_payoff_B}
    z = {k: _z(est[k], expected[k], se[k]) for k in est}
    return CompareReport(z, dict(expected), est, all(abs(v) <= Z_PASS for v in z.values()))
