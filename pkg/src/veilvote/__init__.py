"""Two-faction committee approval of a project with unknown winners.

Closed-form Markov equilibrium under Poisson learning, ex-ante approval
statistics, welfare-optimal deadlines, a Monte Carlo oracle and a numerical
solver for general signal-time distributions.
"""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    ApprovalReport,
    SweepTable,
    approval_probability,
    approval_report,
    ex_ante_payoffs,
    sweep_cost,
    sweep_prior,
)
from .model import (  # noqa: E402
    EquilibriumOutcome,
    ModelParams,
    Regime,
    belief_at,
    c_bar,
    p_star,
    solve_equilibrium,
    time_to_reach,
    validate_params,
)
from .simulate import SimConfig, SimResult, compare_closed_form, run_sim  # noqa: E402
from .welfare import Classification, WelfarePolicy, alpha_bar, optimal_rule, welfare_at  # noqa: E402

__all__ = [
    "ApprovalReport", "Classification", "EquilibriumOutcome", "ModelParams", "Regime",
    "SimConfig", "SimResult", "SweepTable", "WelfarePolicy", "alpha_bar",
    "approval_probability", "approval_report", "belief_at", "c_bar", "compare_closed_form",
    "ex_ante_payoffs", "optimal_rule", "p_star", "run_sim", "solve_equilibrium",
    "sweep_cost", "sweep_prior", "time_to_reach", "validate_params", "welfare_at",
]
