"""Ex-ante approval probability, faction payoffs and one-axis sweeps."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import EquilibriumOutcome, ModelParams, Regime, logit, solve_equilibrium

CSV_COLUMNS = ("axis_value", "prob_approval", "payoff_A", "payoff_B", "regime", "p_star", "t_star")
MONO_TOL = 1e-10


@dataclass(frozen=True)
class ApprovalReport:
    prob_approval: float
    payoff_A: float
    payoff_B: float
    discounted: bool
    regime: Regime
    p_star: Optional[float] = None
    t_star: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "prob_approval": self.prob_approval,
            "payoff_A": self.payoff_A,
            "payoff_B": self.payoff_B,
            "discounted": self.discounted,
            "regime": self.regime.value,
            "p_star": self.p_star,
            "t_star": self.t_star,
        }


def _survivals(params: ModelParams, t: float, discount: bool) -> tuple[float, float]:
    """P(no signal by t | a), P(no signal by t | b), optionally times e^{-rt}."""
    r = params.r if discount else 0.0
    return math.exp(-(params.lambda_a + r) * t), math.exp(-(params.lambda_b + r) * t)


def approval_probability(params: ModelParams, eq: EquilibriumOutcome | None = None) -> float:
    eq = eq or solve_equilibrium(params)
    if eq.regime is Regime.NEVER:
        return 0.0
    if eq.regime is Regime.IMMEDIATE:
        return 1.0
    sa, sb = _survivals(params, eq.t_star, discount=False)
    return params.p0 * sa + (1.0 - params.p0) * sb


def approval_probability_factored(params: ModelParams, eq: EquilibriumOutcome | None = None) -> float:
    """Same quantity written through the odds of p_star.

    p0^{-lb/d} (1-p0)^{la/d} [x^{-la/d} + x^{-lb/d}] with x = (1-p*)/p*
    and d = la - lb; evaluated in log space.
    """
    eq = eq or solve_equilibrium(params)
    if eq.regime is not Regime.DELAYED:
        return approval_probability(params, eq)
    la, lb, p0 = params.lambda_a, params.lambda_b, params.p0
    d = la - lb
    log_x = -logit(eq.p_star)
    front = -lb / d * math.log(p0) + la / d * math.log1p(-p0)
    return math.exp(front - la / d * log_x) + math.exp(front - lb / d * log_x)


def discounted_approval_mass(params: ModelParams, eq: EquilibriumOutcome | None = None) -> float:
    """E[e^{-r tau} 1{approved}]."""
    eq = eq or solve_equilibrium(params)
    if eq.regime is Regime.NEVER:
        return 0.0
    if eq.regime is Regime.IMMEDIATE:
        return 1.0
    sa, sb = _survivals(params, eq.t_star, discount=True)
    return params.p0 * sa + (1.0 - params.p0) * sb


def ex_ante_payoffs(params: ModelParams, discounted: bool = True,
                    eq: EquilibriumOutcome | None = None) -> tuple[float, float]:
    """Expected payoffs of (A, B) at t = 0 under equilibrium play.

    ``discounted=False`` drops e^{-r t*}, leaving the plain
    survival-weighted expression.
    """
    eq = eq or solve_equilibrium(params)
    c, p0 = params.c, params.p0
    if eq.regime is Regime.NEVER:
        return 0.0, 0.0
    if eq.regime is Regime.IMMEDIATE:
        return p0 - c, 1.0 - c - p0
    # (approval mass) x (myopic payoff at p*): the belief at t* is p* by
    # construction, so this equals the survival-weighted sum and is exactly
    # zero for A on the corner branch p* = c
    sa, sb = _survivals(params, eq.t_star, discount=discounted)
    mass = p0 * sa + (1.0 - p0) * sb
    ps = eq.p_star
    return mass * (ps - c), mass * (1.0 - c - ps)


def ex_ante_payoffs_direct(params: ModelParams, discounted: bool = True,
                           eq: EquilibriumOutcome | None = None) -> tuple[float, float]:
    """Survival-weighted form p0 S_a (1-c) - (1-p0) S_b c (and B's mirror)."""
    eq = eq or solve_equilibrium(params)
    if eq.regime is not Regime.DELAYED:
        return ex_ante_payoffs(params, discounted, eq)
    c, p0 = params.c, params.p0
    sa, sb = _survivals(params, eq.t_star, discount=discounted)
    ma, mb = p0 * sa, (1.0 - p0) * sb
    return ma * (1.0 - c) - mb * c, mb * (1.0 - c) - ma * c


def approval_report(params: ModelParams, discounted: bool = True) -> ApprovalReport:
    eq = solve_equilibrium(params)
    a, b = ex_ante_payoffs(params, discounted, eq)
    return ApprovalReport(approval_probability(params, eq), a, b, discounted,
                          eq.regime, eq.p_star, eq.t_star)


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    direction: str  # "increasing" | "decreasing" | "constant"


@dataclass
class SweepTable:
    axis: str
    grid: list[float]
    rows: list[ApprovalReport]
    base: ModelParams
    annotations: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def to_csv(self, header: dict | None = None) -> str:
        """CSV text; ``header`` items are written as leading '# k=v' lines."""
        buf = io.StringIO()
        for k, v in (header or {}).items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for x, row in zip(self.grid, self.rows):
            w.writerow([
                _fmt(x), _fmt(row.prob_approval), _fmt(row.payoff_A), _fmt(row.payoff_B),
                row.regime.value, _fmt(row.p_star), _fmt(row.t_star),
            ])
        return buf.getvalue()


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.12g}"


def read_sweep_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        out.append({k: (v if k == "regime" else (float(v) if v != "" else None))
                    for k, v in rec.items()})
    return out


def monotone_segments(xs: Sequence[float], ys: Sequence[float], tol: float = MONO_TOL) -> list[Segment]:
    """Maximal runs of adjacent differences sharing a direction."""
    segs: list[Segment] = []
    for i in range(len(xs) - 1):
        d = ys[i + 1] - ys[i]
        direction = "increasing" if d > tol else "decreasing" if d < -tol else "constant"
        if segs and segs[-1].direction == direction:
            segs[-1] = Segment(segs[-1].start, xs[i + 1], direction)
        else:
            segs.append(Segment(xs[i], xs[i + 1], direction))
    return segs


def _check_grid(grid: Sequence[float]) -> list[float]:
    grid = [float(x) for x in grid]
    if not grid:
        raise ValueError("empty grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    return grid


def sweep_cost(base: ModelParams, c_grid: Sequence[float], discounted: bool = True) -> SweepTable:
    """Approval statistics as the cost varies; ``base.c`` is ignored.

    Annotations: ``argmin`` (cost with the lowest approval probability),
    ``plateau_edge`` (last cost of the initial run with probability 1, or
    None) and ``segments`` (monotone runs of the probability).
    """
    grid = _check_grid(c_grid)
    if grid[0] <= 0.0 or grid[-1] > 0.5:
        raise ValueError("cost grid must lie in (0, 1/2]")
    rows = [approval_report(base.replace(c=c), discounted) for c in grid]
    probs = [r.prob_approval for r in rows]
    imin = min(range(len(probs)), key=lambda i: (probs[i], i))
    edge = None
    for x, pr in zip(grid, probs):
        if pr != 1.0:
            break
        edge = x
    table = SweepTable("c", grid, rows, base)
    table.annotations = {
        "argmin": grid[imin],
        "min_prob": probs[imin],
        "plateau_edge": edge,
        "segments": monotone_segments(grid, probs),
    }
    return table


def sweep_prior(base: ModelParams, p0_grid: Sequence[float], discounted: bool = True) -> SweepTable:
    """Approval statistics as the prior varies; ``base.p0`` is ignored.

    Above p_star the approval probability and both payoffs fall with p0;
    ``annotations['direction']`` records the observed direction on that part
    of the grid for each column.
    """
    grid = _check_grid(p0_grid)
    if grid[0] <= base.c or grid[-1] >= 1.0:
        raise ValueError("prior grid must lie in (c, 1)")
    rows = [approval_report(base.replace(p0=p), discounted) for p in grid]
    delayed = [i for i, r in enumerate(rows) if r.regime is Regime.DELAYED]
    direction = {}
    for col in ("prob_approval", "payoff_A", "payoff_B"):
        xs = [grid[i] for i in delayed]
        ys = [getattr(rows[i], col) for i in delayed]
        kinds = {s.direction for s in monotone_segments(xs, ys)}
        direction[col] = kinds.pop() if len(kinds) == 1 else ("mixed" if kinds else "n/a")
    table = SweepTable("p0", grid, rows, base)
    table.annotations = {"direction_above_p_star": direction,
                         "segments": monotone_segments(grid, [r.prob_approval for r in rows])}
    return table


def default_cost_grid(n: int = 400) -> list[float]:
    """n uniform points on (0, 1/2]."""
    if n < 1:
        raise ValueError("grid size must be >= 1")
    return [0.5 * i / n for i in range(1, n + 1)]
