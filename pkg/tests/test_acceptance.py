"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary under "acceptance criteria".
"""
import contextlib
import io
import time

import numpy as np
from scipy.optimize import bisect as scipy_bisect

from veilvote.analysis import (
    approval_probability,
    default_cost_grid,
    discounted_approval_mass,
    ex_ante_payoffs,
    sweep_cost,
    sweep_prior,
)
from veilvote.arrival import equilibrium_general, exponential, weibull
from veilvote.cli import PRIOR_NOTE, dispatch, parse_config
from veilvote.errors import MLRViolated
from veilvote.model import ModelParams, Regime, c_bar, solve_equilibrium, switch_value_B, time_to_reach
from veilvote.numerics import maximize_on_interval
from veilvote.simulate import SimConfig, replication_outcomes, run_sim
from veilvote.welfare import Classification, alpha_bar, feasible_window, optimal_rule

from .conftest import param_sets

REF = ModelParams(0.6, 0.25, 1.0, 35.0, 3.0)
MONO_TOL = 1e-10


@contextlib.contextmanager
def criterion(log, label):
    """Record PASS/FAIL for the enclosed checks; detail goes in ``note``."""
    note = {}
    try:
        yield note
    except BaseException as e:
        line = f"FAIL  {label}: {note.get('detail', '')} [{type(e).__name__}: {e}]".rstrip()
        log.append(line)
        print(line)
        raise
    line = f"PASS  {label}: {note.get('detail', '')}".rstrip()
    log.append(line)
    print(line)


def test_c1_cost_sweep_reference(acceptance_log):
    with criterion(acceptance_log, "1 cost sweep reference curve") as note:
        start = time.perf_counter()
        grid = default_cost_grid(400)
        probs = sweep_cost(REF, grid).column("prob_approval")
        elapsed = time.perf_counter() - start
        edge = 2 / 29
        plateau = [p for c, p in zip(grid, probs) if c <= edge]
        assert plateau and all(p == 1.0 for p in plateau)
        assert approval_probability(REF.replace(c=edge)) == 1.0
        at = dict(zip(grid, probs))
        assert abs(at[0.25] - 0.46319) <= 1e-3
        assert abs(at[0.5] - 0.77016) <= 1e-3
        left = [p for c, p in zip(grid, probs) if edge < c <= 0.25]
        right = [p for c, p in zip(grid, probs) if 0.25 <= c <= 0.5]
        assert all(b <= a + MONO_TOL for a, b in zip(left, left[1:]))
        assert all(b >= a - MONO_TOL for a, b in zip(right, right[1:]))
        assert elapsed < 1.0
        note["detail"] = (f"P(0.25)={at[0.25]:.6f} P(0.5)={at[0.5]:.6f} "
                          f"plateau={len(plateau)} pts, sweep {elapsed * 1e3:.1f} ms")


def test_c2_switch_time_oracle(acceptance_log):
    with criterion(acceptance_log, "2 closed form vs numerical maximisation of W_B") as note:
        sets = param_sets(1000, seed=2)
        start = time.perf_counter()
        worst_t = worst_v = worst_p = 0.0
        for p in sets:
            eq = solve_equilibrium(p)
            hi = time_to_reach(p, p.c)

            def w(t, p=p):
                t = np.asarray(t, dtype=float)
                return (-p.p0 * p.c * np.exp(-(p.lambda_a + p.r) * t)
                        + (1 - p.p0) * (1 - p.c) * np.exp(-(p.lambda_b + p.r) * t))

            res = maximize_on_interval(w, 0.0, hi)
            worst_t = max(worst_t, abs(res.x - eq.t_star))
            worst_v = max(worst_v, abs(res.value - switch_value_B(p, eq.t_star)))
            if eq.regime is Regime.DELAYED:
                worst_p = max(worst_p, abs(res.x - time_to_reach(p, eq.p_star)))
        elapsed = time.perf_counter() - start
        note["detail"] = (f"max |dt|={worst_t:.2e} max |dW|={worst_v:.2e} "
                          f"max |dt(p*)|={worst_p:.2e} in {elapsed:.2f} s")
        assert worst_t <= 1e-6 and worst_p <= 1e-6
        assert worst_v <= 1e-9
        assert elapsed < 10.0


def test_c3_monte_carlo(acceptance_log):
    with criterion(acceptance_log, "3 Monte Carlo coverage and reproducibility") as note:
        sets = param_sets(50, seed=3)
        start = time.perf_counter()
        covered = {"prob": 0, "payoff_A": 0, "payoff_B": 0}
        identical = True
        for i, p in enumerate(sets):
            cfg = SimConfig(p, n=10**6, seed=1000 + i)
            res = run_sim(cfg, workers=1)
            a, b = ex_ante_payoffs(p, discounted=True)
            expected = {"prob": approval_probability(p), "payoff_A": a, "payoff_B": b}
            for k, v in expected.items():
                lo, hi = res.ci(k, 0.99)
                covered[k] += lo <= v <= hi
            identical &= run_sim(cfg, workers=4) == res
            if i < 5:
                identical &= run_sim(cfg, workers=3, backend="numpy") == res
        elapsed = time.perf_counter() - start
        note["detail"] = (f"covered prob {covered['prob']}/50, A {covered['payoff_A']}/50, "
                          f"B {covered['payoff_B']}/50; bit-identical across workers={identical}; "
                          f"{elapsed:.1f} s")
        assert all(v >= 47 for v in covered.values())
        assert identical
        assert elapsed < 120.0


def _alpha_bar_oracle(p):
    k = (p.lambda_a + p.r) / (p.lambda_b + p.r)
    g = lambda a: k * (p.c - a) / (1 - p.c - a) - (1 - p.c) / p.c
    return scipy_bisect(g, 0.0, p.c, xtol=1e-15)


def test_c4_welfare_properties(acceptance_log):
    with criterion(acceptance_log, "4 no minimum waiting time and alpha_bar flip") as note:
        sets = param_sets(1000, seed=4)
        alphas = [i / 20 for i in range(21)]
        checked = flips = 0
        for p in sets:
            for alpha in alphas:
                pol = optimal_rule(p, alpha)
                if pol.classification is Classification.NO_EFFECT:
                    continue
                assert pol.T_opt <= pol.t_star + 1e-10, (p, alpha)
                checked += 1
            eq = solve_equilibrium(p)
            ab = alpha_bar(p)
            if eq.regime is not Regime.DELAYED or p.c <= c_bar(p) or ab is None or ab <= 1e-6:
                continue
            if eq.t_star - feasible_window(p)[0] <= 1e-8:
                continue  # deadline indistinguishable from t* at the 1e-10 tolerance
            below = optimal_rule(p, ab - 1e-6).classification
            above = optimal_rule(p, ab + 1e-6).classification
            assert below is Classification.NO_INTERVENTION, p
            assert above is Classification.DEADLINE, p
            flips += 1
        ref = ModelParams(0.6, 0.3, 1.0, 35.0, 3.0)
        err = abs(alpha_bar(ref) - _alpha_bar_oracle(ref))
        assert err <= 1e-9 and abs(alpha_bar(ref) - 0.16) <= 1e-9
        note["detail"] = (f"{checked} (set, alpha) pairs with T_opt <= t*; {flips} flips at "
                          f"alpha_bar +- 1e-6; alpha_bar(c=0.3)={alpha_bar(ref):.12f} (oracle diff {err:.1e})")


def _strictly_decreasing(ys):
    """Steps below the previous value by more than MONO_TOL while values are
    resolvable (> 1e-6); in the far tail, where the whole column is smaller
    than the tolerance, any strict decrease of positive values."""
    for a, b in zip(ys, ys[1:]):
        if a > 1e-6:
            if not b < a - MONO_TOL:
                return False
        elif a > 0.0 and not b < a:
            return False
    return True


def test_c5_prior_direction(acceptance_log):
    with criterion(acceptance_log, "5 approval and payoffs decrease in p0 above p*") as note:
        bases = [REF.replace(c=c) for c in (0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5)]
        bases += [p for p in param_sets(30, seed=5)]
        grids = strict = zeros = 0
        for base in bases:
            ps = solve_equilibrium(base.replace(p0=0.999)).p_star
            lo = max(ps, base.c)
            grid = lo + (0.99 - lo) * np.linspace(0.02, 1.0, 40)
            if grid[0] >= 0.99:
                continue
            cb = c_bar(base)
            for discounted in (True, False):
                t = sweep_prior(base, grid, discounted)
                assert all(r.regime is Regime.DELAYED for r in t.rows)
                grids += 1
                for col, active in (("prob_approval", True), ("payoff_A", base.c < cb),
                                    ("payoff_B", base.c < 0.5)):
                    ys = t.column(col)
                    if active:
                        assert _strictly_decreasing(ys), (base, col)
                        strict += 1
                    elif col == "payoff_A":
                        assert all(y == 0.0 for y in ys), base
                        zeros += 1
        out = io.StringIO()
        dispatch(parse_config(["sweep-prior", "--c", "0.1", "--r", "1", "--la", "35", "--lb", "3",
                               "--grid", "40"]), out)
        assert f"# note={PRIOR_NOTE}" in out.getvalue()
        note["detail"] = (f"{grids} grids, {strict} strictly decreasing columns, "
                          f"{zeros} payoff_A columns identically 0; note present in sweep-prior output")


def test_c6_general_reduction(acceptance_log):
    with criterion(acceptance_log, "6 general arrival reduces to closed form; non-MLR rejected") as note:
        sets = [REF.replace(c=c) for c in (0.05, 0.1, 0.25, 0.3, 0.5)] + param_sets(300, seed=6)
        worst = worst_v = 0.0
        beyond = 0
        for p in sets:
            proc = exponential(p.lambda_a, p.lambda_b)
            eq = solve_equilibrium(p)
            gen = equilibrium_general(proc, p)
            assert gen.regime is eq.regime, p
            if eq.regime is Regime.NEVER:
                continue
            worst_v = max(worst_v, abs(gen.value_B - switch_value_B(p, eq.t_star)))
            if eq.t_star > proc.horizon:
                beyond += 1
                continue
            worst = max(worst, abs(gen.t_star - eq.t_star),
                        abs(gen.p_star - eq.approval_belief(p.p0)))
        rejected = False
        try:
            equilibrium_general(weibull(1.0, 2.0, 1.0, 1.0), REF)
        except MLRViolated:
            rejected = True
        note["detail"] = (f"{len(sets)} sets, max |d(t*, p*)|={worst:.2e}, max |dW_B|={worst_v:.2e}, "
                          f"{beyond} with t* past the 1e-9 horizon; non-MLR rejected={rejected}")
        assert worst <= 1e-9
        assert worst_v <= 1e-9
        assert rejected


def test_c7_sum_rule(acceptance_log):
    with criterion(acceptance_log, "7 sum rule, analytic and per replication") as note:
        sets = param_sets(1000, seed=7, interesting=False) + param_sets(1000, seed=8)
        worst = 0.0
        for p in sets:
            a, b = ex_ante_payoffs(p)
            worst = max(worst, abs(a + b - (1 - 2 * p.c) * discounted_approval_mass(p)))
        worst_rep = 0.0
        for i, p in enumerate(param_sets(40, seed=9)):
            out = replication_outcomes(SimConfig(p, n=50_000, seed=i))
            lhs = out["payoff_A"] + out["payoff_B"]
            worst_rep = max(worst_rep, float(np.max(np.abs(lhs - (1 - 2 * p.c) * out["discounted_mass"]))))
        note["detail"] = (f"analytic max err {worst:.1e} over {len(sets)} sets; "
                          f"per-replication max err {worst_rep:.1e} over 40 x 50000")
        assert worst <= 1e-12
        assert worst_rep <= 1e-12
