import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from veilvote.analysis import ex_ante_payoffs
from veilvote.errors import OutOfRange
from veilvote.model import ModelParams, Regime, c_bar, solve_equilibrium, time_to_reach
from veilvote.welfare import Classification, alpha_bar, feasible_window, optimal_rule, welfare_at

from .test_model import params

REF = ModelParams(0.6, 0.1, 1.0, 35.0, 3.0)
ALPHAS = [i / 20 for i in range(21)]


def ref(**kw):
    return REF.replace(**kw)


def alpha_bar_oracle(p):
    k = (p.lambda_a + p.r) / (p.lambda_b + p.r)
    g = lambda a: k * (p.c - a) / (1.0 - p.c - a) - (1.0 - p.c) / p.c
    return brentq(g, 0.0, p.c, xtol=1e-15, rtol=1e-15)


def grid_argmax(p, alpha, n=100_001):
    lo, hi = feasible_window(p)
    ts = np.linspace(lo, hi, n)
    w = (p.p0 * (alpha - p.c) * np.exp(-(p.lambda_a + p.r) * ts)
         + (1 - p.p0) * (1 - alpha - p.c) * np.exp(-(p.lambda_b + p.r) * ts))
    j = int(np.argmax(w))
    return ts[j], w[j], (hi - lo) / (n - 1)


def test_welfare_examples():
    assert welfare_at(REF, 0.5, 0.0) == pytest.approx(0.40, abs=1e-15)
    assert welfare_at(ref(c=1e-12), 1.0, 0.0) == pytest.approx(0.6, abs=1e-11)
    t_star = solve_equilibrium(REF).t_star
    assert welfare_at(REF, 0.5, t_star) == pytest.approx(0.30418554398532505, rel=1e-12)


def test_welfare_rejects_bad_inputs():
    with pytest.raises(OutOfRange):
        welfare_at(REF, 1.5, 0.0)
    with pytest.raises(OutOfRange):
        welfare_at(REF, 0.5, -1.0)


@given(params(interesting=True), st.floats(0.0, 1.0))
def test_consistency_with_payoffs(p, alpha):
    eq = solve_equilibrium(p)
    a, b = ex_ante_payoffs(p)
    assert welfare_at(p, alpha, eq.t_star) == pytest.approx(alpha * a + (1 - alpha) * b, abs=1e-12)


def test_feasible_window_examples():
    lo, hi = feasible_window(REF)
    assert lo == 0.0
    assert hi == pytest.approx(math.log(13.5) / 32, rel=1e-14)
    assert hi == pytest.approx(time_to_reach(REF, 0.1), rel=1e-13)
    assert hi == pytest.approx(0.08133405267013699, rel=1e-12)

    lo, _ = feasible_window(ref(p0=0.95))
    assert lo > 0.0
    assert lo == pytest.approx(time_to_reach(ref(p0=0.95), 0.9), rel=1e-13)

    assert feasible_window(ref(p0=0.05)) is None


def test_optimal_rule_examples():
    pol = optimal_rule(REF, 0.5)
    assert pol.T_opt == 0.0
    assert pol.classification is Classification.DEADLINE
    assert pol.W_opt == pytest.approx(0.40, abs=1e-15)
    t, w, step = grid_argmax(REF, 0.5)
    assert abs(pol.T_opt - t) <= step and pol.W_opt == pytest.approx(w, abs=1e-9)

    q = ref(c=0.3)
    pol = optimal_rule(q, 0.05)
    assert pol.classification is Classification.NO_INTERVENTION
    assert pol.T_opt == pytest.approx(pol.t_star, abs=1e-10)
    ts = np.linspace(*feasible_window(q), 2001)
    w = [welfare_at(q, 0.05, float(t)) for t in ts]
    assert all(b >= a for a, b in zip(w, w[1:]))

    assert optimal_rule(ref(p0=0.4), 0.3).classification is Classification.NO_EFFECT
    assert optimal_rule(ref(c=0.6), 0.3).classification is Classification.NEVER_APPROVABLE


def test_alpha_bar_examples():
    q = ref(c=0.3)
    assert alpha_bar(q) == pytest.approx(0.16, abs=1e-12)
    assert alpha_bar(q) == pytest.approx(alpha_bar_oracle(q), abs=1e-12)
    assert alpha_bar(ref(c=0.25)) is None  # limit value 0, not applicable
    assert alpha_bar(ref(c=0.25 + 1e-9)) == pytest.approx(0.0, abs=1e-7)
    assert alpha_bar(ref(c=0.1)) is None
    assert alpha_bar(ref(c=0.5)) == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=300)
@given(params(interesting=True), st.sampled_from(ALPHAS))
def test_no_minimum_waiting_time(p, alpha):
    pol = optimal_rule(p, alpha)
    if pol.classification is Classification.NO_EFFECT:
        return
    assert pol.T_opt <= pol.t_star + 1e-10
    assert pol.W_opt >= welfare_at(p, alpha, pol.t_star) - 1e-12


@settings(max_examples=60, deadline=None)
@given(params(interesting=True), st.sampled_from(ALPHAS))
def test_grid_oracle(p, alpha):
    assume(solve_equilibrium(p).regime is Regime.DELAYED)
    pol = optimal_rule(p, alpha)
    t, w, step = grid_argmax(p, alpha)
    assert pol.W_opt >= w - 1e-12
    assert pol.W_opt == pytest.approx(w, abs=1e-9)
    # flat maxima make the argmax ambiguous; compare values there
    if abs(welfare_at(p, alpha, min(t + step, feasible_window(p)[1])) - w) > 1e-12:
        assert abs(pol.T_opt - t) <= step * (1 + 1e-9)


@settings(max_examples=200)
@given(params(interesting=True))
def test_alpha_bar_flip(p):
    eq = solve_equilibrium(p)
    assume(eq.regime is Regime.DELAYED and p.c > c_bar(p))
    assume(p.c < 0.5)  # at c = 1/2 the feasible window is a single point
    ab = alpha_bar(p)
    if p.lambda_b + p.r < 1e-300 * (p.lambda_a + p.r):
        assert ab == pytest.approx(p.c, abs=1e-15)  # infinite intensity ratio
    else:
        assert 0.0 <= ab <= p.c  # rounds to c when K is astronomically large
        assert ab == pytest.approx(alpha_bar_oracle(p), abs=1e-9)
    assume(ab > 1e-6)
    # below the T tolerance a deadline cannot be told apart from t*
    assume(eq.t_star - feasible_window(p)[0] > 1e-8)
    assert optimal_rule(p, ab - 1e-6).classification is Classification.NO_INTERVENTION
    assert optimal_rule(p, ab + 1e-6).classification is Classification.DEADLINE


def test_deadline_everywhere_below_c_bar():
    for alpha in ALPHAS[1:]:
        assert optimal_rule(REF, alpha).classification is Classification.DEADLINE
    # alpha = 0 is B's own problem, so equilibrium timing is already optimal
    pol = optimal_rule(REF, 0.0)
    assert pol.classification is Classification.NO_INTERVENTION
    assert pol.T_opt == pytest.approx(pol.t_star, abs=1e-12)


def test_policy_dict():
    d = optimal_rule(ref(c=0.3), 0.05).to_dict()
    assert d["classification"] == "NoInterventionOptimal"
    assert set(d) == {"alpha", "T_opt", "classification", "W_opt", "alpha_bar", "t_star"}
