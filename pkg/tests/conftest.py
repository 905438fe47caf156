import numpy as np
import pytest

from veilvote.model import ModelParams

ACCEPTANCE_LINES = []


def draw_params(rng, interesting=True):
    """One random valid parameter set with lambda_a > lambda_b."""
    lb = rng.uniform(0.0, 10.0)
    la = lb + rng.uniform(0.5, 50.0)
    r = rng.uniform(0.0, 2.0)
    p0 = rng.uniform(0.05, 0.95)
    c = rng.uniform(0.01, min(p0, 0.5)) if interesting else rng.uniform(0.01, 0.99)
    return ModelParams(p0, c, r, la, lb)


def param_sets(n, seed, interesting=True):
    rng = np.random.default_rng(seed)
    return [draw_params(rng, interesting) for _ in range(n)]


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
