"""Monte Carlo kernels: counter-based uniforms and approval counting.

Replication i uses two uniforms derived from the SplitMix64 stream at
positions 2i+1 (type draw) and 2i+2 (signal draw), keyed by the seed.  Every
draw is a pure function of (seed, i), so results do not depend on how the
replications are split across workers, or on the backend.

The signal time is exponential by inverse CDF, s = -ln(u)/lambda, and the
project is approved iff s > tau.  The kernels test the equivalent
u < exp(-lambda * tau) so that no platform log enters the comparison.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._accel import HAVE_NUMBA, resolve_backend

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
TWO = np.uint64(2)
S30, S27, S31, S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
ULP53 = 2.0 ** -53
BLOCK = 1 << 16
_MASK = (1 << 64) - 1


def seed_key(seed: int) -> np.uint64:
    """Scramble a user seed into a stream key (one SplitMix64 step)."""
    z = (int(seed) + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return np.uint64(z ^ (z >> 31))


def uniforms(key: np.uint64, start: int, count: int, draw: int) -> np.ndarray:
    """Open-interval uniforms for replications start .. start+count-1."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    z = key + (idx * TWO + np.uint64(draw + 1)) * GAMMA
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    z = z ^ (z >> S31)
    return ((z >> S11).astype(np.float64) + 0.5) * ULP53


def _block_counts(key, start, count, p0, surv_a, surv_b):
    is_a = uniforms(key, start, count, 0) < p0
    u = uniforms(key, start, count, 1)
    approved = u < np.where(is_a, surv_a, surv_b)
    n_a = int(np.count_nonzero(is_a))
    app_a = int(np.count_nonzero(approved & is_a))
    app_b = int(np.count_nonzero(approved)) - app_a
    return n_a, app_a, app_b


def counts_numpy(key, n, p0, surv_a, surv_b, workers=1):
    starts = range(0, n, BLOCK)
    job = lambda s: _block_counts(key, s, min(BLOCK, n - s), p0, surv_a, surv_b)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    else:
        parts = [job(s) for s in starts]
    return tuple(sum(p[k] for p in parts) for k in range(3))


if HAVE_NUMBA:
    import numba
    from numba import njit, prange

    @njit(inline="always")
    def _uniform_nb(key, i, draw):
        z = key + (np.uint64(i) * TWO + np.uint64(draw + 1)) * GAMMA
        z = (z ^ (z >> S30)) * MIX1
        z = (z ^ (z >> S27)) * MIX2
        z = z ^ (z >> S31)
        return (np.float64(z >> S11) + 0.5) * ULP53

    @njit(parallel=True, cache=True)
    def _counts_nb(key, n, p0, surv_a, surv_b):
        n_a = 0
        app_a = 0
        app_b = 0
        for i in prange(n):
            if _uniform_nb(key, i, 0) < p0:
                n_a += 1
                if _uniform_nb(key, i, 1) < surv_a:
                    app_a += 1
            elif _uniform_nb(key, i, 1) < surv_b:
                app_b += 1
        return n_a, app_a, app_b

    def counts_numba(key, n, p0, surv_a, surv_b, workers=1):
        prev = numba.get_num_threads()
        numba.set_num_threads(max(1, min(workers, numba.config.NUMBA_NUM_THREADS)))
        try:
            out = _counts_nb(key, n, p0, surv_a, surv_b)
        finally:
            numba.set_num_threads(prev)
        return tuple(int(v) for v in out)


def approval_counts(seed: int, n: int, p0: float, surv_a: float, surv_b: float,
                    workers: int = 1, backend: str | None = None) -> tuple[int, int, int]:
    """(#type a, #approved with type a, #approved with type b) over n replications.

    ``surv_*`` are the probabilities exp(-lambda_theta * tau) that no signal
    arrives before the approval time.
    """
    key = seed_key(seed)
    if resolve_backend(backend) == "numba":
        return counts_numba(key, int(n), float(p0), float(surv_a), float(surv_b), workers)
    return counts_numpy(key, int(n), float(p0), float(surv_a), float(surv_b), workers)


def replication_draws(seed: int, n: int, p0: float, lambda_a: float, lambda_b: float):
    """Per-replication (is_a, signal_time) arrays; numpy only."""
    key = seed_key(seed)
    is_a = uniforms(key, 0, n, 0) < p0
    u = uniforms(key, 0, n, 1)
    lam = np.where(is_a, lambda_a, lambda_b)
    with np.errstate(divide="ignore"):
        s = np.where(lam > 0.0, -np.log(u) / np.where(lam > 0.0, lam, 1.0), np.inf)
    return is_a, s, u
