"""Backend selection for the hot kernels.

Numba is used when importable unless ``VEILVOTE_DISABLE_NUMBA`` is set to a
truthy value, in which case the pure-numpy path runs.  Both paths produce
bit-identical results.
"""
import os
import warnings

DISABLE_ENV = "VEILVOTE_DISABLE_NUMBA"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
    # older system TBB: numba falls back to another threading layer anyway
    warnings.filterwarnings("ignore", message="The TBB threading layer requires")
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def numba_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not numba_disabled() else "numpy"


def resolve_backend(backend: str | None) -> str:
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
