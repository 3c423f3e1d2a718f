"""Backend selection for the compiled inner loops.

Set ``DECEM_NUMBA=0`` before import to force the pure-numpy code paths (also
used automatically when numba is not installed).  ``DECPOMDP_THREADS`` caps
the number of threads numba may use for parallel loops.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None


def _env_flag(name, default=True):
    raw = os.environ.get(name)
    if raw is None:
        return default
    return raw.strip().lower() not in ("0", "false", "no", "off", "")


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _env_flag("DECEM_NUMBA")

if HAVE_NUMBA:
    # prefer OpenMP: older TBB installs only produce a warning before numba falls back
    if not ({"NUMBA_THREADING_LAYER", "NUMBA_THREADING_LAYER_PRIORITY"} & set(os.environ)):
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    _threads = os.environ.get("DECPOMDP_THREADS")
    if _threads:
        try:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
        except ValueError:
            pass


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
