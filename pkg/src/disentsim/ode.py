"""Adaptive embedded Runge-Kutta integration on flat numpy arrays.

A single Dormand-Prince 5(4) stepper serves every model in the package (full
density-matrix dynamics and the reduced real-vector models), so the abort
semantics, sampling behaviour, and the fixed-step RK4 oracle mode live in one
place.  The propagated solution is the 5th-order one; steps are clipped to
land exactly on the requested sample times, which avoids dense-output
interpolation at negligible cost for the step counts seen here.
"""

from __future__ import annotations

import numpy as np


class NumericalFailure(RuntimeError):
    """Raised when an integration violates its validity monitors or underflows."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message if t is None else f"{message} (at t={t:.6g})")
        self.t = t


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B5 - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

MAX_STEPS = 20_000_000


def _error_norm(diff, y_old, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean(np.abs(diff / scale) ** 2)))


def solve_dopri(
    f,
    y0: np.ndarray,
    sample_times: np.ndarray,
    *,
    rtol: float = 1e-7,
    atol: float = 1e-9,
    max_step: float = np.inf,
    first_step: float | None = None,
    step_observer=None,
):
    """Integrate dy/dt = f(t, y) through the given strictly increasing times.

    Returns an array of solution snapshots, one per sample time (the first
    sample must be the initial time).  ``step_observer(t, y)``, when given, is
    called after every accepted step and may raise :class:`NumericalFailure`
    to abort (used for trace and norm monitors).
    """
    ts = np.asarray(sample_times, dtype=float)
    if ts.ndim != 1 or len(ts) < 2 or np.any(np.diff(ts) <= 0):
        raise ValueError("sample_times must be strictly increasing with >= 2 entries")
    y = np.array(y0, dtype=np.result_type(np.asarray(y0).dtype, float))
    t = ts[0]
    t_end = ts[-1]
    out = np.empty((len(ts),) + y.shape, dtype=y.dtype)
    out[0] = y
    i_next = 1

    k = [None] * 7
    k[0] = np.asarray(f(t, y))
    if first_step is not None:
        h = first_step
    else:
        # scale the opening step to the initial slope so fast dynamics do not
        # launch the first trial far outside the solution's neighbourhood
        span = t_end - t
        scale = (np.linalg.norm(y) + atol) / (np.linalg.norm(k[0]) + 1e-300)
        h = min(span / 1e3, 0.1 * scale, max_step)
    n_steps = 0
    while i_next < len(ts):
        if n_steps > MAX_STEPS:
            raise NumericalFailure(f"step budget exceeded ({MAX_STEPS} steps)", t)
        h = min(h, max_step, t_end - t)
        clipped = False
        if t + h >= ts[i_next] - 1e-14 * max(1.0, abs(ts[i_next])):
            h = ts[i_next] - t
            clipped = True
        if h <= abs(t) * 1e-14 + 1e-300:
            raise NumericalFailure(f"step size underflow (h={h:.3e})", t)

        for i in range(1, 7):
            yi = y + h * sum(_A[i][j] * k[j] for j in range(i))
            k[i] = np.asarray(f(t + _C[i] * h, yi))
        y_new = y + h * sum(_B5[i] * k[i] for i in range(7))
        err = _error_norm(h * sum(_E[i] * k[i] for i in range(7)), y, y_new, rtol, atol)
        n_steps += 1

        if err <= 1.0:
            t = t + h
            y = y_new
            k[0] = k[6]  # FSAL
            if step_observer is not None:
                step_observer(t, y)
            if clipped:
                out[i_next] = y
                i_next += 1
        factor = 0.9 * (err + 1e-300) ** -0.2
        h = h * min(5.0, max(0.2, factor))
    return out


def solve_rk4(f, y0: np.ndarray, sample_times: np.ndarray, substeps: int = 1, step_observer=None):
    """Classical fixed-step RK4 through the sample grid (oracle comparisons)."""
    ts = np.asarray(sample_times, dtype=float)
    y = np.array(y0, dtype=np.result_type(np.asarray(y0).dtype, float))
    out = np.empty((len(ts),) + y.shape, dtype=y.dtype)
    out[0] = y
    for i in range(len(ts) - 1):
        t = ts[i]
        h = (ts[i + 1] - ts[i]) / substeps
        for s in range(substeps):
            t0 = t + s * h
            k1 = np.asarray(f(t0, y))
            k2 = np.asarray(f(t0 + h / 2, y + h / 2 * k1))
            k3 = np.asarray(f(t0 + h / 2, y + h / 2 * k2))
            k4 = np.asarray(f(t0 + h, y + h * k3))
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if step_observer is not None:
            step_observer(ts[i + 1], y)
        out[i + 1] = y
    return out
