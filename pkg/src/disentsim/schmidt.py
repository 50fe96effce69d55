"""Reduced dynamics of bipartite pure-state Schmidt coefficients.

With a vanishing Hamiltonian the disentanglement flow closes on the Schmidt
coefficients q_l alone:

    dq_l/dt = c * gamma_eta * q_l * (q_l**(2(m-1)) - L_{2m}),   L_n = sum q_l**n,

with exponent m = 3 for the correlation-based generator (m = 2 covers the
Schmidt-operator variant) and prefactor c = 4 for d_m >= 3, c = 12 for
d_m = 2.  The bracket is the "capitalistic" function: coefficients above the
L_{2m} waterline grow at the expense of the rest, so the initially largest one
wins and the state converges to a product state.  The flow preserves the
normalization L_2 = 1 and never reorders the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ode import NumericalFailure, solve_dopri

NORM_ATOL = 1e-10


@dataclass(frozen=True)
class SchmidtModel:
    """Rate product gamma_D * eta and the generator exponent."""

    gamma_eta: float
    m: int = 3

    def __post_init__(self):
        if self.gamma_eta <= 0:
            raise ValueError("gamma_eta must be positive")
        if self.m not in (2, 3):
            raise ValueError("exponent m must be 2 or 3")


def validate_state(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or len(q) < 2:
        raise ValueError("need a 1-d coefficient vector of length >= 2")
    if np.any(q < 0):
        raise ValueError("Schmidt coefficients must be nonnegative")
    if abs(np.sum(q * q) - 1.0) > NORM_ATOL:
        raise ValueError("coefficients must satisfy sum q_l^2 = 1")
    return q


def moments(q: np.ndarray, n: int) -> float:
    """L_n = sum_l q_l**n."""
    if n < 1:
        raise ValueError("moment order must be >= 1")
    return float(np.sum(np.asarray(q, dtype=float) ** n))


def capitalistic(q: np.ndarray, l: int, m: int) -> float:
    """K_l = q_l**(2(m-1)) - L_{2m}; positive for coefficients above the waterline."""
    q = np.asarray(q, dtype=float)
    if not 0 <= l < len(q):
        raise IndexError(f"index {l} out of range for {len(q)} coefficients")
    return float(q[l] ** (2 * (m - 1)) - moments(q, 2 * m))


def growth_prefactor(d_m: int) -> float:
    return 12.0 if d_m == 2 else 4.0


def schmidt_rhs(q: np.ndarray, model: SchmidtModel) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    m = model.m
    l2m = np.sum(q ** (2 * m))
    c = growth_prefactor(len(q))
    return c * model.gamma_eta * q * (q ** (2 * (m - 1)) - l2m)


def potential(q: np.ndarray, m: int) -> float:
    """Scalar function whose gradient is q_l * K_l on the unit sphere.

    H = (1 + m (1 - L_2)) / (2m) * L_{2m}; along normalized trajectories the
    flow ascends it, so L_{2m} is non-decreasing.
    """
    q = np.asarray(q, dtype=float)
    l2 = np.sum(q * q)
    return float((1.0 + m * (1.0 - l2)) / (2.0 * m) * np.sum(q ** (2 * m)))


def potential_gradient(q: np.ndarray, m: int) -> np.ndarray:
    """Exact unconstrained gradient of :func:`potential` (for oracle checks)."""
    q = np.asarray(q, dtype=float)
    l2 = np.sum(q * q)
    l2m = np.sum(q ** (2 * m))
    return -q * l2m + (1.0 + m * (1.0 - l2)) * q ** (2 * m - 1)


def integrate_schmidt(
    q0: np.ndarray,
    model: SchmidtModel,
    t_end: float,
    *,
    n_samples: int = 400,
    rtol: float = 1e-9,
    atol: float = 1e-11,
    norm_tol: float = 1e-8,
):
    """Integrate the coefficient flow; returns (times, coefficient rows).

    The L_2 = 1 normalization is monitored after every accepted step (no
    renormalization); drifting beyond ``norm_tol`` aborts.
    """
    q0 = validate_state(q0)

    def monitor(t, q):
        dev = abs(float(np.sum(q * q)) - 1.0)
        if dev > norm_tol:
            raise NumericalFailure(f"norm deviation {dev:.3e} exceeded {norm_tol:.1e}", t)

    ts = np.linspace(0.0, t_end, n_samples + 1)
    qs = solve_dopri(
        lambda t, q: schmidt_rhs(q, model), q0, ts, rtol=rtol, atol=atol, step_observer=monitor
    )
    return ts, qs
