"""Closed-form two-spin-1/2 models and their oracle links to the full dynamics.

Two reductions are covered:

* the Bell model, H = -omega_B * P_B with P_B projecting on the singlet, whose
  steady state rho_s = (1 + kappa (1 - 4 P_B)) / 4 is fixed by a single scalar
  root kappa of  log((1 - 3 kappa)/(1 + kappa)) = beta*omega_B + 4 eta kappa gD/gH;

* the central-block truncation, where the state is a single 3-vector
  k = mu * n_hat on the {|01>, |10>} block and the master equation reduces to
  dk/dt = omega_E x k - 2 (k_H + k_D) with closed-form thermal and
  disentanglement fields.

Both live on the same 4x4 Hilbert space as the full engine, which the oracle
helpers at the bottom exploit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import SIGMA_X, SIGMA_Y, SIGMA_Z, MmeModel, ThetaSpec, integrate
from .linalg import DensityMatrix
from .observables import EntanglementConfig, ThermalConfig
from .ode import solve_dopri

ETA_TWO_QUBIT = 1.0 / 3.0

# singlet (|01> - |10>)/sqrt(2) in the {|00>, |01>, |10>, |11>} product basis
BELL_SINGLET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
P_BELL = np.outer(BELL_SINGLET, BELL_SINGLET.conj())
P_BELL.flags.writeable = False

_PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class BellModelParams:
    omega_B: float
    beta: float
    gamma_D: float
    gamma_H: float

    def __post_init__(self):
        if self.omega_B <= 0:
            raise ValueError("omega_B must be positive")
        if self.beta < 0 or self.gamma_D < 0 or self.gamma_H < 0:
            raise ValueError("beta and rates must be >= 0")

    @property
    def hw_beta(self) -> float:
        return self.omega_B * self.beta


def bell_hamiltonian(omega_B: float) -> np.ndarray:
    return -omega_B * P_BELL


def _kappa_equation(kappa: float, hw_beta: float, rate_ratio: float) -> float:
    return np.log((1.0 - 3.0 * kappa) / (1.0 + kappa)) - hw_beta - 4.0 * ETA_TWO_QUBIT * rate_ratio * kappa


def solve_kappa(params: BellModelParams, *, tol: float = 1e-12, allow_gamma_h_zero: bool = False) -> float:
    """Bisection root of the steady-state equation on (-1, 1/3).

    The left side diverges to +inf at kappa -> -1 and to -inf at kappa -> 1/3
    while the right side is affine, so the bracket always contains exactly one
    root.  For gamma_H = 0 the equation degenerates; the gamma_H -> 0 limit is
    the fully mixed state kappa = 0, returned only when explicitly requested.
    """
    if params.gamma_H == 0:
        if allow_gamma_h_zero:
            return 0.0
        raise ValueError("kappa equation requires gamma_H > 0 (pass allow_gamma_h_zero for the limit)")
    ratio = params.gamma_D / params.gamma_H
    lo, hi = -1.0 + 1e-14, 1.0 / 3.0 - 1e-14
    f_lo = _kappa_equation(lo, params.hw_beta, ratio)
    f_hi = _kappa_equation(hi, params.hw_beta, ratio)
    if not (f_lo > 0 > f_hi):
        raise RuntimeError(f"root not bracketed: f({lo})={f_lo:.3g}, f({hi})={f_hi:.3g}")
    # iterate past `tol` down to float spacing: the equation's slope diverges
    # near kappa = -1, so interval width alone understates the residual there
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _kappa_equation(mid, params.hw_beta, ratio) > 0:
            lo = mid
        else:
            hi = mid
    assert hi - lo <= tol
    return 0.5 * (lo + hi)


def kappa_thermal_limit(params: BellModelParams) -> float:
    """Large-beta*omega_B expansion: kappa ~ -1 + 4 exp(-beta*omega_B + 4 gD/gH)."""
    return -1.0 + 4.0 * np.exp(-params.hw_beta + 4.0 * params.gamma_D / params.gamma_H)


def kappa_mixed_limit(params: BellModelParams) -> float:
    """Small-beta*omega_B expansion: kappa ~ -(1/4) beta*omega_B / (1 + gD/gH)."""
    return -0.25 * params.hw_beta / (1.0 + params.gamma_D / params.gamma_H)


def bell_fixed_point(params: BellModelParams, kappa: float | None = None) -> DensityMatrix:
    if kappa is None:
        kappa = solve_kappa(params)
    m = (np.eye(4) + kappa * (np.eye(4) - 4.0 * P_BELL)) / 4.0
    return DensityMatrix((2, 2), m)


def bell_model(params: BellModelParams, log_floor: float = 1e-12) -> MmeModel:
    theta = ThetaSpec(
        gamma_D=params.gamma_D,
        gamma_H=params.gamma_H,
        entanglement=(EntanglementConfig(pair=(0, 1)),),
        thermal=ThermalConfig(beta=params.beta, log_floor=log_floor),
    )
    return MmeModel(bell_hamiltonian(params.omega_B), theta)


# ---------------------------------------------------------------------------
# truncation approximation


@dataclass(frozen=True)
class TruncationParams:
    """Central-block field, outer-level splitting, and the two rates.

    ``omega_s`` only sets the phase of the (unpopulated) outer levels; the
    ``beta * omega_s >> 1`` regime that justifies the truncation is recorded by
    :attr:`validity_margin` but never enforced.
    """

    omega_E: tuple[float, float, float]
    omega_s: float
    beta: float
    gamma_D: float
    gamma_H: float

    def __post_init__(self):
        object.__setattr__(self, "omega_E", tuple(float(x) for x in self.omega_E))
        if self.beta < 0 or self.gamma_D < 0 or self.gamma_H < 0:
            raise ValueError("beta and rates must be >= 0")

    @property
    def omega_E_vec(self) -> np.ndarray:
        return np.array(self.omega_E)

    @property
    def omega_E_norm(self) -> float:
        return float(np.linalg.norm(self.omega_E))

    @property
    def validity_margin(self) -> float:
        """beta * omega_s; the truncated block is a good model when >> 1."""
        return self.beta * self.omega_s


_MU_MAX = 1.0 - 1e-12  # arctanh diverges at mu = 1; (1-mu^2)*arctanh(mu) -> 0


def _atanh_over_mu(mu: float) -> float:
    if mu < 1e-8:
        return 1.0 + mu * mu / 3.0
    return float(np.arctanh(min(mu, _MU_MAX)) / mu)


def trunc_rhs(k: np.ndarray, params: TruncationParams, strict: bool = True) -> np.ndarray:
    """dk/dt = omega_E x k - 2 (k_H + k_D) for the block Bloch vector.

    ``strict=False`` drops the norm guard so adaptive integrators may evaluate
    trial stages outside the ball; the formulas stay finite there (arctanh is
    clamped) and step rejection pulls the solution back.
    """
    k = np.asarray(k, dtype=float)
    mu = float(np.linalg.norm(k))
    if strict and mu > 1.0 + 1e-9:
        raise ValueError(f"Bloch vector norm {mu} exceeds 1")
    w = params.omega_E_vec
    n_perp2 = mu * mu - k[2] * k[2]
    k_d = -(2.0 / 3.0) * params.gamma_D * np.array(
        [(n_perp2 - 1.0) * k[0], (n_perp2 - 1.0) * k[1], n_perp2 * k[2]]
    )
    k_h = params.gamma_H * (
        0.5 * params.beta * w
        + ((1.0 - mu * mu) * _atanh_over_mu(mu) - 0.5 * params.beta * float(w @ k)) * k
    )
    return np.cross(w, k) - 2.0 * (k_h + k_d)


def thermal_bloch_point(params: TruncationParams) -> np.ndarray:
    """Fixed point of the gamma_D = 0 flow: -tanh(beta |omega_E| / 2) * unit(omega_E)."""
    w = params.omega_E_vec
    return -np.tanh(0.5 * params.beta * params.omega_E_norm) * w / params.omega_E_norm


def trunc_observables(k: np.ndarray, params: TruncationParams) -> dict[str, float]:
    """Closed-form expectations on the truncated block."""
    k = np.asarray(k, dtype=float)
    mu = float(np.linalg.norm(k))
    mu_c = min(mu, _MU_MAX)
    nz2 = (k[2] / mu) ** 2 if mu > 0 else 0.0
    q_d = (1.0 + 2.0 * mu * mu + mu * mu * nz2 * (mu * mu * nz2 - 4.0)) / 3.0
    ent = -0.5 * (1.0 - mu_c) * np.log(0.5 * (1.0 - mu_c)) - 0.5 * (1.0 + mu_c) * np.log(
        0.5 * (1.0 + mu_c)
    )
    q_h = 0.5 * params.beta * float(params.omega_E_vec @ k) - ent
    return {
        "q_disentangle": float(q_d),
        "q_thermal": float(q_h),
        "entropy": float(ent),
        "purity": 0.5 * (1.0 + mu * mu),
    }


def integrate_trunc(
    k0: np.ndarray,
    params: TruncationParams,
    t_end: float,
    *,
    n_samples: int = 1000,
    rtol: float = 1e-9,
    atol: float = 1e-12,
):
    k0 = np.asarray(k0, dtype=float)
    if np.linalg.norm(k0) > 1.0 + 1e-9:
        raise ValueError("initial Bloch vector must lie in the unit ball")
    ts = np.linspace(0.0, t_end, n_samples + 1)
    ks = solve_dopri(
        lambda t, k: trunc_rhs(k, params, strict=False), k0, ts, rtol=rtol, atol=atol
    )
    return ts, ks


# ---------------------------------------------------------------------------
# oracle helpers spanning the reduced model and the full engine


def trunc_density(k: np.ndarray) -> DensityMatrix:
    """4x4 state with the given Bloch vector on the central block, outer levels empty."""
    k = np.asarray(k, dtype=float)
    block = 0.5 * (np.eye(2, dtype=complex) + sum(k[i] * _PAULI[i] for i in range(3)))
    m = np.zeros((4, 4), dtype=complex)
    m[1:3, 1:3] = block
    return DensityMatrix((2, 2), m)


def trunc_hamiltonian(params: TruncationParams) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = params.omega_s / 2.0
    h[3, 3] = params.omega_s / 2.0
    h[1:3, 1:3] = 0.5 * sum(params.omega_E[i] * _PAULI[i] for i in range(3))
    return h


def central_block_bloch(rho: np.ndarray) -> np.ndarray:
    block = np.asarray(rho)[1:3, 1:3]
    return np.array([float(np.trace(block @ p).real) for p in _PAULI])


def trunc_model(params: TruncationParams, log_floor: float = 1e-9) -> MmeModel:
    """Full 4x4 master-equation model matching the truncated dynamics.

    The default log clamp is raised to 1e-9: the clamped log acts on the empty
    outer levels with value log(floor), and keeping beta*omega_s/2 above
    |log(floor)| makes roundoff noise in those levels decay instead of grow.
    The central-block dynamics is exactly independent of both choices.
    """
    theta = ThetaSpec(
        gamma_D=params.gamma_D,
        gamma_H=params.gamma_H,
        entanglement=(EntanglementConfig(pair=(0, 1)),),
        thermal=ThermalConfig(beta=params.beta, log_floor=log_floor),
    )
    return MmeModel(trunc_hamiltonian(params), theta)


def trunc_vs_full(
    k0: np.ndarray,
    params: TruncationParams,
    t_end: float,
    *,
    n_samples: int = 400,
    rtol: float = 1e-10,
    atol: float = 1e-13,
    log_floor: float = 1e-9,
) -> float:
    """Max distance between the 3-vector ODE and the full master equation.

    Both integrations share the sample grid; the block structure is preserved
    exactly by the full dynamics, so the deviation measures integration error
    only.
    """
    ts, ks = integrate_trunc(k0, params, t_end, n_samples=n_samples, rtol=rtol, atol=atol)
    traj = integrate(
        trunc_density(k0),
        trunc_model(params, log_floor=log_floor),
        t_end,
        n_samples=n_samples,
        rtol=rtol,
        atol=atol,
        store_states=True,
    )
    ks_full = np.array([central_block_bloch(rho) for rho in traj.states])
    return float(np.max(np.linalg.norm(ks - ks_full, axis=1)))
