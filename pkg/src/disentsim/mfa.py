"""Mean-field Bloch equations for the driven, dipolar-coupled spin pair.

The state is a pair of single-spin Bloch vectors k_a, k_b in ``<sigma>`` units
(norm <= 1).  Spin b is driven; its transverse components live in the frame
rotating at the drive frequency, where the residual longitudinal field is
``omega_b - omega_p = -Delta`` (``Delta > 0`` means the drive sits above the
spin-b resonance, i.e. blue-detuned).  Spin a precesses at its own Larmor
frequency ``omega_a``.  The dipolar coupling contributes the bilinear terms:

    dk_a/dt = ( -omega_a k_ay                      - k_ax / T2a,
                 omega_a k_ax - g k_az k_bz        - k_ay / T2a,
                 g k_ay k_bz  - (k_az - kz0a) / T1a ),

    dk_b/dt = (  Delta k_by - g k_ax k_by          - k_bx / T2b,
                -Delta k_bx - omega_1 k_bz + g k_ax k_bx - k_by / T2b,
                 omega_1 k_by - (k_bz - kz0b) / T1b ).

With g = 0 the two spins decouple exactly and every trajectory spirals into a
fixed point; strong enough coupling at blue detuning destabilizes it into a
limit cycle with angular frequency close to omega_a.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ode import solve_dopri


def rates_from_lindblad(gamma_1: float, gamma_phi: float, n_0: float):
    """Map per-qubit channel rates to (T1, T2, kz0).

    1/T1 = Gamma_1 (2 n0 + 1); 1/T2 = (Gamma_1/2 + Gamma_phi)(2 n0 + 1);
    the equilibrium polarization is kz0 = -1/(2 n0 + 1) in <sigma> units.
    """
    if gamma_1 < 0 or gamma_phi < 0 or n_0 < 0:
        raise ValueError("rates and occupation must be >= 0")
    shift = 2.0 * n_0 + 1.0
    if gamma_1 == 0 and gamma_phi == 0:
        raise ValueError("all-zero rates give infinite relaxation times")
    t1 = np.inf if gamma_1 == 0 else 1.0 / (gamma_1 * shift)
    t2_rate = (0.5 * gamma_1 + gamma_phi) * shift
    t2 = np.inf if t2_rate == 0 else 1.0 / t2_rate
    return float(t1), float(t2), -1.0 / shift


@dataclass(frozen=True)
class MfaParams:
    omega_a: float
    Delta: float
    omega_1: float
    g: float
    T1a: float
    T2a: float
    T1b: float
    T2b: float
    kz0a: float
    kz0b: float

    def __post_init__(self):
        if self.omega_a <= 0:
            raise ValueError("omega_a must be positive")
        if min(self.T1a, self.T2a, self.T1b, self.T2b) <= 0:
            raise ValueError("relaxation times must be positive")
        for kz0 in (self.kz0a, self.kz0b):
            if not -1.0 <= kz0 < 0.0:
                raise ValueError("equilibrium polarizations must lie in [-1, 0)")

    @property
    def omega_R(self) -> float:
        """Rabi frequency sqrt(omega_1^2 + Delta^2)."""
        return float(np.hypot(self.omega_1, self.Delta))

    def hartmann_hahn_matched(self, tol: float = 1e-9) -> bool:
        return abs(self.omega_a - self.omega_R) < tol * self.omega_a

    @staticmethod
    def from_lindblad(
        omega_a: float,
        Delta: float,
        omega_1: float,
        g: float,
        gamma_1a: float,
        gamma_phia: float,
        n_0a: float,
        gamma_1b: float,
        gamma_phib: float,
        n_0b: float,
    ) -> "MfaParams":
        t1a, t2a, kz0a = rates_from_lindblad(gamma_1a, gamma_phia, n_0a)
        t1b, t2b, kz0b = rates_from_lindblad(gamma_1b, gamma_phib, n_0b)
        return MfaParams(omega_a, Delta, omega_1, g, t1a, t2a, t1b, t2b, kz0a, kz0b)


def mfa_rhs(state: np.ndarray, params: MfaParams) -> np.ndarray:
    """Coupled Bloch equations; ``state`` is (k_ax, k_ay, k_az, k_bx, k_by, k_bz)."""
    kax, kay, kaz, kbx, kby, kbz = state
    p = params
    return np.array(
        [
            -p.omega_a * kay - kax / p.T2a,
            p.omega_a * kax - p.g * kaz * kbz - kay / p.T2a,
            p.g * kay * kbz - (kaz - p.kz0a) / p.T1a,
            p.Delta * kby - p.g * kax * kby - kbx / p.T2b,
            -p.Delta * kbx - p.omega_1 * kbz + p.g * kax * kbx - kby / p.T2b,
            p.omega_1 * kby - (kbz - p.kz0b) / p.T1b,
        ]
    )


def decoupled_start(params: MfaParams, kick: float = 0.02) -> np.ndarray:
    """Both spins at their decoupled thermal points plus a small transverse kick."""
    return np.array([kick, 0.0, params.kz0a, kick, 0.0, params.kz0b])


def integrate_mfa(
    state0: np.ndarray,
    params: MfaParams,
    t_end: float,
    *,
    n_samples: int = 6000,
    rtol: float = 1e-8,
    atol: float = 1e-10,
):
    ts = np.linspace(0.0, t_end, n_samples + 1)
    ys = solve_dopri(
        lambda t, s: mfa_rhs(s, params), np.asarray(state0, dtype=float), ts, rtol=rtol, atol=atol
    )
    return ts, ys


# ---------------------------------------------------------------------------
# steady-state classification


@dataclass(frozen=True)
class CycleVerdict:
    kind: str  # "fixed_point" | "limit_cycle" | "undecided"
    period: float | None = None
    amplitude: float | None = None
    jitter: float | None = None

    def __str__(self):
        if self.kind == "limit_cycle":
            return f"limit_cycle(period={self.period:.6g}, amplitude={self.amplitude:.4g})"
        return self.kind


def _upward_crossings(ts: np.ndarray, x: np.ndarray) -> np.ndarray:
    idx = np.where((x[:-1] < 0.0) & (x[1:] >= 0.0))[0]
    if len(idx) == 0:
        return np.array([])
    frac = -x[idx] / (x[idx + 1] - x[idx])
    return ts[idx] + frac * (ts[idx + 1] - ts[idx])


def detect_limit_cycle(
    ts: np.ndarray,
    states: np.ndarray,
    *,
    settle_fraction: float = 0.5,
    tol: float = 1e-3,
    component: int = 0,
    max_jitter: float = 0.05,
) -> CycleVerdict:
    """Classify the trajectory tail as fixed point, limit cycle, or undecided.

    The first ``settle_fraction`` of the run is discarded.  A fixed point
    requires the peak-to-peak amplitude of every component to stay below
    ``tol``.  Otherwise the period is estimated from successive upward zero
    crossings of the chosen component (mean removed); at least 10 full periods
    must fit in the tail and their scatter must stay below ``max_jitter``.
    """
    ts = np.asarray(ts, dtype=float)
    states = np.asarray(states, dtype=float)
    i0 = int(len(ts) * settle_fraction)
    tail_t, tail = ts[i0:], states[i0:]
    amplitudes = tail.max(axis=0) - tail.min(axis=0)
    if np.all(amplitudes < tol):
        return CycleVerdict("fixed_point", amplitude=float(amplitudes.max()))
    x = tail[:, component] - tail[:, component].mean()
    crossings = _upward_crossings(tail_t, x)
    if len(crossings) < 11:
        return CycleVerdict("undecided", amplitude=float(amplitudes.max()))
    periods = np.diff(crossings)
    period = float(periods.mean())
    jitter = float(periods.std() / period)
    if jitter < max_jitter:
        return CycleVerdict(
            "limit_cycle",
            period=period,
            amplitude=float(amplitudes[component]),
            jitter=jitter,
        )
    return CycleVerdict("undecided", period=period, amplitude=float(amplitudes.max()), jitter=jitter)


def estimate_period_fft(ts: np.ndarray, x: np.ndarray) -> float | None:
    """Secondary period estimate from the dominant FFT bin of a uniform series."""
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    if len(x) < 16 or np.allclose(x, 0.0):
        return None
    dt = float(ts[1] - ts[0])
    spectrum = np.abs(np.fft.rfft(x))
    spectrum[0] = 0.0
    peak = int(np.argmax(spectrum))
    if peak == 0:
        return None
    freq = peak / (len(x) * dt)
    return 1.0 / freq


def detuning_scan(
    params: MfaParams,
    deltas,
    *,
    policy: str = "fixed_omega1",
    state0: np.ndarray | None = None,
    t_end: float = 3000.0,
    n_samples: int = 6000,
    settle_fraction: float = 0.5,
    tol: float = 1e-3,
):
    """Run the model over a detuning grid and classify each steady state.

    ``policy`` chooses what happens to the drive as Delta moves: keep
    ``omega_1`` fixed, or keep the Rabi frequency ``omega_R`` fixed by
    adjusting omega_1 (requires |Delta| <= omega_R).
    """
    if policy not in ("fixed_omega1", "fixed_omegaR"):
        raise ValueError(f"unknown scan policy {policy!r}")
    rows = []
    omega_r = params.omega_R
    for delta in deltas:
        delta = float(delta)
        if policy == "fixed_omegaR":
            if abs(delta) > omega_r:
                raise ValueError(f"|Delta|={abs(delta)} exceeds omega_R={omega_r} under fixed_omegaR")
            p = replace(params, Delta=delta, omega_1=float(np.sqrt(omega_r**2 - delta**2)))
        else:
            p = replace(params, Delta=delta)
        start = decoupled_start(p) if state0 is None else np.asarray(state0, dtype=float)
        ts, ys = integrate_mfa(start, p, t_end, n_samples=n_samples)
        verdict = detect_limit_cycle(ts, ys, settle_fraction=settle_fraction, tol=tol)
        rows.append((delta, p.g, verdict))
    return rows
