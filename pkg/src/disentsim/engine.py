"""Right-hand side assembly and integration of the nonlinear master equation

    drho/dt = i [rho, H] - Theta rho - rho Theta + 2 <Theta> rho + L(rho),

with the state-dependent generator Theta = gamma_H * (beta H + log rho)
+ gamma_D * Q_pair(rho) rebuilt at every stage evaluation, and an optional
linear Lindblad dissipator L.  The nonlinear part conserves the trace for any
Theta and preserves purity of pure states; both properties are monitored, not
enforced: there is no renormalization or positivity projection, and drifting
past the configured tolerances aborts the run with diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gellmann import FactorizedBasis, bloch_singular_values, project_bloch
from .linalg import DensityMatrix, partial_trace
from .observables import (
    EntanglementConfig,
    PairCorrelator,
    ThermalConfig,
    entropy,
    q_thermal,
)
from .ode import NumericalFailure, solve_dopri, solve_rk4

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = SIGMA_X - 1j * SIGMA_Y
SIGMA_PLUS = SIGMA_X + 1j * SIGMA_Y


@dataclass(frozen=True)
class ThetaSpec:
    """Composition of the nonlinear generator Theta.

    ``entanglement`` lists one config per subsystem pair to disentangle (all
    weighted by the single rate ``gamma_D``); ``thermal`` provides beta and the
    log clamp used by the free-energy generator.  ``fixed`` adds a constant
    Hermitian operator, which is mainly useful for studying the dynamics under
    a state-independent generator.
    """

    gamma_D: float = 0.0
    gamma_H: float = 0.0
    entanglement: tuple[EntanglementConfig, ...] = (EntanglementConfig(),)
    thermal: ThermalConfig | None = None
    fixed: np.ndarray | None = None

    def __post_init__(self):
        if self.gamma_D < 0 or self.gamma_H < 0:
            raise ValueError("rates must be >= 0")
        if self.gamma_H > 0 and self.thermal is None:
            raise ValueError("gamma_H > 0 requires a ThermalConfig")


@dataclass(frozen=True)
class LindbladSpec:
    """Per-qubit amplitude and dephasing channels.

    For each subsystem L the dissipator is

        (n0+1) G1/4 D(sigma_-) + n0 G1/4 D(sigma_+) + (2 n0 + 1) Gphi/2 D(sigma_z)

    with sigma_pm = sigma_x +/- i sigma_y, acting on that qubit alone.  Entries
    are matched to subsystems by position; use zeros to leave one undamped.
    """

    gamma_1: tuple[float, ...]
    gamma_phi: tuple[float, ...]
    n_0: tuple[float, ...]

    def __post_init__(self):
        g1 = tuple(float(x) for x in self.gamma_1)
        gp = tuple(float(x) for x in self.gamma_phi)
        n0 = tuple(float(x) for x in self.n_0)
        if not len(g1) == len(gp) == len(n0):
            raise ValueError("gamma_1, gamma_phi, n_0 must have equal lengths")
        if any(x < 0 for x in g1 + gp + n0):
            raise ValueError("Lindblad rates and occupations must be >= 0")
        object.__setattr__(self, "gamma_1", g1)
        object.__setattr__(self, "gamma_phi", gp)
        object.__setattr__(self, "n_0", n0)


def _embed_qubit_op(op: np.ndarray, dims, index: int) -> np.ndarray:
    full = np.array([[1.0 + 0j]])
    for k, d in enumerate(dims):
        full = np.kron(full, op if k == index else np.eye(d))
    return full


class _PreparedLindblad:
    def __init__(self, spec: LindbladSpec, dims):
        if len(spec.gamma_1) != len(dims):
            raise ValueError(f"Lindblad spec covers {len(spec.gamma_1)} subsystems, state has {len(dims)}")
        self.terms = []  # (coefficient, X, X^dag X)
        for idx, (g1, gphi, n0) in enumerate(zip(spec.gamma_1, spec.gamma_phi, spec.n_0)):
            if g1 == 0 and gphi == 0:
                continue
            if dims[idx] != 2:
                raise ValueError(f"Lindblad channels require qubit subsystems, dims[{idx}]={dims[idx]}")
            for coef, op in (
                ((n0 + 1.0) * g1 / 4.0, SIGMA_MINUS),
                (n0 * g1 / 4.0, SIGMA_PLUS),
                ((2.0 * n0 + 1.0) * gphi / 2.0, SIGMA_Z),
            ):
                if coef == 0.0:
                    continue
                x = _embed_qubit_op(op, dims, idx)
                self.terms.append((coef, x, x.conj().T @ x))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho)
        for coef, x, xdx in self.terms:
            out += coef * (x @ rho @ x.conj().T - 0.5 * (xdx @ rho + rho @ xdx))
        return out


def lindblad_dissipator(rho, spec: LindbladSpec, dims=None) -> np.ndarray:
    """Sum of the per-qubit damping channels applied to ``rho``."""
    if isinstance(rho, DensityMatrix):
        dims = rho.dims
        rho = rho.matrix
    if dims is None:
        raise ValueError("dims required when rho is a bare matrix")
    return _PreparedLindblad(spec, dims).apply(np.asarray(rho, dtype=complex))


@dataclass(frozen=True)
class MmeModel:
    """Hamiltonian, nonlinear generator composition, and optional damping."""

    hamiltonian: np.ndarray
    theta: ThetaSpec
    lindblad: LindbladSpec | None = None


class _PreparedModel:
    """Everything precomputable for fast repeated RHS evaluation on one dims layout."""

    def __init__(self, model: MmeModel, dims):
        self.dims = tuple(int(d) for d in dims)
        d = int(np.prod(self.dims))
        h = np.asarray(model.hamiltonian, dtype=complex)
        if h.shape != (d, d):
            raise ValueError(f"Hamiltonian shape {h.shape} does not match dims {self.dims}")
        self.h = h
        self.theta = model.theta
        self.correlators = (
            [PairCorrelator(self.dims, cfg) for cfg in model.theta.entanglement]
            if model.theta.gamma_D > 0
            else []
        )
        self.lindblad = _PreparedLindblad(model.lindblad, self.dims) if model.lindblad else None

    def theta_operator(self, rho: np.ndarray) -> np.ndarray:
        spec = self.theta
        d = rho.shape[0]
        theta = np.zeros((d, d), dtype=complex)
        if spec.gamma_H > 0:
            theta += spec.gamma_H * q_thermal(rho, self.h, spec.thermal)
        if spec.gamma_D > 0:
            for corr in self.correlators:
                theta += spec.gamma_D * corr.q_operator(rho)
        if spec.fixed is not None:
            theta += np.asarray(spec.fixed, dtype=complex)
        return theta

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        out = 1j * (rho @ self.h - self.h @ rho)
        theta = self.theta_operator(rho)
        if theta.any():
            tr = np.trace(theta @ rho).real
            out -= theta @ rho + rho @ theta - 2.0 * tr * rho
        if self.lindblad is not None:
            out += self.lindblad.apply(rho)
        return out


def mme_rhs(rho, hamiltonian, theta: ThetaSpec, lindblad: LindbladSpec | None = None, dims=None) -> np.ndarray:
    """drho/dt for one state; convenience wrapper building the model on the fly."""
    if isinstance(rho, DensityMatrix):
        dims = rho.dims
        rho = rho.matrix
    rho = np.asarray(rho, dtype=complex)
    if dims is None:
        dims = (rho.shape[0],)
    h = hamiltonian if hamiltonian is not None else np.zeros_like(rho)
    model = MmeModel(h, theta, lindblad)
    return _PreparedModel(model, dims).rhs(rho)


# ---------------------------------------------------------------------------
# probes


class Probe:
    """Named scalar observables extracted along a trajectory."""

    names: tuple[str, ...] = ()

    def prepare(self, dims) -> None:  # pragma: no cover - default no-op
        pass

    def __call__(self, rho: np.ndarray) -> tuple[float, ...]:
        raise NotImplementedError


class PurityProbe(Probe):
    names = ("purity",)

    def __call__(self, rho):
        return (float(np.trace(rho @ rho).real),)


class TauProbe(Probe):
    def __init__(self, cfg: EntanglementConfig = EntanglementConfig(), name: str = "tau"):
        self.cfg = cfg
        self.names = (name,)

    def prepare(self, dims):
        self._corr = PairCorrelator(dims, self.cfg)

    def __call__(self, rho):
        return (self._corr.tau(rho),)


class ExpectationProbe(Probe):
    def __init__(self, name: str, operator: np.ndarray):
        self.names = (name,)
        self.op = np.asarray(operator, dtype=complex)

    def __call__(self, rho):
        return (float(np.trace(self.op @ rho).real),)


class FreeEnergyProbe(Probe):
    """<H> - entropy/beta along the run (requires beta > 0)."""

    def __init__(self, hamiltonian: np.ndarray, thermal: ThermalConfig, name: str = "UH"):
        if thermal.beta <= 0:
            raise ValueError("free-energy probe needs beta > 0")
        self.names = (name,)
        self.h = np.asarray(hamiltonian, dtype=complex)
        self.thermal = thermal

    def __call__(self, rho):
        e = float(np.trace(self.h @ rho).real)
        return (e - entropy(rho, self.thermal.log_floor) / self.thermal.beta,)


class BlochVectorProbe(Probe):
    """Single-qubit Bloch vector <sigma> of one subsystem (norm <= 1)."""

    def __init__(self, subsystem: int, prefix: str):
        self.subsystem = subsystem
        self.names = (f"{prefix}x", f"{prefix}y", f"{prefix}z")

    def prepare(self, dims):
        if dims[self.subsystem] != 2:
            raise ValueError("Bloch vector probe requires a qubit subsystem")
        self._dims = dims

    def __call__(self, rho):
        r = partial_trace(rho, self._dims, (self.subsystem,))
        return (
            float(np.trace(SIGMA_X @ r).real),
            float(np.trace(SIGMA_Y @ r).real),
            float(np.trace(SIGMA_Z @ r).real),
        )


class BlochSingularValueProbe(Probe):
    """Singular values of the full Bloch matrix, descending."""

    def __init__(self, prefix: str = "sv"):
        self.prefix = prefix

    def prepare(self, dims):
        if len(dims) != 2:
            raise ValueError("Bloch-matrix probe needs a bipartite state")
        self._basis = FactorizedBasis(*dims)
        n = min(dims[0] ** 2, dims[1] ** 2)
        self.names = tuple(f"{self.prefix}{i + 1}" for i in range(n))

    def __call__(self, rho):
        sv = bloch_singular_values(project_bloch(rho, self._basis))
        return tuple(float(s) for s in sv)


class SchmidtProbe(Probe):
    """Sorted Schmidt coefficients of a (near-)pure bipartite state.

    Extracted as square roots of the descending eigenvalues of the first
    marginal; meaningful only while the state stays pure.
    """

    def __init__(self, prefix: str = "q"):
        self.prefix = prefix

    def prepare(self, dims):
        if len(dims) != 2:
            raise ValueError("Schmidt probe needs a bipartite state")
        self._dims = dims
        n = min(dims)
        self.names = tuple(f"{self.prefix}{i + 1}" for i in range(n))

    def __call__(self, rho):
        marg = partial_trace(rho, self._dims, (0,))
        ev = np.linalg.eigvalsh(marg)[::-1][: min(self._dims)]
        return tuple(float(np.sqrt(max(x, 0.0))) for x in ev)


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Diagnostics:
    max_trace_dev: float = 0.0
    max_herm_defect: float = 0.0
    min_eigenvalue: float = np.inf
    n_accepted_steps: int = 0


@dataclass
class Trajectory:
    """Sampled observables (and optionally states) along one integration."""

    times: np.ndarray
    columns: dict[str, np.ndarray]
    states: list | None = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def column_names(self) -> list[str]:
        return list(self.columns)

    def rows(self):
        cols = list(self.columns.values())
        for i, t in enumerate(self.times):
            yield (t, *(c[i] for c in cols))


def integrate(
    rho0: DensityMatrix,
    model: MmeModel,
    t_end: float,
    *,
    n_samples: int = 200,
    t_start: float = 0.0,
    rtol: float = 1e-7,
    atol: float = 1e-9,
    max_step: float = np.inf,
    trace_tol: float = 1e-9,
    positivity_tol: float = 1e-8,
    probes=(),
    store_states: bool = False,
    method: str = "dopri45",
    rk4_substeps: int = 20,
    step_observer=None,
) -> Trajectory:
    """Integrate the master equation and record probes on a uniform grid.

    There is no renormalization: |Tr rho - 1| is checked after every accepted
    step and the smallest eigenvalue at every sample time; crossing
    ``trace_tol`` or ``positivity_tol`` raises :class:`NumericalFailure`.
    """
    if t_end <= t_start:
        raise ValueError("t_end must exceed t_start")
    prepared = _PreparedModel(model, rho0.dims)
    d = rho0.dim
    for p in probes:
        p.prepare(rho0.dims)

    diag = Diagnostics()

    def monitor(t, y):
        rho = y.reshape(d, d)
        dev = abs(np.trace(rho).real - 1.0)
        diag.max_trace_dev = max(diag.max_trace_dev, dev)
        diag.n_accepted_steps += 1
        if dev > trace_tol:
            raise NumericalFailure(
                f"trace deviation {dev:.3e} exceeded tolerance {trace_tol:.1e}", t
            )
        if step_observer is not None:
            step_observer(t, rho)

    def f(t, y):
        return prepared.rhs(y.reshape(d, d)).reshape(-1)

    ts = np.linspace(t_start, t_end, n_samples + 1)
    if method == "dopri45":
        ys = solve_dopri(
            f, rho0.matrix.reshape(-1), ts,
            rtol=rtol, atol=atol, max_step=max_step, step_observer=monitor,
        )
    elif method == "rk4":
        ys = solve_rk4(f, rho0.matrix.reshape(-1), ts, substeps=rk4_substeps, step_observer=monitor)
    else:
        raise ValueError(f"unknown method {method!r}")

    columns: dict[str, list[float]] = {}
    states = [] if store_states else None
    for i, t in enumerate(ts):
        rho = ys[i].reshape(d, d)
        defect = float(np.linalg.norm(rho - rho.conj().T))
        lo = float(np.linalg.eigvalsh(rho)[0])
        diag.max_herm_defect = max(diag.max_herm_defect, defect)
        diag.min_eigenvalue = min(diag.min_eigenvalue, lo)
        if lo < -positivity_tol:
            raise NumericalFailure(
                f"positivity violation: min eigenvalue {lo:.3e} < -{positivity_tol:.1e}", float(t)
            )
        if states is not None:
            states.append(rho.copy())
        for p in probes:
            for name, value in zip(p.names, p(rho)):
                columns.setdefault(name, []).append(value)

    return Trajectory(
        times=ts,
        columns={k: np.array(v) for k, v in columns.items()},
        states=states,
        diagnostics=diag,
    )


def bloch_matrix_rhs(rho, model: MmeModel, basis: FactorizedBasis) -> np.ndarray:
    """Time derivative of every Bloch-matrix entry: Tr((drho/dt) G[a, b])."""
    if isinstance(rho, DensityMatrix):
        dims = rho.dims
        rho = rho.matrix
    else:
        dims = (basis.d_a, basis.d_b)
    drho = _PreparedModel(model, dims).rhs(np.asarray(rho, dtype=complex))
    return project_bloch(drho, basis)
