"""Nonlinear generators: the disentanglement operator, its expectation value
(the entanglement variable tau), and the thermalisation generator built from
the free-energy operator.

The connected-correlation observable used throughout is

    C(O_a, O_b) = O_a (x) O_b (x) I_spectators - <O_a><O_b> * I,

whose expectation is the connected correlator <O_a O_b> - <O_a><O_b>.  Summing
``<C> C`` over all pairs of subsystem generators, weighted by ``eta``, gives
the disentanglement generator; its expectation value ``tau`` vanishes exactly
on product states and reaches 1 (with the default ``eta``) on maximally
entangled pure bipartite states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gellmann import FactorizedBasis
from .linalg import (
    DensityMatrix,
    HermitianOperator,
    embed_pair_operator,
    matrix_exp_hermitian,
    matrix_log_clamped,
    partial_trace,
)


def default_eta(d_a: int, d_b: int) -> float:
    """Weight normalizing tau to [0, 1]: d_m^2 / (4 (d_m^2 - 1)), d_m = min(d_a, d_b)."""
    d_m = min(int(d_a), int(d_b))
    return d_m * d_m / (4.0 * (d_m * d_m - 1.0))


@dataclass(frozen=True)
class EntanglementConfig:
    """Which subsystem pair to disentangle, and with what weight."""

    pair: tuple[int, int] = (0, 1)
    eta: float | None = None

    def eta_for(self, dims) -> float:
        if self.eta is not None:
            return float(self.eta)
        i, j = self.pair
        return default_eta(dims[i], dims[j])


@dataclass(frozen=True)
class ThermalConfig:
    """Inverse thermal energy and the eigenvalue floor used for log(rho)."""

    beta: float
    log_floor: float = 1e-12

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


def _embed_single(op: np.ndarray, dims, index: int) -> np.ndarray:
    full = np.array([[1.0 + 0j]])
    for k, d in enumerate(dims):
        full = np.kron(full, op if k == index else np.eye(d))
    return full


def c_operator(o_a, o_b, rho: DensityMatrix, pair=(0, 1)) -> np.ndarray:
    """Connected-correlation observable for two single-subsystem operators."""
    o_a = o_a.matrix if isinstance(o_a, HermitianOperator) else np.asarray(o_a, dtype=complex)
    o_b = o_b.matrix if isinstance(o_b, HermitianOperator) else np.asarray(o_b, dtype=complex)
    i, j = pair
    dims = rho.dims
    if o_a.shape[0] != dims[i] or o_b.shape[0] != dims[j]:
        raise ValueError(
            f"operator dims ({o_a.shape[0]}, {o_b.shape[0]}) do not match subsystems {pair} of {dims}"
        )
    joint = embed_pair_operator(np.kron(o_a, o_b), dims, pair)
    mean_a = np.trace(_embed_single(o_a, dims, i) @ rho.matrix).real
    mean_b = np.trace(_embed_single(o_b, dims, j) @ rho.matrix).real
    return joint - mean_a * mean_b * np.eye(rho.dim)


class PairCorrelator:
    """Connected generator correlations of one subsystem pair, computed once per state.

    Precomputes the stacked Gell-Mann generators of the pair so that the
    correlation matrix, tau, and the disentanglement generator come out of a
    handful of einsum contractions instead of a loop over operator products.
    """

    def __init__(self, dims, cfg: EntanglementConfig = EntanglementConfig()):
        self.dims = tuple(int(d) for d in dims)
        self.pair = cfg.pair
        i, j = self.pair
        self.d_a = self.dims[i]
        self.d_b = self.dims[j]
        self.eta = cfg.eta_for(self.dims)
        self.basis = FactorizedBasis(self.d_a, self.d_b)
        self._bipartite = len(self.dims) == 2 and self.pair == (0, 1)
        self._eye = np.eye(int(np.prod(self.dims)))

    def _pair_matrix(self, rho: np.ndarray) -> np.ndarray:
        if self._bipartite:
            return rho
        return partial_trace(rho, self.dims, self.pair)

    def connected(self, rho: np.ndarray) -> np.ndarray:
        """Matrix of <C(l_a, l_b)> over generator pairs, shape (d_a^2-1, d_b^2-1)."""
        corr, prod = self._corr_parts(rho)
        return corr - prod

    def _corr_parts(self, rho: np.ndarray):
        la = self.basis.basis_a.generators
        lb = self.basis.basis_b.generators
        r4 = self._pair_matrix(rho).reshape(self.d_a, self.d_b, self.d_a, self.d_b)
        corr = np.einsum("aji,blk,ikjl->ab", la, lb, r4).real
        rho_a = np.einsum("ikjk->ij", r4)
        rho_b = np.einsum("kikj->ij", r4)
        mean_a = np.einsum("aji,ij->a", la, rho_a).real
        mean_b = np.einsum("bji,ij->b", lb, rho_b).real
        return corr, np.outer(mean_a, mean_b)

    def tau(self, rho: np.ndarray) -> float:
        c = self.connected(rho)
        return float(self.eta * np.sum(c * c))

    def q_operator(self, rho: np.ndarray) -> np.ndarray:
        """eta * sum_ab <C_ab> C_ab on the full space."""
        corr, prod = self._corr_parts(rho)
        c = corr - prod
        la = self.basis.basis_a.generators
        lb = self.basis.basis_b.generators
        op_pair = np.einsum("ab,aij,bkl->ikjl", c, la, lb).reshape(
            self.d_a * self.d_b, self.d_a * self.d_b
        )
        if not self._bipartite:
            op_pair_full = embed_pair_operator(op_pair, self.dims, self.pair)
        else:
            op_pair_full = op_pair
        scalar = float(np.sum(c * prod))
        return self.eta * (op_pair_full - scalar * self._eye)


def q_disentangle(rho: DensityMatrix, cfg: EntanglementConfig = EntanglementConfig()) -> np.ndarray:
    return PairCorrelator(rho.dims, cfg).q_operator(rho.matrix)


def tau(rho: DensityMatrix, cfg: EntanglementConfig = EntanglementConfig()) -> float:
    return PairCorrelator(rho.dims, cfg).tau(rho.matrix)


def q_thermal(rho, hamiltonian: np.ndarray, cfg: ThermalConfig) -> np.ndarray:
    """beta * H + log(rho), the free-energy generator (log clamped at cfg.log_floor)."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return cfg.beta * np.asarray(hamiltonian, dtype=complex) + matrix_log_clamped(m, cfg.log_floor)


def thermal_state(hamiltonian: np.ndarray, beta: float, dims=None) -> DensityMatrix:
    """Gibbs state exp(-beta H) / Z."""
    h = np.asarray(hamiltonian, dtype=complex)
    # shift by the minimum eigenvalue so the exponential never overflows
    ev = np.linalg.eigvalsh(h)
    m = matrix_exp_hermitian(-beta * (h - ev[0] * np.eye(h.shape[0])))
    m /= np.trace(m).real
    if dims is None:
        dims = (h.shape[0],)
    return DensityMatrix(tuple(dims), m)


def entropy(rho, log_floor: float = 1e-12) -> float:
    """von Neumann entropy <-log rho> with the same eigenvalue clamp as q_thermal."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    ev = np.maximum(np.linalg.eigvalsh(m), log_floor)
    return float(-np.sum(ev * np.log(ev)))


def free_energy(rho, hamiltonian: np.ndarray, beta: float, log_floor: float = 1e-12) -> float:
    """<H> - entropy / beta, minimized by the Gibbs state of H at the same beta."""
    if beta <= 0:
        raise ValueError("free energy needs beta > 0")
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    energy = float(np.trace(np.asarray(hamiltonian) @ m).real)
    return energy - entropy(m, log_floor) / beta
