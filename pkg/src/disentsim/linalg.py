"""Dense complex linear algebra for Hermitian operators on small Hilbert spaces.

Everything here works on plain ``numpy`` arrays; the two thin wrapper classes
(:class:`HermitianOperator`, :class:`DensityMatrix`) exist to validate physical
invariants at construction time and to carry the subsystem factorization along
with the matrix.  hbar = 1 throughout; dimensions in this package stay small
(<= 16), so dense storage is always used.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-10
POSITIVITY_ATOL = 1e-10

# kron is part of this module's contract; numpy's implementation is exactly it.
kron = np.kron


def hermiticity_defect(m: np.ndarray) -> float:
    """Frobenius norm of the anti-Hermitian part of ``m``."""
    return float(np.linalg.norm(m - m.conj().T))


def check_hermitian(m: np.ndarray, atol: float = HERMITICITY_ATOL, what: str = "matrix") -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > atol:
        raise ValueError(f"{what} is not Hermitian (defect {defect:.3e} > {atol:.1e})")


@dataclass(frozen=True)
class HermitianOperator:
    """A validated Hermitian matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        check_hermitian(m, what="operator")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one positive-semidefinite matrix with a declared subsystem split.

    ``dims`` lists the subsystem dimensions in tensor-product order, e.g.
    ``(2, 2)`` for two qubits or ``(3, 4)`` for a qutrit paired with a
    four-level system.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray
    # validation tolerances; loosened only by integration diagnostics code
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "dims", dims)
        if any(d < 1 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 1, got {dims}")
        d_total = int(np.prod(dims))
        if m.shape != (d_total, d_total):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if self._validate:
            check_hermitian(m, what="density matrix")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_ATOL:
                raise ValueError(f"trace {tr!r} deviates from 1 beyond {TRACE_ATOL:.1e}")
            lo = float(np.linalg.eigvalsh(m)[0])
            if lo < -POSITIVITY_ATOL:
                raise ValueError(f"smallest eigenvalue {lo:.3e} below -{POSITIVITY_ATOL:.1e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def partial_trace(self, keep) -> "DensityMatrix":
        keep = _as_index_tuple(keep, self.n_subsystems)
        reduced = partial_trace(self.matrix, self.dims, keep)
        return DensityMatrix(tuple(self.dims[i] for i in keep), reduced)

    @staticmethod
    def pure(psi: np.ndarray, dims) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return DensityMatrix(tuple(dims), np.outer(psi, psi.conj()))

    @staticmethod
    def product(factors) -> "DensityMatrix":
        dims = []
        m = np.array([[1.0 + 0j]])
        for f in factors:
            fm = f.matrix if isinstance(f, DensityMatrix) else np.asarray(f, dtype=complex)
            dims.append(fm.shape[0])
            m = np.kron(m, fm)
        return DensityMatrix(tuple(dims), m)

    @staticmethod
    def maximally_mixed(dims) -> "DensityMatrix":
        d = int(np.prod(dims))
        return DensityMatrix(tuple(dims), np.eye(d) / d)


def _as_index_tuple(keep, n: int) -> tuple[int, ...]:
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(int(k) for k in keep)
    if len(keep) == 0:
        raise ValueError("must keep at least one subsystem")
    if len(set(keep)) != len(keep):
        raise ValueError(f"repeated subsystem in selector {keep}")
    for k in keep:
        if not 0 <= k < n:
            raise ValueError(f"unknown subsystem index {k} (have {n} subsystems)")
    return keep


def partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``keep`` gives subsystem indices into ``dims``; the result is ordered as in
    ``keep``, which also provides subsystem permutation (e.g. ``keep=(1, 0)``
    swaps the factors).
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = _as_index_tuple(keep, n)
    rho = np.asarray(rho)
    t = rho.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    for count, i in enumerate(sorted(drop)):
        ax = i - count  # axes shift as earlier ones are contracted away
        t = np.trace(t, axis1=ax, axis2=ax + (n - count))
    # remaining axes are ordered by increasing original index; permute to `keep`
    order = sorted(keep)
    perm = [order.index(k) for k in keep]
    nk = len(keep)
    t = t.transpose(tuple(perm) + tuple(nk + p for p in perm))
    d_out = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d_out, d_out)


def permute_subsystems(op: np.ndarray, dims, perm) -> np.ndarray:
    """Reorder tensor factors of a square operator: new position i holds old subsystem perm[i]."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"invalid permutation {perm}")
    t = np.asarray(op).reshape(dims + dims)
    t = t.transpose(perm + tuple(n + p for p in perm))
    d = int(np.prod(dims))
    return t.reshape(d, d)


def embed_pair_operator(op_pair: np.ndarray, dims, pair) -> np.ndarray:
    """Embed an operator acting on two subsystems into the full space.

    The operator is given on ``dims[pair[0]] * dims[pair[1]]`` (in that order)
    and is tensored with the identity on every other subsystem.
    """
    dims = tuple(int(d) for d in dims)
    i, j = _as_index_tuple(pair, len(dims))
    rest = [k for k in range(len(dims)) if k not in (i, j)]
    d_rest = int(np.prod([dims[k] for k in rest], initial=1))
    full = np.kron(op_pair, np.eye(d_rest))
    # current factor order: (i, j, *rest); build permutation back to 0..n-1
    current = [i, j] + rest
    perm = [current.index(k) for k in range(len(dims))]
    return permute_subsystems(full, tuple(dims[k] for k in current), perm)


def eigh_clamped_log(a: np.ndarray, floor: float) -> np.ndarray:
    ev, vec = np.linalg.eigh(a)
    ev = np.maximum(ev, floor)
    return (vec * np.log(ev)) @ vec.conj().T


def matrix_log_clamped(a, floor: float = 1e-12) -> np.ndarray:
    """Hermitian matrix logarithm with eigenvalues clamped from below.

    Eigenvalues smaller than ``floor`` are replaced by ``floor`` before taking
    the log, which keeps the result finite on (numerically) rank-deficient
    positive-semidefinite input.  Raises if the input is not Hermitian PSD
    within tolerance.
    """
    if floor <= 0:
        raise ValueError("floor must be positive")
    m = a.matrix if isinstance(a, HermitianOperator) else np.asarray(a, dtype=complex)
    check_hermitian(m, atol=1e-10, what="matrix_log_clamped input")
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < -POSITIVITY_ATOL:
        raise ValueError(f"input not PSD within tolerance (min eigenvalue {lo:.3e})")
    return eigh_clamped_log(m, floor)


def matrix_exp_hermitian(a: np.ndarray) -> np.ndarray:
    ev, vec = np.linalg.eigh(a)
    return (vec * np.exp(ev)) @ vec.conj().T


def random_pure_state(rng: np.random.Generator, dims) -> DensityMatrix:
    d = int(np.prod(dims))
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return DensityMatrix.pure(psi, dims)


def random_mixed_state(rng: np.random.Generator, dims, rank: int | None = None) -> DensityMatrix:
    """Full-rank (or given-rank) random mixed state, Wishart construction."""
    d = int(np.prod(dims))
    r = d if rank is None else int(rank)
    a = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = a @ a.conj().T
    m /= np.trace(m).real
    return DensityMatrix(tuple(dims), m)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))
