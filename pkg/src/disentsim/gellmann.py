"""Generalized Gell-Mann generator sets and the factorized operator basis.

For dimension ``d`` the generalized Gell-Mann set contains the ``d**2 - 1``
traceless Hermitian generators of SU(d), normalized so that
``Tr(l_i l_j) / 2 = delta_ij``; for ``d = 2`` these are the Pauli matrices and
for ``d = 3`` the standard Gell-Mann matrices.

Generator ordering is fixed (and relied on by CSV column layouts):

1. symmetric off-diagonal ``E_jk + E_kj`` for ``j < k`` in lexicographic order,
2. antisymmetric off-diagonal ``-i E_jk + i E_kj``, same index order,
3. diagonal matrices ``sqrt(2/(l(l+1))) * diag(1, ..., 1, -l, 0, ..., 0)``.

For a bipartition ``(d_a, d_b)`` the factorized set consists of the products
``G[a, b] = Gamma_a x Gamma_b`` where ``Gamma_0 = 2**0.25 / sqrt(d) * I`` and
``Gamma_l = 2**-0.25 * lambda_l`` for ``l >= 1``.  Excluding ``G[0, 0]`` these
``(d_a d_b)**2 - 1`` operators are traceless and orthogonal in the same sense,
and together with ``G[0, 0]`` they expand any unit-trace density matrix as
``rho = sum <G[a, b]> G[a, b] / 2``.  The real matrix of expectation values
``<G[a, b]>`` is called the Bloch matrix; it has rank 1 exactly for product
states.
"""

from __future__ import annotations

import numpy as np

from .linalg import DensityMatrix


def gellmann_matrices(d: int) -> np.ndarray:
    """Stack of the ``d**2 - 1`` generalized Gell-Mann matrices, shape (d*d-1, d, d)."""
    if d < 2:
        raise ValueError(f"need dimension >= 2, got {d}")
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = 1.0
            m[k, j] = 1.0
            mats.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1.0j
            m[k, j] = 1.0j
            mats.append(m)
    for l in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[:l, :l] = np.eye(l)
        m[l, l] = -l
        mats.append(np.sqrt(2.0 / (l * (l + 1))) * m)
    out = np.array(mats)
    out.flags.writeable = False
    return out


class GellMannBasis:
    """The SU(d) generator set for one subsystem."""

    def __init__(self, dim: int):
        self.dim = int(dim)
        self.generators = gellmann_matrices(self.dim)

    def __len__(self) -> int:
        return self.generators.shape[0]

    def transfer_matrix(self, u: np.ndarray) -> np.ndarray:
        """Real matrix T of the adjoint action: U l_j U^dag = sum_i T[i, j] l_i.

        For unitary ``u`` the result is orthogonal, which is what makes the
        entanglement variable invariant under single-subsystem unitaries.
        """
        rotated = np.einsum("pq,jqr,sr->jps", u, self.generators, u.conj())
        return np.einsum("ipq,jqp->ij", self.generators, rotated).real / 2.0


class FactorizedBasis:
    """Product operator basis for a bipartition, including the index-0 row/column."""

    def __init__(self, d_a: int, d_b: int):
        self.d_a = int(d_a)
        self.d_b = int(d_b)
        self.basis_a = GellMannBasis(self.d_a)
        self.basis_b = GellMannBasis(self.d_b)
        self.gamma_a = self._gamma_stack(self.basis_a)
        self.gamma_b = self._gamma_stack(self.basis_b)

    @staticmethod
    def _gamma_stack(basis: GellMannBasis) -> np.ndarray:
        d = basis.dim
        g0 = (2.0 ** 0.25 / np.sqrt(d)) * np.eye(d, dtype=complex)
        stack = np.concatenate([g0[None, :, :], 2.0 ** -0.25 * basis.generators])
        stack.flags.writeable = False
        return stack

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b

    @property
    def n_elements(self) -> int:
        """Number of set elements, i.e. excluding the (0, 0) product."""
        return (self.d_a * self.d_b) ** 2 - 1

    def element(self, a: int, b: int) -> np.ndarray:
        return np.kron(self.gamma_a[a], self.gamma_b[b])

    def elements(self):
        """Iterate (a, b, G[a, b]) over the set, skipping (0, 0)."""
        for a in range(self.d_a ** 2):
            for b in range(self.d_b ** 2):
                if a == 0 and b == 0:
                    continue
                yield a, b, self.element(a, b)


def _rho4(rho: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    return np.asarray(rho).reshape(d_a, d_b, d_a, d_b)


def project_bloch(mat: np.ndarray, basis: FactorizedBasis) -> np.ndarray:
    """Entrywise Tr(G[a, b] @ mat) for any matrix on the bipartite space."""
    r4 = _rho4(mat, basis.d_a, basis.d_b)
    return np.einsum("aji,blk,ikjl->ab", basis.gamma_a, basis.gamma_b, r4).real


def bloch_matrix(rho, basis: FactorizedBasis) -> np.ndarray:
    """Real (d_a^2, d_b^2) matrix of expectation values of the factorized basis."""
    if isinstance(rho, DensityMatrix):
        if rho.dims != (basis.d_a, basis.d_b):
            raise ValueError(f"state dims {rho.dims} do not match basis ({basis.d_a}, {basis.d_b})")
        rho = rho.matrix
    elif rho.shape[0] != basis.dim:
        raise ValueError(f"matrix dim {rho.shape[0]} does not match basis dim {basis.dim}")
    return project_bloch(rho, basis)


def reconstruct_density(values: np.ndarray, basis: FactorizedBasis) -> np.ndarray:
    """Invert :func:`bloch_matrix`: rho = sum values[a, b] * G[a, b] / 2."""
    return 0.5 * np.einsum(
        "ab,aij,bkl->ikjl", values, basis.gamma_a, basis.gamma_b
    ).reshape(basis.dim, basis.dim)


def bloch_singular_values(values: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(values), compute_uv=False)


def is_product(values: np.ndarray, tol: float = 1e-8):
    """Rank-1 test of the full Bloch matrix (index-0 row/column included).

    Returns ``(verdict, singular_values)`` with the singular values in
    descending order; the state is declared product when the second singular
    value is below ``tol`` times the first.
    """
    sv = bloch_singular_values(values)
    return bool(sv[1] < tol * sv[0]), sv


def correlation_matrix_D(rho: DensityMatrix, pair=(0, 1)) -> np.ndarray:
    """Difference between a pair's joint state and the product of its marginals.

    Computed on the reduced pair space as ``rho_pair - rho_x (x) rho_y``, then
    tensored with the identity on any spectator subsystem and permuted back to
    the declared subsystem order.  Traceless by construction.
    """
    from .linalg import embed_pair_operator, partial_trace

    i, j = pair
    n = rho.n_subsystems
    if not (0 <= i < n and 0 <= j < n and i != j):
        raise ValueError(f"invalid subsystem pair {pair} for dims {rho.dims}")
    rho_pair = partial_trace(rho.matrix, rho.dims, (i, j))
    rho_i = partial_trace(rho.matrix, rho.dims, (i,))
    rho_j = partial_trace(rho.matrix, rho.dims, (j,))
    d_pair = rho_pair - np.kron(rho_i, rho_j)
    if n == 2 and (i, j) == (0, 1):
        return d_pair
    return embed_pair_operator(d_pair, rho.dims, (i, j))
