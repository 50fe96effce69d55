import numpy as np
import pytest

from disentsim.gellmann import (
    FactorizedBasis,
    GellMannBasis,
    bloch_matrix,
    correlation_matrix_D,
    gellmann_matrices,
    is_product,
    reconstruct_density,
)
from disentsim.linalg import DensityMatrix, random_mixed_state, random_unitary

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

BELL = DensityMatrix.pure([0.0, 1.0, -1.0, 0.0], (2, 2))


def orthogonality_table(gens):
    n = len(gens)
    return np.array([[np.trace(gens[i] @ gens[j]).real / 2 for j in range(n)] for i in range(n)])


class TestGenerators:
    def test_d2_is_pauli(self):
        gens = gellmann_matrices(2)
        assert np.allclose(gens[0], PAULI["x"])
        assert np.allclose(gens[1], PAULI["y"])
        assert np.allclose(gens[2], PAULI["z"])

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_counting_tracelessness_orthogonality(self, d):
        gens = gellmann_matrices(d)
        assert len(gens) == d * d - 1
        for g in gens:
            assert abs(np.trace(g)) < 1e-12
            assert np.linalg.norm(g - g.conj().T) < 1e-14
        assert np.allclose(orthogonality_table(gens), np.eye(d * d - 1), atol=1e-12)

    def test_small_dim_rejected(self):
        with pytest.raises(ValueError):
            gellmann_matrices(1)

    @pytest.mark.parametrize("d", [2, 3])
    def test_transfer_matrix_orthogonal(self, d):
        rng = np.random.default_rng(21)
        basis = GellMannBasis(d)
        for _ in range(10):
            t = basis.transfer_matrix(random_unitary(rng, d))
            assert np.linalg.norm(t.T @ t - np.eye(d * d - 1)) < 1e-9


class TestFactorizedBasis:
    @pytest.mark.parametrize("da,db", [(2, 2), (2, 3), (3, 4)])
    def test_set_orthogonality(self, da, db):
        fb = FactorizedBasis(da, db)
        elements = list(fb.elements())
        assert len(elements) == (da * db) ** 2 - 1
        mats = [m for _, _, m in elements]
        for m in mats:
            assert abs(np.trace(m)) < 1e-12
        table = orthogonality_table(mats)
        assert np.allclose(table, np.eye(len(mats)), atol=1e-12)

    def test_g00_expectation_is_fixed(self):
        rng = np.random.default_rng(22)
        fb = FactorizedBasis(2, 3)
        for _ in range(5):
            rho = random_mixed_state(rng, (2, 3))
            bm = bloch_matrix(rho, fb)
            assert abs(bm[0, 0] - np.sqrt(2.0 / 6.0)) < 1e-12


class TestBlochMatrix:
    def test_maximally_mixed(self):
        fb = FactorizedBasis(2, 2)
        bm = bloch_matrix(DensityMatrix.maximally_mixed((2, 2)), fb)
        expected = np.zeros((4, 4))
        expected[0, 0] = np.sqrt(2.0) / 2.0
        assert np.allclose(bm, expected, atol=1e-14)

    @pytest.mark.parametrize("da,db", [(2, 2), (2, 3), (3, 4)])
    def test_roundtrip(self, da, db):
        rng = np.random.default_rng(23)
        fb = FactorizedBasis(da, db)
        for _ in range(20):
            rho = random_mixed_state(rng, (da, db))
            back = reconstruct_density(bloch_matrix(rho, fb), fb)
            assert np.linalg.norm(back - rho.matrix) < 1e-10

    def test_bell_diagonal_correlations(self):
        # oracle: direct expectation of sigma_i x sigma_i in the singlet
        fb = FactorizedBasis(2, 2)
        bm = bloch_matrix(BELL, fb)
        # generators beyond index 0 carry 2**-0.25 weights on each factor
        w = (2 ** -0.25) ** 2
        for i, axis in enumerate(("x", "y", "z")):
            op = np.kron(PAULI[axis], PAULI[axis])
            direct = np.trace(op @ BELL.matrix).real
            assert abs(direct - (-1.0)) < 1e-12
            assert abs(bm[1 + i, 1 + i] - w * direct) < 1e-12

    def test_dims_mismatch_rejected(self):
        fb = FactorizedBasis(2, 2)
        with pytest.raises(ValueError):
            bloch_matrix(DensityMatrix.maximally_mixed((2, 3)), fb)


class TestProductTest:
    def test_product_state(self):
        rng = np.random.default_rng(24)
        fb = FactorizedBasis(2, 3)
        rho = DensityMatrix.product(
            [random_mixed_state(rng, (2,)), random_mixed_state(rng, (3,))]
        )
        verdict, sv = is_product(bloch_matrix(rho, fb), tol=1e-8)
        assert verdict
        assert np.all(np.diff(sv) <= 1e-15)  # descending
        assert np.sum(sv > 1e-8 * sv[0]) == 1

    def test_bell_not_product(self):
        fb = FactorizedBasis(2, 2)
        verdict, sv = is_product(bloch_matrix(BELL, fb), tol=1e-8)
        assert not verdict
        assert sv[1] > 0.1 * sv[0]

    def test_maximally_mixed_is_product(self):
        fb = FactorizedBasis(3, 4)
        verdict, _ = is_product(bloch_matrix(DensityMatrix.maximally_mixed((3, 4)), fb), tol=1e-8)
        assert verdict


class TestCorrelationMatrix:
    def test_product_state_gives_zero(self):
        rng = np.random.default_rng(25)
        rho = DensityMatrix.product(
            [random_mixed_state(rng, (2,)), random_mixed_state(rng, (2,))]
        )
        assert np.linalg.norm(correlation_matrix_D(rho)) < 1e-12

    def test_bell_singlet(self):
        d = correlation_matrix_D(BELL)
        assert np.allclose(d, BELL.matrix - np.eye(4) / 4, atol=1e-12)
        assert abs(np.trace(d)) < 1e-12

    def test_tripartite_spectator_embedding(self):
        rng = np.random.default_rng(26)
        rho_c = random_mixed_state(rng, (2,))
        rho = DensityMatrix((2, 2, 2), np.kron(BELL.matrix, rho_c.matrix))
        d = correlation_matrix_D(rho, pair=(0, 1))
        expected = np.kron(BELL.matrix - np.eye(4) / 4, np.eye(2))
        assert np.allclose(d, expected, atol=1e-12)
        # same pair extracted via direct subtraction on the reduced state
        pair_state = rho.partial_trace((0, 1))
        direct = pair_state.matrix - np.kron(
            pair_state.partial_trace((0,)).matrix, pair_state.partial_trace((1,)).matrix
        )
        assert np.allclose(d, np.kron(direct, np.eye(2)), atol=1e-12)

    def test_tripartite_nontrivial_pairs(self):
        rng = np.random.default_rng(27)
        rho = random_mixed_state(rng, (2, 2, 2))
        for pair in ((1, 2), (2, 0)):
            d = correlation_matrix_D(rho, pair=pair)
            assert abs(np.trace(d)) < 1e-12
            assert np.linalg.norm(d - d.conj().T) < 1e-12

    def test_invalid_pair(self):
        with pytest.raises(ValueError):
            correlation_matrix_D(BELL, pair=(0, 2))
