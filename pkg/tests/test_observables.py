import numpy as np
import pytest

from disentsim.gellmann import gellmann_matrices
from disentsim.linalg import (
    DensityMatrix,
    matrix_log_clamped,
    random_mixed_state,
    random_pure_state,
    random_unitary,
)
from disentsim.observables import (
    EntanglementConfig,
    ThermalConfig,
    c_operator,
    default_eta,
    entropy,
    free_energy,
    q_disentangle,
    q_thermal,
    tau,
    thermal_state,
)

SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)

BELL = DensityMatrix.pure([0.0, 1.0, -1.0, 0.0], (2, 2))


def naive_q_disentangle(rho: DensityMatrix, pair=(0, 1), eta=None):
    """Reference: explicit loop over generator pairs built from c_operator."""
    i, j = pair
    d_a, d_b = rho.dims[i], rho.dims[j]
    if eta is None:
        eta = default_eta(d_a, d_b)
    q = np.zeros((rho.dim, rho.dim), dtype=complex)
    for la in gellmann_matrices(d_a):
        for lb in gellmann_matrices(d_b):
            c = c_operator(la, lb, rho, pair=pair)
            q += np.trace(c @ rho.matrix).real * c
    return eta * q


class TestCOperator:
    def test_product_state_expectation_zero(self):
        rng = np.random.default_rng(31)
        rho = DensityMatrix.product(
            [random_mixed_state(rng, (2,)), random_mixed_state(rng, (2,))]
        )
        for oa, ob in ((SZ, SZ), (SX, SY), (SY, SZ)):
            c = c_operator(oa, ob, rho)
            assert abs(np.trace(c @ rho.matrix).real) < 1e-12

    def test_bell_zz(self):
        c = c_operator(SZ, SZ, BELL)
        # oracle: direct 4x4 expectations
        zz = np.kron(SZ, SZ)
        expected = np.trace(zz @ BELL.matrix).real - (
            np.trace(np.kron(SZ, np.eye(2)) @ BELL.matrix).real
            * np.trace(np.kron(np.eye(2), SZ) @ BELL.matrix).real
        )
        assert abs(expected - (-1.0)) < 1e-12
        assert abs(np.trace(c @ BELL.matrix).real - expected) < 1e-12

    def test_maximally_mixed(self):
        rho = DensityMatrix.maximally_mixed((2, 2))
        c = c_operator(SX, SY, rho)
        assert abs(np.trace(c @ rho.matrix)) < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            c_operator(np.eye(3), SZ, BELL)

    def test_tripartite_spectator(self):
        rng = np.random.default_rng(32)
        rho = random_mixed_state(rng, (2, 2, 2))
        c = c_operator(SX, SZ, rho, pair=(0, 2))
        assert np.linalg.norm(c - c.conj().T) < 1e-12
        assert c.shape == (8, 8)


class TestQDisentangle:
    def test_matches_naive_sum(self):
        rng = np.random.default_rng(33)
        for dims in ((2, 2), (2, 3), (3, 3)):
            rho = random_mixed_state(rng, dims)
            fast = q_disentangle(rho)
            assert np.linalg.norm(fast - naive_q_disentangle(rho)) < 1e-12

    def test_product_state_zero(self):
        rng = np.random.default_rng(34)
        rho = DensityMatrix.product(
            [random_mixed_state(rng, (2,)), random_mixed_state(rng, (3,))]
        )
        assert np.linalg.norm(q_disentangle(rho)) < 1e-12
        assert tau(rho) < 1e-15

    def test_bell_saturates_bound(self):
        q = q_disentangle(BELL)
        assert abs(np.trace(q @ BELL.matrix).real - 1.0) < 1e-12
        assert abs(tau(BELL) - 1.0) < 1e-12

    def test_expectation_equals_tau(self):
        rng = np.random.default_rng(35)
        for dims in ((2, 2), (2, 3)):
            rho = random_mixed_state(rng, dims)
            q = q_disentangle(rho)
            assert abs(np.trace(q @ rho.matrix).real - tau(rho)) < 1e-12

    def test_truncated_state_closed_form(self):
        # central-block two-spin state with Bloch vector mu * n
        rng = np.random.default_rng(36)
        for _ in range(5):
            k = rng.normal(size=3)
            k *= rng.uniform(0.1, 0.99) / np.linalg.norm(k)
            mu = np.linalg.norm(k)
            nz = k[2] / mu
            block = 0.5 * (np.eye(2) + k[0] * SX + k[1] * SY + k[2] * SZ)
            m = np.zeros((4, 4), dtype=complex)
            m[1:3, 1:3] = block
            rho = DensityMatrix((2, 2), m)
            closed = (1 + 2 * mu**2 + mu**2 * nz**2 * (mu**2 * nz**2 - 4)) / 3
            assert abs(tau(rho) - closed) < 1e-12
            assert abs(np.trace(q_disentangle(rho) @ rho.matrix).real - closed) < 1e-12

    def test_tripartite_pair_equals_bipartite(self):
        # pair (0, 1) of a product-with-spectator state reduces to the bipartite value
        rng = np.random.default_rng(37)
        pair_state = random_mixed_state(rng, (2, 2))
        spect = random_mixed_state(rng, (2,))
        rho3 = DensityMatrix((2, 2, 2), np.kron(pair_state.matrix, spect.matrix))
        assert abs(tau(rho3, EntanglementConfig(pair=(0, 1))) - tau(pair_state)) < 1e-12
        q3 = q_disentangle(rho3, EntanglementConfig(pair=(0, 1)))
        q2 = q_disentangle(pair_state)
        assert np.linalg.norm(q3 - np.kron(q2, np.eye(2))) < 1e-12


class TestTau:
    def test_two_qubit_closed_form(self):
        rng = np.random.default_rng(38)
        for _ in range(100):
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            psi /= np.linalg.norm(psi)
            rho = DensityMatrix.pure(psi, (2, 2))
            det = psi[0] * psi[3] - psi[1] * psi[2]
            closed = 8 * abs(det) ** 2 * (1 + 2 * abs(det) ** 2) / 3
            assert abs(tau(rho) - closed) < 1e-10

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(39)
        rho = random_mixed_state(rng, (2, 3))
        base = tau(rho)
        for _ in range(25):
            u = np.kron(random_unitary(rng, 2), random_unitary(rng, 3))
            rotated = DensityMatrix((2, 3), u @ rho.matrix @ u.conj().T)
            assert abs(tau(rotated) - base) < 1e-10

    def test_maximum_entropy_state_saturates(self):
        for d in (2, 3, 4):
            q = np.full(d, d ** -0.5)
            psi = np.zeros(d * d)
            psi[[l * d + l for l in range(d)]] = q
            rho = DensityMatrix.pure(psi, (d, d))
            assert abs(tau(rho) - 1.0) < 1e-12

    def test_bounds_on_random_states(self):
        rng = np.random.default_rng(40)
        for dims in ((2, 2), (2, 3), (3, 3)):
            worst = 0.0
            for _ in range(50):
                rho = random_mixed_state(rng, dims)
                t = tau(rho)
                assert t >= 0.0
                worst = max(worst, t)
            assert worst <= 1.0 + 1e-10

    def test_default_eta(self):
        assert abs(default_eta(2, 2) - 1.0 / 3.0) < 1e-15
        assert abs(default_eta(2, 5) - 1.0 / 3.0) < 1e-15
        assert abs(default_eta(3, 4) - 9.0 / 32.0) < 1e-15


class TestThermal:
    def test_thermal_state_beta_zero(self):
        rho = thermal_state(np.diag([0.0, 1.0, 2.0]), 0.0)
        assert np.allclose(rho.matrix, np.eye(3) / 3)

    def test_thermal_state_two_level(self):
        # beta * omega = log 2 puts 2/3 of the population in the ground state
        rho = thermal_state(np.diag([0.0, 1.0]), np.log(2.0))
        assert np.allclose(np.diag(rho.matrix).real, [2 / 3, 1 / 3], atol=1e-14)

    def test_deep_cold_limit_projects(self):
        h = -1.0 * np.outer([0, 1, -1, 0], [0, 1, -1, 0]) / 2  # -P on an entangled vector
        rho = thermal_state(h, 50.0, dims=(2, 2))
        p = np.outer([0, 1, -1, 0], [0, 1, -1, 0]) / 2
        assert np.linalg.norm(rho.matrix - p) < 1e-12

    def test_q_thermal_special_cases(self):
        rho = DensityMatrix.maximally_mixed((2,))
        q = q_thermal(rho, np.zeros((2, 2)), ThermalConfig(beta=1.0))
        assert np.allclose(q, -np.log(2) * np.eye(2), atol=1e-14)
        # beta = 0 leaves only the log term
        rng = np.random.default_rng(41)
        mixed = random_mixed_state(rng, (2, 2))
        q0 = q_thermal(mixed, np.eye(4), ThermalConfig(beta=0.0))
        assert np.allclose(q0, matrix_log_clamped(mixed.matrix), atol=1e-14)

    def test_gibbs_is_constant_generator(self):
        # Q at the Gibbs state is -log(Z) * identity
        rng = np.random.default_rng(42)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (a + a.conj().T) / 2
        beta = 0.7
        rho0 = thermal_state(h, beta)
        q = q_thermal(rho0, h, ThermalConfig(beta=beta))
        off = q - np.trace(q).real / 4 * np.eye(4)
        assert np.linalg.norm(off) < 1e-10

    def test_free_energy_minimized_at_gibbs(self):
        rng = np.random.default_rng(43)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (a + a.conj().T) / 2
        beta = 1.3
        rho0 = thermal_state(h, beta)
        f0 = free_energy(rho0, h, beta)
        eps = 1e-4
        for _ in range(25):
            b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            direction = (b + b.conj().T) / 2
            direction -= np.trace(direction).real / 4 * np.eye(4)
            direction /= np.linalg.norm(direction)
            trial = rho0.matrix + eps * direction
            if np.linalg.eigvalsh(trial)[0] <= 1e-12:
                continue
            f_trial = free_energy(trial, h, beta)
            assert f_trial >= f0 - 1e-8

    def test_entropy_range(self):
        assert abs(entropy(np.eye(2) / 2) - np.log(2)) < 1e-12
        assert entropy(np.diag([1.0, 0.0])) < 1e-10

    def test_beta_validation(self):
        with pytest.raises(ValueError):
            ThermalConfig(beta=-1.0)
        with pytest.raises(ValueError):
            free_energy(np.eye(2) / 2, np.eye(2), beta=0.0)
