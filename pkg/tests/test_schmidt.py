import numpy as np
import pytest

from disentsim.engine import MmeModel, SchmidtProbe, ThetaSpec, integrate
from disentsim.linalg import DensityMatrix
from disentsim.observables import default_eta
from disentsim.schmidt import (
    SchmidtModel,
    capitalistic,
    growth_prefactor,
    integrate_schmidt,
    moments,
    potential,
    potential_gradient,
    schmidt_rhs,
    validate_state,
)


def random_schmidt(rng, d, low=0.1):
    q = rng.uniform(low, 1.0, d)
    return q / np.linalg.norm(q)


class TestMoments:
    def test_uniform(self):
        q = np.full(4, 0.5)
        assert abs(moments(q, 2) - 1.0) < 1e-14
        assert abs(moments(q, 6) - 4 * 0.5**6) < 1e-14

    def test_product_state(self):
        q = np.array([1.0, 0.0, 0.0])
        for n in (1, 2, 5, 6):
            assert moments(q, n) == 1.0

    def test_bad_order(self):
        with pytest.raises(ValueError):
            moments(np.array([1.0, 0.0]), 0)


class TestCapitalistic:
    def test_uniform_is_fixed_point(self):
        q = np.full(5, 5**-0.5)
        for l in range(5):
            assert abs(capitalistic(q, l, 3)) < 1e-14

    def test_product_state(self):
        q = np.array([1.0, 0.0])
        assert abs(capitalistic(q, 0, 3)) < 1e-15

    def test_weighted_sum_vanishes(self):
        # sum_l q_l^2 K_l = L_{2m} - L_2 L_{2m} = 0 on the unit sphere
        rng = np.random.default_rng(70)
        for m in (2, 3):
            q = random_schmidt(rng, 7)
            total = sum(q[l] ** 2 * capitalistic(q, l, m) for l in range(7))
            assert abs(total) < 1e-14

    def test_index_range(self):
        with pytest.raises(IndexError):
            capitalistic(np.array([1.0, 0.0]), 5, 3)


class TestRhs:
    def test_uniform_stationary(self):
        q = np.full(6, 6**-0.5)
        assert np.linalg.norm(schmidt_rhs(q, SchmidtModel(1.0))) < 1e-14

    def test_product_stationary(self):
        q = np.zeros(4)
        q[2] = 1.0
        assert np.linalg.norm(schmidt_rhs(q, SchmidtModel(1.0))) < 1e-15

    def test_prefactor_rule(self):
        assert growth_prefactor(2) == 12.0
        assert growth_prefactor(3) == 4.0
        assert growth_prefactor(10) == 4.0

    def test_norm_preserved_to_first_order(self):
        rng = np.random.default_rng(71)
        q = random_schmidt(rng, 5)
        dq = schmidt_rhs(q, SchmidtModel(1.3))
        assert abs(2 * np.sum(q * dq)) < 1e-13

    def test_model_validation(self):
        with pytest.raises(ValueError):
            SchmidtModel(0.0)
        with pytest.raises(ValueError):
            SchmidtModel(1.0, m=4)
        with pytest.raises(ValueError):
            validate_state(np.array([0.8, 0.7]))


class TestPotential:
    def test_normalized_value(self):
        rng = np.random.default_rng(72)
        q = random_schmidt(rng, 6)
        for m in (2, 3):
            assert abs(potential(q, m) - moments(q, 2 * m) / (2 * m)) < 1e-14

    def test_gradient_matches_finite_difference(self):
        rng = np.random.default_rng(73)
        q = random_schmidt(rng, 6)
        for m in (2, 3):
            grad = potential_gradient(q, m)
            step = 1e-6
            for l in range(6):
                e = np.zeros(6)
                e[l] = step
                fd = (potential(q + e, m) - potential(q - e, m)) / (2 * step)
                assert abs(fd - grad[l]) < 1e-6

    def test_gradient_is_q_times_capitalistic_on_sphere(self):
        rng = np.random.default_rng(74)
        q = random_schmidt(rng, 5)
        for m in (2, 3):
            grad = potential_gradient(q, m)
            expected = np.array([q[l] * capitalistic(q, l, m) for l in range(5)])
            assert np.allclose(grad, expected, atol=1e-13)


class TestIntegration:
    def test_uniform_stays_uniform(self):
        q0 = np.full(5, 5**-0.5)
        ts, qs = integrate_schmidt(q0, SchmidtModel(1.0), 5.0, n_samples=50)
        assert np.max(np.abs(qs - q0)) < 1e-9

    def test_norm_drift(self):
        rng = np.random.default_rng(75)
        q0 = random_schmidt(rng, 8)
        _, qs = integrate_schmidt(q0, SchmidtModel(1.0), 20.0, n_samples=100)
        assert np.max(np.abs(np.sum(qs * qs, axis=1) - 1.0)) < 1e-8

    def test_ratio_law_along_trajectory(self):
        # d log(q_i/q_j)/dt = c * ge * (q_i^{2(m-1)} - q_j^{2(m-1)})
        rng = np.random.default_rng(76)
        ge, d = 1.0, 5
        q0 = random_schmidt(rng, d)
        ts, qs = integrate_schmidt(q0, SchmidtModel(ge), 2.0, n_samples=2000,
                                   rtol=1e-11, atol=1e-13)
        dt = ts[1] - ts[0]
        mid = len(ts) // 2
        q = qs[mid]
        for (i, j) in ((0, 1), (2, 4)):
            log_ratio_prev = np.log(qs[mid - 1][i] / qs[mid - 1][j])
            log_ratio_next = np.log(qs[mid + 1][i] / qs[mid + 1][j])
            fd = (log_ratio_next - log_ratio_prev) / (2 * dt)
            expected = 4.0 * ge * (q[i] ** 4 - q[j] ** 4)
            assert abs(fd - expected) < 1e-5

    def test_order_preservation_and_convergence(self):
        rng = np.random.default_rng(77)
        for d in (2, 5, 10):
            for _ in range(17 if d > 2 else 16):
                q0 = random_schmidt(rng, d)
                winner = int(np.argmax(q0))
                ts, qs = integrate_schmidt(q0, SchmidtModel(1.0), 40.0, n_samples=80)
                assert all(int(np.argmax(row)) == winner for row in qs)
                assert qs[-1][winner] > 1.0 - 1e-6

    def test_l2m_monotone(self):
        rng = np.random.default_rng(78)
        for m in (2, 3):
            q0 = random_schmidt(rng, 6)
            _, qs = integrate_schmidt(q0, SchmidtModel(1.0, m=m), 10.0, n_samples=200)
            l2m = np.sum(qs ** (2 * m), axis=1)
            assert np.all(np.diff(l2m) > -1e-10)


class TestFullEquationOracle:
    def test_qutrit_pair_matches_full_master_equation(self):
        # embed q into a pure two-qutrit state and evolve the density matrix
        rng = np.random.default_rng(79)
        d = 3
        q0 = np.array([0.25, 0.55, 0.8])
        q0 /= np.linalg.norm(q0)
        gamma_d = 1.0
        eta = default_eta(d, d)
        psi = np.zeros(d * d)
        psi[[l * d + l for l in range(d)]] = q0
        rho0 = DensityMatrix.pure(psi, (d, d))
        model = MmeModel(np.zeros((9, 9)), ThetaSpec(gamma_D=gamma_d))
        t_end = 5.0 / (gamma_d * eta)
        probe = SchmidtProbe()
        # the density-matrix run must hold its purity drift below the square of
        # the coefficient tolerance: mixedness eps floors the marginal's small
        # eigenvalues, and the extraction takes their square roots
        traj = integrate(rho0, model, t_end, n_samples=60,
                         rtol=1e-12, atol=1e-16, probes=[probe])
        ts, qs = integrate_schmidt(np.sort(q0)[::-1], SchmidtModel(gamma_d * eta), t_end,
                                   n_samples=60, rtol=1e-12, atol=1e-16)
        full = np.column_stack([traj.columns[n] for n in probe.names])
        assert np.max(np.abs(full - qs)) < 1e-5
