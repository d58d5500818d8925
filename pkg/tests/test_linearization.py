import numpy as np
import pytest
from scipy.integrate import solve_ivp

from so3mpc import so3
from so3mpc.linearization import (
    check_transversal_condition,
    discretize,
    gyroscopic_matrix,
    linearize_continuous,
    simulate_transversal,
    transversal_step_bound,
)
from so3mpc.reference import benchmark_reference, spin_reference

from oracles import random_rotation

INERTIA = np.diag([4.250, 4.337, 3.664])


class TestContinuousModel:
    def test_no_gyroscopic_coupling_at_rest(self):
        traj = spin_reference(INERTIA, [0.0, 0.0, 0.0])
        m = linearize_continuous(traj.point(0.0), INERTIA, alpha=1.0)
        assert np.allclose(m.gyro, 0.0, atol=1e-15)
        assert np.allclose(m.input_gain, np.linalg.inv(INERTIA))

    def test_adjoint_of_identity(self):
        traj = spin_reference(INERTIA, [0.0, 0.0, 0.0])
        m = linearize_continuous(traj.point(0.0), INERTIA, alpha=1.0)
        assert np.allclose(m.adj, np.eye(3))

    def test_gyroscopic_matrix_matches_componentwise(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            w0 = rng.normal(size=3)
            e = rng.normal(size=3)
            F = gyroscopic_matrix(w0, INERTIA)
            direct = np.linalg.solve(
                INERTIA, np.cross(INERTIA @ e, w0) + np.cross(INERTIA @ w0, e))
            assert np.linalg.norm(F @ e - direct) < 1e-12

    def test_transversal_rate(self):
        traj = benchmark_reference(INERTIA)
        m = linearize_continuous(traj.point(0.3), INERTIA, alpha=2.5)
        assert m.transversal_rate == -5.0

    def test_adjoint_identity_on_vee(self):
        # R (w^) R^T = (R w)^ justifies the 3-vector reduction
        rng = np.random.default_rng(32)
        for _ in range(50):
            R = random_rotation(rng)
            w = rng.normal(size=3)
            assert np.linalg.norm(R @ so3.hat(w) @ R.T - so3.hat(R @ w)) < 1e-12


class TestDiscretize:
    def test_block_structure(self):
        traj = benchmark_reference(INERTIA)
        model = discretize(traj, INERTIA, alpha=1.0, h=0.2, n_steps=10)
        grid = traj.sample_grid(0.2, 11)
        assert len(model) == 10
        for k in [0, 3, 9]:
            A, B = model.A[k], model.B[k]
            assert np.allclose(A[:3, :3], np.eye(3))
            assert np.allclose(A[:3, 3:], 0.2 * grid.R0[k])
            assert np.allclose(A[3:, :3], 0.0)
            assert np.allclose(A[3:, 3:], np.eye(3) + 0.2 * gyroscopic_matrix(grid.omega0[k], INERTIA))
            assert np.allclose(B[:3, :], 0.0)
            assert np.allclose(B[3:, :], 0.2 * np.linalg.inv(INERTIA))

    def test_transversal_factor_example(self):
        traj = benchmark_reference(INERTIA)
        model = discretize(traj, INERTIA, alpha=1.0, h=0.2, n_steps=1)
        e_next = model.transversal_factor * (0.1 * np.eye(3))
        assert np.allclose(e_next, 0.06 * np.eye(3), atol=1e-15)

    def test_parallel_error_frozen_without_velocity_error(self):
        traj = benchmark_reference(INERTIA)
        model = discretize(traj, INERTIA, alpha=1.0, h=0.7, n_steps=3)
        x = np.array([0.4, -0.1, 0.2, 0.0, 0.0, 0.0])
        for k in range(3):
            x_next = model.A[k] @ x
            assert np.array_equal(x_next[:3], x[:3])
            x = x_next

    def test_transversal_never_enters_state_blocks(self):
        # A and B act on (e_par, e_omega) only: 6x6 and 6x3 by construction,
        # and the factor applied to e_perp is a scalar independent of them.
        traj = benchmark_reference(INERTIA)
        model = discretize(traj, INERTIA, alpha=3.0, h=0.1, n_steps=5)
        assert model.A.shape == (5, 6, 6)
        assert model.B.shape == (5, 6, 3)
        assert model.transversal_factor == pytest.approx(1.0 - 2.0 * 3.0 * 0.1)

    def test_euler_consistency_order(self):
        # one Euler step vs the exact flow of the frozen continuous model:
        # error O(h^2), so halving h quarters the defect
        traj = benchmark_reference(INERTIA)
        x0 = np.array([0.05, -0.02, 0.01, 0.04, 0.03, -0.06])
        du = np.array([0.3, -0.1, 0.2])
        defects = []
        for h in [1e-3, 5e-4]:
            model = discretize(traj, INERTIA, alpha=1.0, h=h, n_steps=1)
            x_euler = model.A[0] @ x0 + model.B[0] @ du

            m = linearize_continuous(traj.point(0.0), INERTIA, alpha=1.0)

            def rhs(t, x):
                Rt = traj.rotation(t)
                Ft = gyroscopic_matrix(traj.omega(t), INERTIA)
                return np.concatenate([Rt @ x[3:], Ft @ x[3:] + m.input_gain @ du])

            sol = solve_ivp(rhs, (0.0, h), x0, rtol=1e-12, atol=1e-14)
            defects.append(np.linalg.norm(sol.y[:, -1] - x_euler))
        ratio = defects[0] / defects[1]
        assert 3.0 < ratio < 5.0

    def test_rejects_bad_arguments(self):
        traj = benchmark_reference(INERTIA)
        with pytest.raises(ValueError):
            discretize(traj, INERTIA, 1.0, 0.0, 4)
        with pytest.raises(ValueError):
            discretize(traj, INERTIA, 1.0, 0.2, 0)


class TestTransversalCondition:
    def test_rotation_instance_bound_is_one(self):
        assert transversal_step_bound() == pytest.approx(1.0)

    def test_benchmark_point(self):
        ok, margin = check_transversal_condition(1.0, 0.2)
        assert ok
        assert margin == pytest.approx(0.8)

    def test_boundary_excluded(self):
        ok, margin = check_transversal_condition(1.0, 1.0)
        assert not ok
        assert margin == pytest.approx(0.0)

    def test_unstable_region(self):
        ok, _ = check_transversal_condition(5.5, 0.2)
        assert not ok
        seq = simulate_transversal(5.5, 0.2, 50, 0.1 * np.eye(3))
        norms = np.linalg.norm(seq, axis=(1, 2))
        # |1 - 2*alpha*h| = 1.2: geometric growth
        growth = norms[1:] / norms[:-1]
        assert np.allclose(growth, 1.2, atol=1e-12)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ValueError):
            check_transversal_condition(0.0, 0.2)
        with pytest.raises(ValueError):
            check_transversal_condition(1.0, 0.2, beta_u=0.0)

    def test_general_bound_formula(self):
        assert transversal_step_bound(1.5, 3.0, 0.8, 2.0) == pytest.approx(
            2.0 * 1.5 * 0.64 / (9.0 * 2.0))


class TestSimulateTransversal:
    def test_dead_beat(self):
        seq = simulate_transversal(2.5, 0.2, 3, np.diag([1.0, 2.0, 3.0]))
        assert np.array_equal(seq[1], np.zeros((3, 3)))
        assert np.array_equal(seq[3], np.zeros((3, 3)))

    def test_closed_form_power(self):
        seq = simulate_transversal(1.0, 0.2, 10, 0.1 * np.eye(3))
        assert np.allclose(seq[10], 0.1 * 0.6**10 * np.eye(3), atol=1e-15)
        assert seq[10][0, 0] == pytest.approx(6.0466176e-4, rel=1e-12)

    def test_divergence_above_bound(self):
        seq = simulate_transversal(1.1, 1.0, 20, 0.05 * np.eye(3))
        norms = np.linalg.norm(seq, axis=(1, 2))
        assert np.all(np.diff(norms) > 0.0)

    def test_symmetrizes_input(self):
        seq = simulate_transversal(1.0, 0.1, 1, np.array([[0.0, 1.0, 0.0],
                                                          [0.0, 0.0, 0.0],
                                                          [0.0, 0.0, 0.0]]))
        assert np.allclose(seq[0], seq[0].T)


class TestContinuousTransversalDecay:
    def test_exponential_rate(self):
        # d/dt e = -2*alpha*e integrates to exp(-2*alpha*t)
        alpha = 1.0
        e0 = so3.sym_part(np.array([[0.2, 0.1, 0.0], [0.1, -0.3, 0.05], [0.0, 0.05, 0.4]]))
        sol = solve_ivp(lambda t, y: -2.0 * alpha * y, (0.0, 1.0), e0.ravel(),
                        rtol=1e-10, atol=1e-12)
        ratio = np.linalg.norm(sol.y[:, -1]) / np.linalg.norm(e0)
        assert ratio == pytest.approx(np.exp(-2.0), abs=1e-5)

    def test_alpha_zero_is_constant(self):
        seq = simulate_transversal(0.0, 0.2, 25, 0.3 * np.eye(3))
        assert np.array_equal(seq[0], seq[25])
