import numpy as np
import pytest

from swarm_app.core.attractor import assemble_matrix, design_closed_form, design_first_order
from swarm_app.core.dynamics import (
    ConvergenceCriterion,
    ProjectionMode,
    estimate_decay_rate,
    hadamard_dynamics,
    iterate,
    iterate_doubling,
    predicted_limit,
    project_coefficient,
    trajectory_frame,
)
from swarm_app.core.errors import DivergenceError, InputError
from swarm_app.core.spectral import decompose


@pytest.fixture(scope='module')
def attractor_m5(line20_chain, line20_basis):
    return assemble_matrix(line20_chain, line20_basis, design_closed_form(line20_basis, 4, 4, 0.7))


def _delta(n, i=0):
    v = np.zeros(n)
    v[i] = 1.0
    return v


def _cosine(u, v):
    return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))


def test_one_chain_step(line5_chain):
    trajectory = iterate(line5_chain.matrix, _delta(5), ConvergenceCriterion(max_steps=1), snapshot_steps=[0, 1])
    assert trajectory.steps == 1
    assert not trajectory.converged
    np.testing.assert_array_equal(trajectory.snapshots[1][1], [0.2, 0.8, 0.0, 0.0, 0.0])


def test_identity_converges_after_window():
    trajectory = iterate(np.eye(3), np.ones(3), ConvergenceCriterion(window=5))
    assert trajectory.converged_at == 5
    np.testing.assert_array_equal(trajectory.limit, np.ones(3))


def test_zero_vector_is_a_fixed_point(line5_chain):
    trajectory = iterate(line5_chain.matrix, np.zeros(5))
    assert trajectory.converged
    assert not trajectory.final.any()


def test_divergence_is_reported():
    with pytest.raises(DivergenceError):
        iterate(2.0 * np.eye(2), np.ones(2))


def test_shape_mismatch():
    with pytest.raises(InputError):
        iterate(np.eye(3), np.ones(2))


def test_bad_criterion():
    with pytest.raises(InputError):
        ConvergenceCriterion(tolerance=0.0)


def test_power_iteration_reaches_steady_state(line5_chain, line5_basis):
    trajectory = iterate(line5_chain.matrix, _delta(5, 2))
    assert trajectory.converged
    np.testing.assert_allclose(trajectory.final, line5_basis.steady_state(), atol=1e-7)


def test_attractor_converges_to_fifth_harmonic(attractor_m5, line20_basis):
    trajectory = iterate(attractor_m5.matrix, _delta(20), ConvergenceCriterion(max_steps=10_000))
    assert trajectory.converged
    assert abs(_cosine(trajectory.final, line20_basis.harmonic(4))) > 1 - 1e-8
    np.testing.assert_allclose(trajectory.final, predicted_limit(_delta(20), line20_basis, 4), atol=1e-6)


def test_left_projection_is_conserved(attractor_m5, line20_basis):
    rng = np.random.default_rng(7)
    criterion = ConvergenceCriterion(tolerance=1e-300, window=1, max_steps=1000)
    for _ in range(5):
        v0 = rng.normal(size=20)
        expected = project_coefficient(v0, line20_basis, 4)
        trajectory = iterate(attractor_m5.matrix, v0, criterion, snapshot_steps=range(0, 1001, 100))
        for _, v in trajectory.snapshots:
            assert project_coefficient(v, line20_basis, 4) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_exact_projection_recovers_mixed_coefficients(line5_basis):
    # the steady state is not orthogonal to the others, the exact projection still recovers it
    v = 3.0 * line5_basis.harmonic(0) + line5_basis.harmonic(1)
    assert project_coefficient(v, line5_basis, 0, ProjectionMode.EXACT) == pytest.approx(3.0)
    assert project_coefficient(v, line5_basis, 1, ProjectionMode.EXACT) == pytest.approx(1.0)


def test_orthogonal_projection_on_symmetric_matrix():
    P = np.array([[0.5, 0.5], [0.5, 0.5]])
    basis = decompose(P)
    v = np.array([2.0, 1.0])
    for a in range(2):
        assert project_coefficient(v, basis, a, ProjectionMode.ORTHOGONAL) == pytest.approx(
            project_coefficient(v, basis, a, ProjectionMode.EXACT))


def test_decay_rate_follows_second_eigenvalue(line5_chain, line5_basis):
    trajectory = iterate(line5_chain.matrix, _delta(5), ConvergenceCriterion(tolerance=1e-300, max_steps=60),
                         snapshot_steps=range(20, 61, 5))
    rate = estimate_decay_rate(trajectory, line5_basis.steady_state())
    assert rate == pytest.approx(abs(line5_basis.eigenvalues[1]), rel=0.05)


def test_hadamard_with_uniform_proposal_recovers_chain(line5_chain, line5_basis):
    attractor = assemble_matrix(line5_chain, line5_basis, design_first_order(line5_basis))
    expected = hadamard_dynamics(5 * attractor.toarray(), np.full((5, 5), 0.2))
    np.testing.assert_allclose(expected, line5_chain.toarray(), atol=1e-14)


def test_trajectory_frame():
    trajectory = iterate(np.eye(5), _delta(5), ConvergenceCriterion(window=2), snapshot_steps=[0, 1, 10])
    assert trajectory.converged_at == 2
    frame = trajectory_frame(trajectory)
    assert frame['t'].tolist() == [0, 1, 10]
    assert list(frame.columns) == ['t'] + [f"cell_{j}" for j in range(5)]
    np.testing.assert_array_equal(frame.iloc[2, 1:].to_numpy(), _delta(5))


def test_no_snapshots_past_an_unconverged_stop(line5_chain):
    trajectory = iterate(line5_chain.matrix, _delta(5), ConvergenceCriterion(max_steps=3), snapshot_steps=[0, 3, 10])
    assert not trajectory.converged
    assert [t for t, _ in trajectory.snapshots] == [0, 3]
    dense = line5_chain.toarray()
    for t, v in trajectory.snapshots:
        np.testing.assert_allclose(v, np.linalg.matrix_power(dense, t) @ _delta(5), atol=1e-14)
    assert trajectory_frame(trajectory)['t'].tolist() == [0, 3]


def test_chain_keeps_mass_at_every_step(line5_chain, arrow_chain):
    rng = np.random.default_rng(11)
    for chain in (line5_chain, arrow_chain):
        v0 = rng.random(chain.n)
        criterion = ConvergenceCriterion(tolerance=1e-300, max_steps=200)
        trajectory = iterate(chain.matrix, v0, criterion, snapshot_steps=range(201))
        assert len(trajectory.snapshots) == 201
        for _, v in trajectory.snapshots:
            assert v.sum() == pytest.approx(v0.sum(), rel=1e-12)
            assert (v >= 0).all()


def test_doubling_visits_true_steps(line5_chain):
    trajectory = iterate_doubling(line5_chain.matrix, _delta(5), ConvergenceCriterion(max_steps=7))
    assert trajectory.steps == 7
    assert not trajectory.converged
    assert trajectory.residual > 0
    expected = np.linalg.matrix_power(line5_chain.toarray(), 7) @ _delta(5)
    np.testing.assert_allclose(trajectory.final, expected, atol=1e-14)


def test_doubling_reaches_the_attractor_limit(attractor_m5, line20_basis):
    trajectory = iterate_doubling(attractor_m5.matrix, _delta(20))
    assert trajectory.converged
    assert trajectory.residual < 1e-9
    np.testing.assert_allclose(trajectory.final, predicted_limit(_delta(20), line20_basis, 4), atol=1e-8)
    stepped = iterate(attractor_m5.matrix, _delta(20), ConvergenceCriterion(max_steps=10_000))
    np.testing.assert_allclose(trajectory.final, stepped.final, atol=1e-6)


def test_doubling_handles_slow_contraction():
    # second mode contracts by 1 - 1e-7 per step
    A = np.diag([1.0, 1.0 - 1e-7])
    trajectory = iterate_doubling(A, np.ones(2), ConvergenceCriterion(max_steps=2 ** 40))
    assert trajectory.converged
    assert trajectory.final[1] < 1e-9
    assert trajectory.final[0] == pytest.approx(1.0, abs=1e-9)
    assert not iterate(A, np.ones(2)).converged


def test_doubling_reports_divergence():
    with pytest.raises(DivergenceError):
        iterate_doubling(2.0 * np.eye(2), np.ones(2))
