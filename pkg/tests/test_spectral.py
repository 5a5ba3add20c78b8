import numpy as np
import pytest

from swarm_app.core.errors import ComplexSpectrumError, DegenerateInputError, NonDiagonalizableError
from swarm_app.core.spectral import NormalizationMode, decompose, fix_sign, normalize

from .conftest import line_modes


def test_line5_eigenvalues(line5_basis):
    np.testing.assert_allclose(line5_basis.eigenvalues, [1.0, 0.77, -0.60, -0.37, 0.20], atol=5e-3)
    expected = [value for value, _ in line_modes(5)]
    np.testing.assert_allclose(line5_basis.eigenvalues, expected, atol=1e-12)


def test_line5_steady_state(line5_basis):
    np.testing.assert_allclose(line5_basis.steady_state(), [0.12, 0.25, 0.25, 0.25, 0.13], atol=6e-3)
    np.testing.assert_allclose(line5_basis.steady_state(), [0.125, 0.25, 0.25, 0.25, 0.125], atol=1e-12)


def test_line5_harmonics_match_cosine_modes(line5_basis):
    for i, (_, vector) in enumerate(line_modes(5)):
        ours = line5_basis.harmonic(i)
        assert np.abs(ours).sum() == pytest.approx(1.0)
        # same mode up to sign
        assert min(np.abs(ours - vector).max(), np.abs(ours + vector).max()) < 1e-10


def test_last_line5_harmonic_shape(line5_basis):
    # alternates like [1, 0, -2, 0, 1] up to sign
    pi = line5_basis.harmonic(4)
    assert abs(pi[1]) < 1e-10 and abs(pi[3]) < 1e-10
    assert pi[0] == pytest.approx(pi[4])
    assert pi[2] == pytest.approx(-2 * pi[0])


def test_sign_convention(line20_basis):
    for i in range(line20_basis.n):
        pi = line20_basis.harmonic(i)
        top = np.flatnonzero(np.abs(pi) >= np.abs(pi).max() * (1 - 1e-9))[0]
        assert pi[top] > 0


def test_ordering_by_magnitude(line20_basis):
    magnitudes = np.abs(line20_basis.eigenvalues)
    assert np.all(np.diff(magnitudes) <= 1e-12)
    assert line20_basis.eigenvalues[0] == pytest.approx(1.0)


def test_left_vectors_are_dual(line20_chain, line20_basis):
    np.testing.assert_allclose(line20_basis.left.T @ line20_basis.right, np.eye(20), atol=1e-9)
    P = line20_chain.toarray()
    np.testing.assert_allclose(P.T @ line20_basis.left, line20_basis.left * line20_basis.eigenvalues, atol=1e-9)


def test_right_vectors_are_eigenvectors(arrow_chain, arrow_basis):
    P = arrow_chain.toarray()
    np.testing.assert_allclose(P @ arrow_basis.right, arrow_basis.right * arrow_basis.eigenvalues, atol=1e-9)
    assert np.all(arrow_basis.steady_state() > 0)


def test_normalization_modes(line5_chain):
    basis = decompose(line5_chain, NormalizationMode.L2)
    np.testing.assert_allclose(np.linalg.norm(basis.right, axis=0), 1.0)
    np.testing.assert_allclose(np.abs(basis.harmonics(NormalizationMode.MAXABS)).max(axis=0), 1.0)


def test_single_state_chain():
    basis = decompose(np.array([[1.0]]))
    np.testing.assert_array_equal(basis.eigenvalues, [1.0])
    np.testing.assert_array_equal(basis.harmonic(0), [1.0])


def test_rotation_has_complex_spectrum():
    cycle = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(ComplexSpectrumError):
        decompose(cycle)


def test_jordan_block_is_not_diagonalizable():
    with pytest.raises(NonDiagonalizableError):
        decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_normalize_zero_vector():
    with pytest.raises(DegenerateInputError):
        normalize(np.zeros(3))


def test_fix_sign_prefers_first_of_tied_entries():
    np.testing.assert_array_equal(fix_sign(np.array([-1.0, 1.0])), [1.0, -1.0])
    np.testing.assert_array_equal(fix_sign(np.array([0.5, -1.0])), [-0.5, 1.0])


def test_eigenpair_frame(line5_basis):
    frame = line5_basis.to_frame()
    assert list(frame.columns[:3]) == ['harmonic', 'eigenvalue', 'cell_0']
    assert frame['harmonic'].tolist() == [1, 2, 3, 4, 5]


def test_eigen_expansion_rebuilds_any_vector(arrow_basis):
    v = np.random.default_rng(3).normal(size=arrow_basis.n)
    coefficients = arrow_basis.left.T @ v
    np.testing.assert_allclose(arrow_basis.right @ coefficients, v, atol=1e-9)


def test_decomposition_is_repeatable(line20_chain, arrow_chain):
    for chain in (line20_chain, arrow_chain):
        first, second = decompose(chain), decompose(chain)
        np.testing.assert_allclose(first.eigenvalues, second.eigenvalues, rtol=0, atol=1e-14)
        np.testing.assert_allclose(first.right, second.right, atol=1e-12)
