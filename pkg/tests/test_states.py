import numpy as np
import pytest

from cohdist import (
    DensityMatrix,
    NonSquareError,
    NotHermitianError,
    NotPSDError,
    PureStateVector,
    TraceNotOneError,
    ValidationError,
    as_distribution,
    dephase,
    entrywise_abs,
    validate_density,
)
from cohdist.states import positive_diagonal_indices


def test_accepts_valid_density():
    rho = validate_density(np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert rho.dim == 2
    assert np.allclose(rho.diagonal(), [0.5, 0.5])


def test_rejects_non_square():
    with pytest.raises(NonSquareError):
        validate_density(np.ones((2, 3)) / 3)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        validate_density(np.array([[0.5, 0.4], [0.1, 0.5]]))


def test_rejects_negative_eigenvalue_and_reports_it():
    mat = np.array([[0.5, 0.6], [0.6, 0.5]])
    with pytest.raises(NotPSDError) as err:
        validate_density(mat)
    assert err.value.min_eigenvalue == pytest.approx(-0.1, abs=1e-12)


def test_rejects_wrong_trace():
    with pytest.raises(TraceNotOneError):
        validate_density(np.diag([0.7, 0.7]))


def test_symmetrizes_rounding_noise():
    mat = np.array([[0.5, 0.3 + 2e-11], [0.3 - 2e-11, 0.5]], dtype=complex)
    rho = validate_density(mat)
    assert np.allclose(rho.matrix, rho.matrix.conj().T, atol=0)


def test_density_matrix_is_read_only():
    rho = validate_density(np.diag([0.4, 0.6]))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_pure_state_requires_unit_norm():
    with pytest.raises(ValidationError):
        PureStateVector(np.array([0.5, 0.5], dtype=complex))


def test_pure_state_support_ignores_dead_levels():
    psi = PureStateVector(np.array([np.sqrt(0.7), 0.0, np.sqrt(0.3)], dtype=complex))
    assert psi.support() == (0, 2)
    assert psi.sorted_support() == (0, 2)


def test_sorted_support_breaks_ties_by_index():
    psi = PureStateVector.from_probabilities(np.array([0.25, 0.5, 0.25]))
    assert psi.sorted_support() == (1, 0, 2)


def test_from_probabilities_round_trip():
    w = np.array([0.1, 0.6, 0.3])
    psi = PureStateVector.from_probabilities(w)
    assert np.allclose(psi.probabilities(), w)


def test_from_pure_builds_projector():
    psi = PureStateVector(np.array([1.0, 1.0], dtype=complex) / np.sqrt(2))
    rho = DensityMatrix.from_pure(psi)
    assert np.allclose(rho.matrix, np.full((2, 2), 0.5))


def test_dephase_strips_off_diagonals():
    rho = validate_density(np.full((2, 2), 0.5))
    assert np.allclose(dephase(rho).matrix, np.diag([0.5, 0.5]))


def test_entrywise_abs_kills_phases():
    mat = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    assert np.allclose(entrywise_abs(validate_density(mat)), np.full((2, 2), 0.5))


def test_positive_diagonal_indices_skips_zero_population():
    rho = validate_density(np.diag([0.5, 0.0, 0.5]))
    assert positive_diagonal_indices(rho) == (0, 2)


def test_as_distribution_normalizes_and_validates():
    w = as_distribution(np.array([0.2, 0.8]))
    assert w.sum() == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        as_distribution(np.array([0.5, -0.2, 0.7]))
    with pytest.raises(ValidationError):
        as_distribution(np.array([0.5, 0.6]))
