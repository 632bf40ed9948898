# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Tests for the hermitian module."""

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    NonHermitianInputError,
    SpectralDecompositionError,
)
from hermitian import (
    ensure_hermitian,
    from_coords,
    hermitian_basis,
    is_projection,
    random_hermitian,
    rank_eps,
    real_coords,
    spectral_decompose,
    trace_inner,
)

MATRIX_DIMENSION = 3


@pytest.mark.parametrize(
    "matrix, expected",
    [
        pytest.param(np.eye(2), [1, 1], id="identity"),
        pytest.param(np.diag([1.0, 0.0]), [1, 0], id="diagonal"),
        pytest.param(np.array([[0.0, 1.0], [1.0, 0.0]]), [1, -1], id="swap"),
    ],
)
def test_spectral_decompose_sorts_eigenvalues_descending(matrix, expected):
    """
    arrange: Take small Hermitian matrices with known spectra.
    act: Diagonalize them.
    assert: The eigenvalues come out sorted descending.
    """
    spectrum = spectral_decompose(matrix)

    assert np.allclose(spectrum.eigenvalues, expected)


def test_spectral_decompose_diagonal_eigenvectors():
    """
    arrange: Take diag(1, 0).
    act: Diagonalize it.
    assert: The eigenvectors are e1 and e2 up to phase.
    """
    spectrum = spectral_decompose(np.diag([1.0, 0.0]))

    assert np.allclose(np.abs(spectrum.eigenvectors), np.eye(2))


def test_spectral_decompose_reconstructs_random_matrix(rng):
    """
    arrange: Draw a random Hermitian matrix.
    act: Diagonalize it.
    assert: V·diag(λ)·V† gives the matrix back and V is unitary.
    """
    matrix = random_hermitian(5, rng)

    spectrum = spectral_decompose(matrix)

    vectors = spectrum.eigenvectors
    assert np.allclose((vectors * spectrum.eigenvalues) @ vectors.conj().T, matrix, atol=1e-12)
    assert np.allclose(vectors.conj().T @ vectors, np.eye(5), atol=1e-12)


def test_spectral_decompose_rejects_inaccurate_solver(mocker):
    """
    arrange: Make the eigensolver return a spectrum that misses the identity.
    act: Diagonalize the identity.
    assert: SpectralDecompositionError is raised.
    """
    mocker.patch("hermitian.scipy.linalg.eigh", return_value=(np.array([0.0, 5.0]), np.eye(2)))

    with pytest.raises(SpectralDecompositionError):
        spectral_decompose(np.eye(2))


def test_spectral_decompose_rejects_non_hermitian():
    """
    arrange: Take a strictly upper triangular matrix.
    act: Diagonalize it.
    assert: NonHermitianInputError is raised.
    """
    with pytest.raises(NonHermitianInputError):
        spectral_decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_ensure_hermitian_rejects_non_square():
    """
    arrange: Take a 2×3 matrix.
    act: Check it.
    assert: NonHermitianInputError is raised.
    """
    with pytest.raises(NonHermitianInputError):
        ensure_hermitian(np.zeros((2, 3)))


@pytest.mark.parametrize(
    "matrix, expected",
    [
        pytest.param(np.eye(2), 2, id="identity"),
        pytest.param(np.zeros((3, 3)), 0, id="zero"),
        pytest.param(np.diag([1.0, 1e-12, 0.0]), 1, id="tiny eigenvalue"),
    ],
)
def test_rank_eps(matrix, expected):
    """
    arrange: Take matrices with known numerical rank at 1e-9.
    act: Compute the rank.
    assert: The rank matches.
    """
    assert rank_eps(matrix, 1e-9) == expected


def test_rank_eps_rejects_non_positive_tolerance():
    """
    arrange: Take the identity.
    act: Compute its rank at tolerance 0.
    assert: InvalidParameterError is raised.
    """
    with pytest.raises(InvalidParameterError):
        rank_eps(np.eye(2), 0.0)


@pytest.mark.parametrize(
    "matrix, expected",
    [
        pytest.param(np.diag([1.0, 0.0, 0.0]), (True, 1), id="coordinate projection"),
        pytest.param(np.diag([0.5, 0.5]), (False, None), id="half identity"),
        pytest.param(0.5 * np.ones((2, 2)), (True, 1), id="diagonal line"),
        pytest.param(np.array([[0.0, 1.0], [0.0, 0.0]]), (False, None), id="non hermitian"),
    ],
)
def test_is_projection(matrix, expected):
    """
    arrange: Take matrices that are or are not projections.
    act: Test them.
    assert: The verdict and rank match.
    """
    assert tuple(is_projection(matrix, 1e-8)) == expected


def test_hermitian_basis_is_orthonormal():
    """
    arrange: Build the canonical basis for n = 3.
    act: Compute all pairwise trace inner products.
    assert: The Gram matrix is the identity and every element is Hermitian.
    """
    basis = hermitian_basis(3)

    gram = np.array([[trace_inner(a, b) for b in basis] for a in basis])

    assert basis.shape == (9, 3, 3)
    assert np.allclose(gram, np.eye(9))
    assert np.allclose(basis, basis.conj().transpose(0, 2, 1))


def test_hermitian_basis_is_read_only():
    """
    arrange: Build the canonical basis.
    act: Write into it.
    assert: numpy refuses the write.
    """
    basis = hermitian_basis(2)

    with pytest.raises(ValueError):
        basis[0, 0, 0] = 2


def test_real_coords_of_identity():
    """
    arrange: Take the 2×2 identity.
    act: Compute its coordinates.
    assert: Only the diagonal units are nonzero.
    """
    assert np.allclose(real_coords(np.eye(2)), [1, 1, 0, 0])


def test_real_coords_of_zero():
    """
    arrange: Take the zero matrix.
    act: Compute its coordinates.
    assert: The coordinates vanish.
    """
    assert np.allclose(real_coords(np.zeros((3, 3))), np.zeros(9))


def test_real_coords_of_basis_element():
    """
    arrange: Take the symmetric element S_01 of the 2×2 basis.
    act: Compute its coordinates.
    assert: It is the unit vector at its own index.
    """
    element = hermitian_basis(2)[2]

    assert np.allclose(real_coords(element), [0, 0, 1, 0])


def test_real_coords_rejects_mismatched_basis():
    """
    arrange: Take a 2×2 matrix and the 3×3 basis.
    act: Compute the coordinates.
    assert: DimensionMismatchError is raised.
    """
    with pytest.raises(DimensionMismatchError):
        real_coords(np.eye(2), hermitian_basis(3))


def test_from_coords_basics():
    """
    arrange: Take the zero vector and the unit vector at D_0.
    act: Rebuild matrices.
    assert: The zero matrix and E_00 come back.
    """
    assert np.allclose(from_coords(np.zeros(4)), np.zeros((2, 2)))
    assert np.allclose(from_coords([1, 0, 0, 0]), np.diag([1, 0]))


def test_from_coords_rejects_non_square_length():
    """
    arrange: Take a vector of length 5.
    act: Rebuild a matrix.
    assert: DimensionMismatchError is raised.
    """
    with pytest.raises(DimensionMismatchError):
        from_coords(np.zeros(5))


def test_coordinates_accept_stacks(rng):
    """
    arrange: Stack four random Hermitian matrices.
    act: Convert the stack to coordinates and back.
    assert: Shapes follow the stack and the matrices come back.
    """
    stack = np.stack([random_hermitian(3, rng) for _ in range(4)])

    coords = real_coords(stack)

    assert coords.shape == (4, 9)
    assert np.allclose(from_coords(coords), stack, atol=1e-12)


@seed(1)
@settings(max_examples=50, deadline=None)
@given(
    real=arrays(
        np.float64,
        (MATRIX_DIMENSION, MATRIX_DIMENSION),
        elements=st.floats(min_value=-10.0, max_value=10.0),
    ),
    imaginary=arrays(
        np.float64,
        (MATRIX_DIMENSION, MATRIX_DIMENSION),
        elements=st.floats(min_value=-10.0, max_value=10.0),
    ),
)
def test_coordinates_round_trip_hypothesis(real, imaginary):
    """
    arrange: Build a Hermitian matrix from arbitrary real and imaginary parts.
    act: Convert to coordinates and back.
    assert: The matrix is recovered and coordinates preserve the trace inner product.
    """
    general = real + 1j * imaginary
    matrix = (general + general.conj().T) / 2

    coords = real_coords(matrix)

    assert np.allclose(from_coords(coords), matrix, atol=1e-12)
    assert np.isclose(coords @ coords, trace_inner(matrix, matrix))
