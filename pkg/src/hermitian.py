# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Hermitian operators, spectral decomposition and real coordinates.

The real vector space of Hermitian n×n matrices is coordinatized by a fixed
orthonormal basis (under ⟨A, B⟩ = tr(AB)) in the following order: the
diagonal units D_j = E_jj, then for every pair j < k in lexicographic order
S_jk = (E_jk + E_kj)/√2 followed by A_jk = (i·E_kj − i·E_jk)/√2.
"""

import functools
import logging
import typing

import numpy as np
import scipy.linalg

from constants import RANK_TOL, TOL_SPECTRAL, TOL_SYM
from exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    NonHermitianInputError,
    SpectralDecompositionError,
)
from lab_types import Spectrum

logger = logging.getLogger(__name__)

HermitianOperator = np.ndarray
HermitianBasis = np.ndarray


class ProjectionTest(typing.NamedTuple):
    """Outcome of a projection test.

    Attributes:
        is_projection: whether the operator is idempotent within tolerance.
        rank: rank of the projection, None when it is not one.
    """

    is_projection: bool
    rank: typing.Optional[int]


def ensure_hermitian(matrix: typing.Any, tol: float = TOL_SYM) -> HermitianOperator:
    """Check the Hermitian invariants and return the matrix as a complex array.

    Args:
        matrix: a square matrix.
        tol: tolerance on ‖A − A†‖_F and on the imaginary part of the trace.

    Returns:
        The matrix as a complex array.

    Raises:
        NonHermitianInputError: if the matrix is not square or not Hermitian.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonHermitianInputError(f"Expected a square matrix, got shape {matrix.shape}")
    asymmetry = float(np.linalg.norm(matrix - matrix.conj().T))
    if asymmetry > tol or abs(np.trace(matrix).imag) > tol:
        raise NonHermitianInputError(
            f"Matrix is not Hermitian (‖A − A†‖_F = {asymmetry:.3e})"
        )
    return matrix


@functools.lru_cache(maxsize=None)
def hermitian_basis(n: int) -> HermitianBasis:
    """Build the canonical orthonormal basis of n×n Hermitian matrices.

    Args:
        n: the Hilbert space dimension.

    Returns:
        Read-only (n², n, n) complex array, index a holding B_a.

    Raises:
        InvalidParameterError: if n is not positive.
    """
    if n < 1:
        raise InvalidParameterError(f"Dimension must be positive, got {n}")
    basis = np.zeros((n * n, n, n), dtype=complex)
    for j in range(n):
        basis[j, j, j] = 1
    index = n
    scale = 1 / np.sqrt(2)
    for j in range(n):
        for k in range(j + 1, n):
            basis[index, j, k] = basis[index, k, j] = scale
            basis[index + 1, k, j] = 1j * scale
            basis[index + 1, j, k] = -1j * scale
            index += 2
    basis.flags.writeable = False
    return basis


def trace_inner(first: HermitianOperator, second: HermitianOperator) -> float:
    """Return the trace inner product ⟨A, B⟩ = tr(AB).

    Args:
        first: A.
        second: B.

    Returns:
        The real part of tr(AB).
    """
    return float(np.einsum("ij,ji->", first, second).real)


def _basis_for(dim: int, basis: typing.Optional[HermitianBasis]) -> HermitianBasis:
    """Return the basis to use for a dimension, checking a supplied one."""
    if basis is None:
        return hermitian_basis(dim)
    if basis.shape != (dim * dim, dim, dim):
        raise DimensionMismatchError(
            f"Basis of shape {basis.shape} does not fit dimension {dim} operators"
        )
    return basis


def real_coords(
    matrix: HermitianOperator, basis: typing.Optional[HermitianBasis] = None
) -> np.ndarray:
    """Return the coordinates c_a = tr(A·B_a) of a Hermitian matrix.

    Stacks of matrices of shape (..., n, n) are accepted and give (..., n²).

    Args:
        matrix: the Hermitian matrix or stack of matrices.
        basis: the basis, the canonical one of matching size when omitted.

    Returns:
        The real coordinates.

    Raises:
        DimensionMismatchError: if the matrix and basis sizes differ.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim < 2 or matrix.shape[-1] != matrix.shape[-2]:
        raise DimensionMismatchError(f"Expected square matrices, got shape {matrix.shape}")
    basis = _basis_for(matrix.shape[-1], basis)
    return np.einsum("...ij,aji->...a", matrix, basis).real


def from_coords(
    coords: typing.Any, basis: typing.Optional[HermitianBasis] = None
) -> HermitianOperator:
    """Rebuild a Hermitian matrix from its real coordinates.

    Args:
        coords: vector of length n², or a stack of such vectors.
        basis: the basis, the canonical one of matching size when omitted.

    Returns:
        The Hermitian matrix, exactly Hermitian by construction.

    Raises:
        DimensionMismatchError: if the length is not a square or does not fit the basis.
    """
    coords = np.asarray(coords, dtype=float)
    dim = int(round(np.sqrt(coords.shape[-1]))) if coords.ndim else 0
    if dim < 1 or dim * dim != coords.shape[-1]:
        raise DimensionMismatchError(f"Coordinate length {coords.shape} is not a square")
    basis = _basis_for(dim, basis)
    return np.einsum("...a,aij->...ij", coords, basis)


def spectral_decompose(matrix: HermitianOperator) -> Spectrum:
    """Diagonalize a Hermitian matrix.

    Eigenvalues come sorted descending. Ties are broken by the real parts of
    the eigenvectors in lexicographic order; inside a degenerate eigenspace
    the basis is whatever the solver returns.

    Args:
        matrix: the Hermitian matrix.

    Returns:
        The spectrum.

    Raises:
        NonHermitianInputError: if the matrix is not Hermitian.
        SpectralDecompositionError: if V·diag(λ)·V† misses the matrix by more than
            TOL_SPECTRAL relative to its largest eigenvalue.
    """
    matrix = ensure_hermitian(matrix)
    eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
    keys = tuple(eigenvectors.real[::-1]) + (-np.round(eigenvalues, 9),)
    order = np.lexsort(keys)
    spectrum = Spectrum(eigenvalues=eigenvalues[order], eigenvectors=eigenvectors[:, order])
    logger.debug("Spectrum of a %d×%d matrix: %s", len(matrix), len(matrix), spectrum.eigenvalues)
    error = np.linalg.norm(
        matrix
        - (spectrum.eigenvectors * spectrum.eigenvalues) @ spectrum.eigenvectors.conj().T
    )
    if error > TOL_SPECTRAL * max(1.0, float(np.abs(eigenvalues).max(initial=0.0))):
        logger.error("Spectral reconstruction error %.3e exceeds tolerance", error)
        raise SpectralDecompositionError(f"Spectral reconstruction error {error:.3e}")
    return spectrum


def rank_eps(matrix: HermitianOperator, tol: float = RANK_TOL) -> int:
    """Count the eigenvalues of a Hermitian matrix with |λ| > tol.

    Args:
        matrix: the Hermitian matrix.
        tol: the threshold.

    Returns:
        The numerical rank.

    Raises:
        InvalidParameterError: if tol is not positive.
    """
    if tol <= 0:
        raise InvalidParameterError(f"Rank tolerance must be positive, got {tol}")
    eigenvalues = scipy.linalg.eigvalsh(np.asarray(matrix, dtype=complex))
    return int(np.count_nonzero(np.abs(eigenvalues) > tol))


def is_projection(matrix: HermitianOperator, tol: float) -> ProjectionTest:
    """Test whether a Hermitian matrix is an orthogonal projection.

    Args:
        matrix: the matrix.
        tol: tolerance on ‖A² − A‖_F.

    Returns:
        Whether the matrix is a projection, with its rank when it is.

    Raises:
        InvalidParameterError: if tol is not positive.
    """
    if tol <= 0:
        raise InvalidParameterError(f"Projection tolerance must be positive, got {tol}")
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return ProjectionTest(False, None)
    if np.linalg.norm(matrix - matrix.conj().T) > max(tol, TOL_SYM):
        return ProjectionTest(False, None)
    if np.linalg.norm(matrix @ matrix - matrix) > tol:
        return ProjectionTest(False, None)
    # eigenvalues of a near-projection cluster at 0 and 1
    return ProjectionTest(True, rank_eps(matrix, 0.5))


def random_hermitian(n: int, rng: np.random.Generator) -> HermitianOperator:
    """Draw a random Hermitian matrix with O(1) entries.

    Args:
        n: the dimension.
        rng: the random generator.

    Returns:
        (G + G†)/2 for a complex Gaussian G.
    """
    gaussian = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (gaussian + gaussian.conj().T) / 2
