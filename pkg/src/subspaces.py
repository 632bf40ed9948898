# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Subspace arithmetic on frames.

Meets, joins and principal angles all come from one singular value
decomposition: the residual of the smaller subspace after projecting onto the
larger one. Thresholding the same sines keeps
dim(X ∩ Y) + dim(X + Y) = dim X + dim Y exact.
"""

import logging
import typing

import numpy as np
import scipy.linalg

from constants import ANGLE_TOL, PROJECTION_TOL, RANK_TOL
from exceptions import (
    BadRankError,
    DimensionMismatchError,
    NotAProjectionError,
    RankDeficientError,
    RankMismatchError,
)
from hermitian import HermitianOperator, is_projection
from lab_types import Frame

logger = logging.getLogger(__name__)


class _Residual(typing.NamedTuple):
    """SVD of the part of the smaller subspace outside the larger one."""

    larger: Frame
    smaller: Frame
    left: np.ndarray
    sines: np.ndarray
    right: np.ndarray


def empty_frame(n: int) -> Frame:
    """Return the zero subspace of C^n.

    Args:
        n: the ambient dimension.

    Returns:
        The rank 0 frame.
    """
    return Frame(columns=np.zeros((n, 0), dtype=complex))


def check_same_ambient(first: Frame, second: Frame) -> None:
    """Raise if two frames live in different spaces."""
    if first.ambient_dim != second.ambient_dim:
        raise DimensionMismatchError(
            f"Frames live in C^{first.ambient_dim} and C^{second.ambient_dim}"
        )


def check_same_rank(first: Frame, second: Frame) -> None:
    """Raise if two frames have different ranks or ambient spaces."""
    check_same_ambient(first, second)
    if first.rank != second.rank:
        raise RankMismatchError(f"Frames have ranks {first.rank} and {second.rank}")


def _residual(first: Frame, second: Frame) -> _Residual:
    """Decompose the smaller frame relative to the larger one."""
    check_same_ambient(first, second)
    larger, smaller = (first, second) if first.rank >= second.rank else (second, first)
    if smaller.rank == 0:
        n = smaller.ambient_dim
        return _Residual(larger, smaller, np.zeros((n, 0)), np.zeros(0), np.zeros((0, 0)))
    outside = smaller.columns - larger.columns @ (larger.columns.conj().T @ smaller.columns)
    left, sines, right = scipy.linalg.svd(outside, full_matrices=False)
    return _Residual(larger, smaller, left, np.clip(sines, 0.0, 1.0), right.conj().T)


def orthonormalize(vectors: typing.Any, tol: float = RANK_TOL) -> Frame:
    """Build the frame spanned by the columns of a matrix.

    Args:
        vectors: n×k complex matrix.
        tol: singular value threshold of the rank test.

    Returns:
        Orthonormal columns with the same span, the R factor having a positive diagonal.

    Raises:
        RankDeficientError: if the columns are numerically dependent.
    """
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.ndim == 1:
        vectors = vectors[:, np.newaxis]
    if vectors.shape[1] == 0:
        return empty_frame(vectors.shape[0])
    singular = scipy.linalg.svd(vectors, compute_uv=False)
    rank = int(np.count_nonzero(singular > tol))
    if rank < vectors.shape[1]:
        raise RankDeficientError(
            f"{vectors.shape[1]} vectors have numerical rank {rank} at tolerance {tol}"
        )
    q_factor, r_factor = scipy.linalg.qr(vectors, mode="economic")
    diagonal = np.diag(r_factor)
    return Frame(columns=q_factor * (diagonal / np.abs(diagonal)))


def random_frame(n: int, k: int, rng: np.random.Generator) -> Frame:
    """Draw a random k-dimensional subspace of C^n.

    Args:
        n: the ambient dimension.
        k: the rank.
        rng: the random generator.

    Returns:
        The span of a complex Gaussian n×k matrix.

    Raises:
        BadRankError: if k is not between 0 and n.
    """
    if not 0 <= k <= n:
        raise BadRankError(f"Cannot draw a rank {k} subspace of C^{n}")
    return orthonormalize(rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k)))


def projection_of(frame: Frame) -> HermitianOperator:
    """Return the orthogonal projection P = F·F† onto a subspace.

    Args:
        frame: the subspace.

    Returns:
        The projection.
    """
    return frame.columns @ frame.columns.conj().T


def image_of_projection(projection: HermitianOperator, tol: float = PROJECTION_TOL) -> Frame:
    """Return the image of a projection.

    Args:
        projection: the projection.
        tol: tolerance of the projection test.

    Returns:
        Eigenvectors of the eigenvalues near 1, largest first.

    Raises:
        NotAProjectionError: if the operator is not a projection.
    """
    if not is_projection(projection, tol).is_projection:
        raise NotAProjectionError("Operator is not a projection")
    projection = np.asarray(projection, dtype=complex)
    eigenvalues, eigenvectors = scipy.linalg.eigh((projection + projection.conj().T) / 2)
    return Frame(columns=eigenvectors[:, eigenvalues > 0.5][:, ::-1])


def meet(first: Frame, second: Frame, tol: float = ANGLE_TOL) -> Frame:
    """Return the intersection of two subspaces.

    Args:
        first: X.
        second: Y.
        tol: largest principal angle counted as zero.

    Returns:
        The span of the principal vectors with zero angle.
    """
    residual = _residual(first, second)
    shared = residual.right[:, residual.sines <= tol]
    return Frame(columns=residual.smaller.columns @ shared)


def join(first: Frame, second: Frame, tol: float = ANGLE_TOL) -> Frame:
    """Return the sum of two subspaces.

    Args:
        first: X.
        second: Y.
        tol: largest principal angle counted as zero.

    Returns:
        The larger frame extended by the new directions of the smaller one.
    """
    residual = _residual(first, second)
    extra = residual.left[:, residual.sines > tol]
    larger = residual.larger.columns
    if extra.shape[1] == 0:
        return residual.larger
    extra = extra - larger @ (larger.conj().T @ extra)
    extra, _ = scipy.linalg.qr(extra, mode="economic")
    return Frame(columns=np.hstack([larger, extra]))


def ortho_complement(frame: Frame) -> Frame:
    """Return the orthogonal complement of a subspace.

    Args:
        frame: X.

    Returns:
        A frame of X^⊥.
    """
    if frame.rank == 0:
        return Frame(columns=np.eye(frame.ambient_dim, dtype=complex))
    return Frame(columns=scipy.linalg.null_space(frame.columns.conj().T))


def principal_angles(first: Frame, second: Frame) -> np.ndarray:
    """Return the principal angles between two subspaces.

    Small angles come from the sines of the residual decomposition and large
    ones from the cosines, which agree in exact arithmetic.

    Args:
        first: X.
        second: Y.

    Returns:
        min(dim X, dim Y) angles in [0, π/2], ascending.
    """
    residual = _residual(first, second)
    if residual.smaller.rank == 0:
        return np.zeros(0)
    cosines = scipy.linalg.svd(
        residual.larger.columns.conj().T @ residual.smaller.columns, compute_uv=False
    )
    cosines = np.clip(np.sort(cosines)[::-1], 0.0, 1.0)
    sines = np.sort(residual.sines)
    return np.where(sines**2 <= 0.5, np.arcsin(sines), np.arccos(cosines))


def compatible_split(first: Frame, second: Frame) -> typing.Tuple[Frame, Frame, Frame]:
    """Split two subspaces around their intersection C.

    Args:
        first: X.
        second: Y.

    Returns:
        (X', C, Y') with X = X' ⊕ C and Y = Y' ⊕ C orthogonal sums.
    """
    common = meet(first, second)

    def _outside(frame: Frame) -> Frame:
        if common.rank == 0:
            return frame
        coefficients = scipy.linalg.null_space(common.columns.conj().T @ frame.columns)
        return Frame(columns=frame.columns @ coefficients)

    return _outside(first), common, _outside(second)


def contains(outer: Frame, inner: Frame, tol: float = PROJECTION_TOL) -> bool:
    """Test whether one subspace lies inside another.

    Args:
        outer: X.
        inner: Y.
        tol: tolerance on the part of Y outside X.

    Returns:
        Whether Y ⊆ X.
    """
    check_same_ambient(outer, inner)
    outside = inner.columns - outer.columns @ (outer.columns.conj().T @ inner.columns)
    return bool(np.linalg.norm(outside) <= tol)


def is_compatible(first: Frame, second: Frame, tol: float = PROJECTION_TOL) -> bool:
    """Test whether two subspaces are compatible.

    Args:
        first: X.
        second: Y.
        tol: tolerance on the Frobenius norm of the commutator.

    Returns:
        Whether P_X and P_Y commute.
    """
    check_same_ambient(first, second)
    p_first, p_second = projection_of(first), projection_of(second)
    return bool(np.linalg.norm(p_first @ p_second - p_second @ p_first) <= tol)


def gap_distance(first: Frame, second: Frame) -> float:
    """Return ‖P_X − P_Y‖_F for two subspaces of equal rank.

    Args:
        first: X.
        second: Y.

    Returns:
        The gap.

    Raises:
        RankMismatchError: if the ranks differ.
    """
    check_same_rank(first, second)
    return float(np.linalg.norm(projection_of(first) - projection_of(second)))


def is_orthogonal(first: Frame, second: Frame, tol: float = PROJECTION_TOL) -> bool:
    """Test whether two subspaces are orthogonal.

    Args:
        first: X.
        second: Y.
        tol: tolerance on ‖X†Y‖_F.

    Returns:
        Whether X ⊥ Y.
    """
    check_same_ambient(first, second)
    return bool(np.linalg.norm(first.columns.conj().T @ second.columns) <= tol)
