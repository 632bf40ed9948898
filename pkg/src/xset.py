# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""The set X_k(X, Y) of subspaces Z with P_X + P_Y − P_Z a rank k projection.

Every member lies in the interval [X ∩ Y, X + Y]_k, so searches run over
Z = (X ∩ Y) ⊕ span(Q·M), where Q is an orthonormal basis of
(X + Y) ⊖ (X ∩ Y) and M is a complex matrix of free coefficients.
"""

import logging
import typing

import numpy as np
import scipy.linalg
from scipy.optimize import least_squares

from constants import (
    INTERVAL_PROBES,
    JACOBIAN_TOL,
    LOCAL_SEARCH_RESTARTS,
    PCA_RADIUS,
    PCA_RATIO,
    PROJECTION_TOL,
)
from exceptions import (
    CrossValidationError,
    EstimatorDisagreementError,
    NotAMemberError,
    RankDeficientError,
)
from grassmann_graph import is_adjacent
from hermitian import is_projection
from lab_types import Frame, GeherClass, LocalDimension, XSetSample
from subspaces import (
    check_same_rank,
    image_of_projection,
    is_compatible,
    join,
    meet,
    orthonormalize,
    projection_of,
    random_frame,
)

logger = logging.getLogger(__name__)

# solver tolerances close to machine precision
_SOLVER_TOL = 1e-14


def _split(values: np.ndarray, rows: int, columns: int) -> np.ndarray:
    """Unpack real parameters into a complex rows×columns matrix."""
    size = rows * columns
    return (values[:size] + 1j * values[size:]).reshape(rows, columns)


def _pack(matrix: np.ndarray) -> np.ndarray:
    """Pack a complex matrix into real parameters."""
    return np.concatenate([matrix.real.ravel(), matrix.imag.ravel()])


class Interval:
    """The interval [X ∩ Y, X + Y]_k in which X_k(X, Y) lives.

    Attrs:
        common: X ∩ Y.
        span: orthonormal basis Q of (X + Y) ⊖ (X ∩ Y).
        total: P_X + P_Y.
        free: dimension d = k − dim(X ∩ Y) of the varying part.
    """

    def __init__(self, first: Frame, second: Frame):
        """Initialize the interval of a pair.

        Args:
            first: X.
            second: Y.
        """
        check_same_rank(first, second)
        self.rank = first.rank
        self.common = meet(first, second)
        joined = join(first, second).columns
        if self.common.rank:
            joined = joined @ scipy.linalg.null_space(self.common.columns.conj().T @ joined)
        self.span = joined
        self.total = projection_of(first) + projection_of(second)
        self.free = first.rank - self.common.rank
        self._common_projection = projection_of(self.common)

    @property
    def size(self) -> int:
        """Dimension q of (X + Y) ⊖ (X ∩ Y)."""
        return int(self.span.shape[1])

    @property
    def tangent_dim(self) -> int:
        """Real dimension 2d(q − d) of the interval."""
        return 2 * self.free * (self.size - self.free)

    def projection(self, coefficients: np.ndarray) -> np.ndarray:
        """Return P_Z for Z = (X ∩ Y) ⊕ span(Q·M).

        Args:
            coefficients: the q×d matrix M.

        Returns:
            The projection.
        """
        vectors = self.span @ coefficients
        gram = vectors.conj().T @ vectors
        return self._common_projection + vectors @ np.linalg.solve(gram, vectors.conj().T)

    def defect(self, coefficients: np.ndarray) -> np.ndarray:
        """Return the idempotency defect A² − A of A = P_X + P_Y − P_Z.

        Args:
            coefficients: the q×d matrix M.

        Returns:
            The defect matrix.
        """
        remainder = self.total - self.projection(coefficients)
        return remainder @ remainder - remainder

    def frame(self, coefficients: np.ndarray) -> Frame:
        """Return Z for the coefficients M.

        Args:
            coefficients: the q×d matrix M.

        Returns:
            The frame of Z.
        """
        return orthonormalize(np.hstack([self.common.columns, self.span @ coefficients]))

    def coefficients(self, frame: Frame) -> np.ndarray:
        """Return orthonormal coefficients B with Z = (X ∩ Y) ⊕ span(Q·B).

        Args:
            frame: a member Z of the interval.

        Returns:
            The q×d matrix B.
        """
        left, _, _ = scipy.linalg.svd(self.span.conj().T @ frame.columns, full_matrices=False)
        return left[:, : self.free]

    def random_member(self, rng: np.random.Generator) -> Frame:
        """Draw a random element of the interval.

        Args:
            rng: the random generator.

        Returns:
            (X ∩ Y) ⊕ a random d-dimensional subspace of Q.
        """
        return self.frame(random_frame(self.size, self.free, rng).columns)

    def settle(self, start: np.ndarray) -> np.ndarray:
        """Run Levenberg–Marquardt on the idempotency defect from a starting M.

        Args:
            start: the initial q×d matrix M.

        Returns:
            The final coefficients.
        """
        rows, columns = start.shape
        result = least_squares(
            lambda values: _pack(self.defect(_split(values, rows, columns))),
            _pack(start),
            method="lm",
            xtol=_SOLVER_TOL,
            ftol=_SOLVER_TOL,
            gtol=_SOLVER_TOL,
        )
        return _split(result.x, rows, columns)


def xset_contains(
    first: Frame, second: Frame, candidate: Frame, tol: float = PROJECTION_TOL
) -> bool:
    """Test whether P_X + P_Y − P_Z is a rank k projection.

    Args:
        first: X.
        second: Y.
        candidate: Z.
        tol: tolerance of the projection test.

    Returns:
        Whether Z ∈ X_k(X, Y).

    Raises:
        RankMismatchError: if the ranks differ.
    """
    check_same_rank(first, second)
    check_same_rank(first, candidate)
    remainder = projection_of(first) + projection_of(second) - projection_of(candidate)
    test = is_projection(remainder, tol)
    return test.is_projection and test.rank == first.rank


def complementary_member(first: Frame, second: Frame, member: Frame) -> Frame:
    """Return the member Z' with P_Z' = P_X + P_Y − P_Z.

    Args:
        first: X.
        second: Y.
        member: Z.

    Returns:
        Z'.

    Raises:
        NotAMemberError: if Z is not a member.
    """
    if not xset_contains(first, second, member):
        raise NotAMemberError("Frame is not a member of X_k(X, Y)")
    remainder = projection_of(first) + projection_of(second) - projection_of(member)
    return image_of_projection(remainder)


def random_interval_member(first: Frame, second: Frame, rng: np.random.Generator) -> Frame:
    """Draw a random element of [X ∩ Y, X + Y]_k.

    Args:
        first: X.
        second: Y.
        rng: the random generator.

    Returns:
        A rank k subspace between X ∩ Y and X + Y.
    """
    return Interval(first, second).random_member(rng)


def xset_sample(
    first: Frame, second: Frame, count: int, seed: int, tol: float = PROJECTION_TOL
) -> XSetSample:
    """Find members of X_k(X, Y) by seeded local search.

    Each requested point gets up to LOCAL_SEARCH_RESTARTS random starts; the
    first converged start that passes membership is kept.

    Args:
        first: X.
        second: Y.
        count: number of points requested.
        seed: search seed.
        tol: membership tolerance.

    Returns:
        The verified members, possibly fewer than requested.
    """
    interval = Interval(first, second)
    if interval.free == 0:
        return XSetSample(x=first, y=second, points=[first], seed=seed)
    rng = np.random.default_rng(seed)
    points: typing.List[Frame] = []
    shape = (interval.size, interval.free)
    for index in range(count):
        for _ in range(LOCAL_SEARCH_RESTARTS):
            start = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            try:
                candidate = interval.frame(interval.settle(start))
            except (RankDeficientError, np.linalg.LinAlgError):
                continue
            if xset_contains(first, second, candidate, tol):
                points.append(candidate)
                break
        else:
            logger.debug(
                "No member found for point %d after %d restarts", index, LOCAL_SEARCH_RESTARTS
            )
    logger.info("Found %d of %d requested members", len(points), count)
    return XSetSample(x=first, y=second, points=points, seed=seed)


def _jacobian_nullity(interval: Interval, base: np.ndarray) -> int:
    """Count tangent directions annihilated by the linearized defect."""
    complement = scipy.linalg.null_space(base.conj().T)
    rows, columns = complement.shape[1], interval.free
    point = interval.span @ base
    remainder = interval.total - interval.projection(base)
    jacobian = []
    for direction in np.eye(2 * rows * columns):
        tangent = interval.span @ complement @ _split(direction, rows, columns)
        variation = tangent @ point.conj().T + point @ tangent.conj().T
        jacobian.append(_pack(variation - remainder @ variation - variation @ remainder))
    singular = scipy.linalg.svd(np.array(jacobian).T, compute_uv=False)
    return int(np.count_nonzero(singular <= JACOBIAN_TOL))


def _pca_dimension(
    interval: Interval, base: np.ndarray, rng: np.random.Generator, tol: float
) -> int:
    """Count significant principal components of members near a point."""
    complement = scipy.linalg.null_space(base.conj().T)
    rows, columns = complement.shape[1], interval.free
    count = 4 * interval.tangent_dim + 8
    offsets = []
    for _ in range(count):
        step = rng.standard_normal((rows, columns)) + 1j * rng.standard_normal((rows, columns))
        step *= PCA_RADIUS / np.linalg.norm(step)
        settled = interval.settle(base + complement @ step)
        if np.linalg.norm(interval.defect(settled)) > tol:
            continue
        # graph chart coordinates around the base point
        chart = (complement.conj().T @ settled) @ np.linalg.inv(base.conj().T @ settled)
        offsets.append(_pack(chart))
    if not offsets:
        return 0
    singular = scipy.linalg.svd(np.array(offsets), compute_uv=False)
    return int(np.count_nonzero(singular > PCA_RATIO * singular[0])) if singular[0] else 0


def estimate_local_dimension(
    first: Frame, second: Frame, at: Frame, tol: float = PROJECTION_TOL, seed: int = 1
) -> LocalDimension:
    """Estimate the dimension of X_k(X, Y) near a member with two methods.

    The first is the nullity of the linearized idempotency defect on the
    tangent space of the interval. The second counts principal components of
    members obtained by pushing small random perturbations back onto the set.

    Args:
        first: X.
        second: Y.
        at: the member Z.
        tol: membership tolerance.
        seed: seed of the perturbations.

    Returns:
        Both estimates.

    Raises:
        NotAMemberError: if Z is not a member.
    """
    if not xset_contains(first, second, at, tol):
        raise NotAMemberError("Local dimension is only defined at members of X_k(X, Y)")
    interval = Interval(first, second)
    if interval.tangent_dim == 0:
        return LocalDimension(jacobian=0, pca=0)
    base = interval.coefficients(at)
    estimate = LocalDimension(
        jacobian=_jacobian_nullity(interval, base),
        pca=_pca_dimension(interval, base, np.random.default_rng(seed), tol),
    )
    logger.debug("Local dimension estimates %s", estimate)
    return estimate


def xset_local_dimension(
    first: Frame, second: Frame, at: Frame, tol: float = PROJECTION_TOL, seed: int = 1
) -> int:
    """Return the local dimension of X_k(X, Y) at a member.

    Args:
        first: X.
        second: Y.
        at: the member Z.
        tol: membership tolerance.
        seed: seed of the perturbations.

    Returns:
        The dimension on which both estimators agree.

    Raises:
        EstimatorDisagreementError: if the estimators give different integers.
    """
    estimate = estimate_local_dimension(first, second, at, tol, seed)
    if not estimate.agreed:
        logger.warning("Local dimension estimators disagree: %s", estimate)
        raise EstimatorDisagreementError(
            f"Jacobian nullity {estimate.jacobian} differs from PCA rank {estimate.pca}"
        )
    return estimate.jacobian


def geher_classify(
    first: Frame, second: Frame, tol: float = PROJECTION_TOL, seed: int = 1
) -> GeherClass:
    """Classify the shape of X_k(X, Y) and cross-check the verdict.

    Args:
        first: X.
        second: Y.
        tol: membership tolerance.
        seed: seed of the cross-checks.

    Returns:
        The class.

    Raises:
        CrossValidationError: if the cross-check contradicts the verdict.
    """
    check_same_rank(first, second)
    if is_compatible(first, second):
        rng = np.random.default_rng(seed)
        interval = Interval(first, second)
        for _ in range(INTERVAL_PROBES):
            if not xset_contains(first, second, interval.random_member(rng), tol):
                raise CrossValidationError("A compatible pair misses an element of its interval")
        return GeherClass.COMPATIBLE_FULL_INTERVAL
    if is_adjacent(first, second):
        try:
            dimension = xset_local_dimension(first, second, first, tol, seed)
        except EstimatorDisagreementError as exc:
            logger.exception("Local dimension failed for a non-compatible adjacent pair")
            raise CrossValidationError("Local dimension estimators disagree") from exc
        if dimension != 1:
            raise CrossValidationError(f"Expected a curve, found local dimension {dimension}")
        return GeherClass.NON_COMPATIBLE_ADJACENT_CURVE
    return GeherClass.OTHER
