# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

# pylint: disable=invalid-name

"""Projection-preserving operator constructions and their condition checkers.

Operators are real matrices acting on the canonical Hermitian coordinates of
hermitian.py. Constructions evaluate a matrix function on every basis element
and collect the image coordinates column by column.
"""

import logging
import typing

import numpy as np
import scipy.linalg
from scipy.spatial.distance import pdist
from scipy.stats import unitary_group

from constants import INJECTIVITY_GAP, ISOMETRY_TOL, MAX_WITNESSES, PROJECTION_TOL, TOL_SYM
from exceptions import (
    BadRankError,
    DimensionMismatchError,
    InvalidParameterError,
    NotAnIsometryError,
    NotAProjectionError,
    NotOrthogonalError,
    PreconditionViolatedError,
)
from hermitian import HermitianOperator, from_coords, hermitian_basis, is_projection, real_coords
from lab_types import Condition, ConditionReport, Frame, OperatorMap, SemilinearMap, Sigma, Witness
from subspaces import image_of_projection, meet, orthonormalize, projection_of, random_frame

logger = logging.getLogger(__name__)

MatrixFunction = typing.Callable[[np.ndarray], np.ndarray]
Seed = typing.Union[int, np.random.Generator]


def _tabulate(
    n: int,
    n_prime: int,
    function: MatrixFunction,
    k: typing.Optional[int] = None,
    m: typing.Optional[int] = None,
) -> OperatorMap:
    """Build the coordinate matrix of a real-linear function of Hermitian matrices."""
    images = np.stack([function(element) for element in hermitian_basis(n)])
    if images.shape[1:] != (n_prime, n_prime):
        raise DimensionMismatchError(f"Function does not map into {n_prime}×{n_prime} matrices")
    return OperatorMap(n=n, n_prime=n_prime, k=k, m=m, matrix=real_coords(images).T)


def _twist(matrix: np.ndarray, sigma: Sigma) -> np.ndarray:
    """Apply the field automorphism entrywise."""
    return matrix.conj() if sigma is Sigma.CONJUGATION else matrix


def _check_isometry(isometry: SemilinearMap) -> None:
    """Raise unless the map has orthonormal columns."""
    defect = isometry.isometry_defect()
    if defect > ISOMETRY_TOL:
        raise NotAnIsometryError(f"Map is not an isometry (‖U†U − I‖_F = {defect:.3e})")


def identity_map(n: int) -> OperatorMap:
    """Return the identity operator on n×n Hermitian matrices.

    Args:
        n: the dimension.

    Returns:
        The identity.
    """
    return OperatorMap(n=n, n_prime=n, matrix=np.eye(n * n))


def scale(operator: OperatorMap, factor: float) -> OperatorMap:
    """Multiply an operator by a real factor.

    Args:
        operator: L.
        factor: c.

    Returns:
        c·L, without rank metadata.
    """
    return OperatorMap(n=operator.n, n_prime=operator.n_prime, matrix=factor * operator.matrix)


def compose(outer: OperatorMap, inner: OperatorMap) -> OperatorMap:
    """Compose two operators.

    Args:
        outer: L₁.
        inner: L₂.

    Returns:
        L₁ ∘ L₂.

    Raises:
        DimensionMismatchError: if L₂ does not land where L₁ starts.
    """
    if inner.n_prime != outer.n:
        raise DimensionMismatchError(
            f"Cannot compose a map from C^{outer.n} after a map into C^{inner.n_prime}"
        )
    return OperatorMap(
        n=inner.n,
        n_prime=outer.n_prime,
        k=inner.k,
        m=outer.m,
        matrix=outer.matrix @ inner.matrix,
    )


def apply(operator: OperatorMap, matrix: HermitianOperator) -> HermitianOperator:
    """Apply an operator to a Hermitian matrix or a stack of them.

    Args:
        operator: L.
        matrix: A, of shape (n, n) or (..., n, n).

    Returns:
        L(A).

    Raises:
        DimensionMismatchError: if A is not n×n.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim < 2 or matrix.shape[-2:] != (operator.n, operator.n):
        raise DimensionMismatchError(
            f"Operator acts on {operator.n}×{operator.n} matrices, got shape {matrix.shape}"
        )
    return from_coords(real_coords(matrix) @ operator.matrix.T)


def conjugation_operator(
    isometry: SemilinearMap,
    padding: typing.Optional[Frame] = None,
    k: typing.Optional[int] = None,
) -> OperatorMap:
    """Tabulate A ↦ U·σ(A)·U† + k⁻¹·tr(A)·P_W without validating U or W.

    Args:
        isometry: U.
        padding: W, none meaning the zero subspace.
        k: the source projection rank, required when W is nonzero.

    Returns:
        The operator.
    """
    matrix, sigma = isometry.matrix, isometry.sigma
    extra = 0 if padding is None else padding.rank
    if extra:
        padding_projection = projection_of(typing.cast(Frame, padding)) / typing.cast(int, k)
    else:
        padding_projection = np.zeros((isometry.target_dim, isometry.target_dim))
    return _tabulate(
        isometry.source_dim,
        isometry.target_dim,
        lambda a: matrix @ _twist(a, sigma) @ matrix.conj().T + np.trace(a) * padding_projection,
        k=k,
        m=None if k is None else k + extra,
    )


def make_L_U(isometry: SemilinearMap, k: typing.Optional[int] = None) -> OperatorMap:  # noqa: N802
    """Build the conjugation A ↦ U·A·U† (or U·Ā·U† for a conjugate-linear U).

    Args:
        isometry: U.
        k: source projection rank to record, if known.

    Returns:
        The operator, sending P_X to P_U(X).

    Raises:
        NotAnIsometryError: if U is not an isometry.
    """
    _check_isometry(isometry)
    return conjugation_operator(isometry, k=k)


def make_L_perp(k: int, n: int) -> OperatorMap:  # noqa: N802
    """Build the orthocomplementation A ↦ k⁻¹·tr(A)·I − A.

    Args:
        k: the source projection rank.
        n: the dimension.

    Returns:
        The operator, sending rank k projections onto their complements.

    Raises:
        BadRankError: unless 0 < k < n.
    """
    if not 0 < k < n:
        raise BadRankError(f"Orthocomplementation needs 0 < k < n, got k={k}, n={n}")
    identity = np.eye(n)
    return _tabulate(n, n, lambda a: np.trace(a) / k * identity - a, k=k, m=n - k)


def make_L_UW(isometry: SemilinearMap, padding: Frame, k: int) -> OperatorMap:  # noqa: N802
    """Build A ↦ U·A·U† + k⁻¹·tr(A)·P_W for W orthogonal to the range of U.

    The first term lives on the complement of W, so the map acts as the
    conjugation there and as k⁻¹·tr(A) on W.

    Args:
        isometry: U, from C^n into C^n'.
        padding: W inside C^n'.
        k: the source projection rank.

    Returns:
        The operator, sending P_X to the projection on U(X) ⊕ W.

    Raises:
        BadRankError: if k is not positive.
        DimensionMismatchError: if U and W live in different spaces.
        NotOrthogonalError: if W is not orthogonal to the range of U.
    """
    if k < 1:
        raise BadRankError(f"Projection rank must be positive, got {k}")
    if padding.ambient_dim != isometry.target_dim:
        raise DimensionMismatchError(
            f"W lives in C^{padding.ambient_dim} but U maps into C^{isometry.target_dim}"
        )
    _check_isometry(isometry)
    overlap = float(np.linalg.norm(padding.columns.conj().T @ isometry.matrix))
    if overlap > TOL_SYM:
        raise NotOrthogonalError(f"W is not orthogonal to the range of U ({overlap:.3e})")
    return conjugation_operator(isometry, padding, k)


def make_trace_collapse(projection: HermitianOperator, k: int) -> OperatorMap:
    """Build A ↦ k⁻¹·tr(A)·P, sending every rank k projection to P.

    Args:
        projection: P.
        k: the source projection rank.

    Returns:
        The operator.

    Raises:
        NotAProjectionError: if P is not a projection.
        BadRankError: if k is not positive.
    """
    if k < 1:
        raise BadRankError(f"Projection rank must be positive, got {k}")
    projection = np.asarray(projection, dtype=complex)
    test = is_projection(projection, PROJECTION_TOL)
    if not test.is_projection:
        raise NotAProjectionError("Collapse target is not a projection")
    n = len(projection)
    return _tabulate(n, n, lambda a: np.trace(a) / k * projection, k=k, m=test.rank)


def make_direct_sum(first: OperatorMap, second: OperatorMap) -> OperatorMap:
    """Build A ↦ L₁(A) ⊕ L₂(A) on the orthogonal sum of both targets.

    Args:
        first: L₁.
        second: L₂, on the same source.

    Returns:
        The block diagonal operator.

    Raises:
        DimensionMismatchError: if the sources differ.
    """
    if first.n != second.n:
        raise DimensionMismatchError(f"Sources C^{first.n} and C^{second.n} differ")
    m = first.m + second.m if first.m is not None and second.m is not None else None
    return _tabulate(
        first.n,
        first.n_prime + second.n_prime,
        lambda a: scipy.linalg.block_diag(apply(first, a), apply(second, a)),
        k=first.k,
        m=m,
    )


def make_lookup_map(
    inputs: typing.Sequence[HermitianOperator], outputs: typing.Sequence[HermitianOperator]
) -> OperatorMap:
    """Build the minimum norm linear operator reproducing a table of values.

    Args:
        inputs: Hermitian matrices A_i, linearly independent for an exact fit.
        outputs: Hermitian matrices L(A_i).

    Returns:
        The least squares operator.

    Raises:
        DimensionMismatchError: if the table is empty or ragged.
    """
    if not inputs or len(inputs) != len(outputs):
        raise DimensionMismatchError("Lookup table needs matching nonempty inputs and outputs")
    source = real_coords(np.stack(inputs))
    target = real_coords(np.stack(outputs))
    solution, *_ = scipy.linalg.lstsq(source, target)
    return OperatorMap(n=len(inputs[0]), n_prime=len(outputs[0]), matrix=solution.T)


def random_isometry(
    n: int, n_prime: int, seed: Seed, sigma: Sigma = Sigma.IDENTITY
) -> SemilinearMap:
    """Draw a Haar random isometry of C^n into C^n'.

    Args:
        n: source dimension.
        n_prime: target dimension.
        seed: seed or random generator.
        sigma: the field automorphism to attach.

    Returns:
        The first n columns of a Haar random unitary.

    Raises:
        InvalidParameterError: if n exceeds n'.
    """
    if not 1 <= n <= n_prime:
        raise InvalidParameterError(f"No isometry from C^{n} into C^{n_prime}")
    rng = np.random.default_rng(seed)
    if n_prime == 1:
        unitary = np.exp(2j * np.pi * rng.random((1, 1)))
    else:
        unitary = unitary_group.rvs(n_prime, random_state=rng)
    return SemilinearMap(matrix=unitary[:, :n], sigma=sigma)


def semilinear_image(isometry: SemilinearMap, frame: Frame) -> Frame:
    """Return the image U(X) of a subspace.

    Args:
        isometry: U.
        frame: X.

    Returns:
        The span of U applied to the columns of X.
    """
    return orthonormalize(isometry.apply(frame.columns))


def is_invertible(operator: OperatorMap) -> bool:
    """Test whether an operator is invertible as a real linear map.

    Args:
        operator: L.

    Returns:
        Whether the matrix is square and of full rank.
    """
    rows, columns = operator.matrix.shape
    return rows == columns and int(np.linalg.matrix_rank(operator.matrix)) == columns


def rank_bound_holds(n: int, k: int, m: typing.Optional[int]) -> bool:
    """Check that k ≤ m whenever n ≥ 2k.

    Args:
        n: source dimension.
        k: source projection rank.
        m: inferred target projection rank.

    Returns:
        Whether the bound holds, vacuously true when n < 2k or m is unknown.
    """
    return n < 2 * k or m is None or k <= m


def random_rank_k_projection(n: int, k: int, seed: Seed) -> HermitianOperator:
    """Draw a Haar random rank k projection on C^n.

    Args:
        n: the dimension.
        k: the rank.
        seed: seed or random generator.

    Returns:
        The projection onto the span of a complex Gaussian n×k matrix.

    Raises:
        BadRankError: unless 0 < k ≤ n.
    """
    if not 0 < k <= n:
        raise BadRankError(f"Cannot draw a rank {k} projection on C^{n}")
    return projection_of(random_frame(n, k, np.random.default_rng(seed)))


def _probe_projections(
    n: int,
    k: int,
    samples: int,
    seed: int,
    probes: typing.Optional[typing.Sequence[HermitianOperator]],
) -> np.ndarray:
    """Return the explicit probes, or `samples` random rank k projections."""
    if probes is not None:
        return np.stack([np.asarray(probe, dtype=complex) for probe in probes])
    rng = np.random.default_rng(seed)
    return np.stack([random_rank_k_projection(n, k, rng) for _ in range(samples)])


def _report(
    condition: Condition,
    samples: int,
    seed: int,
    witnesses: typing.List[Witness],
    inferred_m: typing.Optional[int] = None,
) -> ConditionReport:
    """Assemble a report and log the verdict."""
    report = ConditionReport(
        condition=condition,
        samples=samples,
        seed=seed,
        passed=not witnesses,
        witnesses=witnesses[:MAX_WITNESSES],
        inferred_m=inferred_m,
    )
    logger.info(
        "%s %s at %d samples (%d counterexamples)",
        condition.value,
        "passed" if report.passed else "failed",
        samples,
        len(witnesses),
    )
    return report


def check_L1(  # noqa: N802
    operator: OperatorMap,
    k: int,
    samples: int,
    seed: int,
    tol: float,
    probes: typing.Optional[typing.Sequence[HermitianOperator]] = None,
) -> ConditionReport:
    """Check that rank k projections go to projections of one constant rank m ≥ 1.

    Args:
        operator: L.
        k: source projection rank.
        samples: number of random projections.
        seed: sampler seed.
        tol: tolerance of the idempotency test.
        probes: explicit projections to use instead of random ones.

    Returns:
        The report, m inferred from the first sample.

    Raises:
        InvalidParameterError: if samples is below 1.
    """
    if samples < 1 and probes is None:
        raise InvalidParameterError(f"L1 needs at least one sample, got {samples}")
    inputs = _probe_projections(operator.n, k, samples, seed, probes)
    images = apply(operator, inputs)
    witnesses: typing.List[Witness] = []
    inferred_m: typing.Optional[int] = None
    for index, (projection, image) in enumerate(zip(inputs, images)):
        test = is_projection(image, tol)
        if index == 0 and test.is_projection and test.rank:
            inferred_m = test.rank
        if not test.is_projection:
            note = "image is not a projection"
        elif not test.rank:
            note = "image is the zero projection"
        elif test.rank != inferred_m:
            note = f"image has rank {test.rank}, expected {inferred_m}"
        else:
            continue
        logger.debug("L1 counterexample at sample %d: %s", index, note)
        witnesses.append(Witness(inputs=[projection], note=note))
    return _report(Condition.L1, len(inputs), seed, witnesses, inferred_m)


def check_L2(  # noqa: N802
    operator: OperatorMap,
    k: int,
    samples: int,
    seed: int,
    tol: float,
    probes: typing.Optional[typing.Sequence[HermitianOperator]] = None,
) -> ConditionReport:
    """Check injectivity on sampled pairs of distinct rank k projections.

    Pairs closer than the injectivity gap count as equal and are skipped.

    Args:
        operator: L.
        k: source projection rank.
        samples: number of random projections.
        seed: sampler seed.
        tol: smallest image difference counted as distinct.
        probes: explicit projections to use instead of random ones.

    Returns:
        The report.

    Raises:
        InvalidParameterError: if samples is below 2.
    """
    if samples < 2 and probes is None:
        raise InvalidParameterError(f"L2 needs at least two samples, got {samples}")
    inputs = _probe_projections(operator.n, k, samples, seed, probes)
    # the canonical basis is orthonormal, so coordinate distances are Frobenius distances
    input_gaps = pdist(real_coords(inputs))
    image_gaps = pdist(real_coords(apply(operator, inputs)))
    rows, columns = np.triu_indices(len(inputs), 1)
    witnesses = [
        Witness(
            inputs=[inputs[rows[pair]], inputs[columns[pair]]],
            note=f"distinct inputs (gap {input_gaps[pair]:.3e}) share an image",
        )
        for pair in np.flatnonzero((input_gaps > INJECTIVITY_GAP) & (image_gaps <= tol))
    ]
    return _report(Condition.L2, len(inputs), seed, witnesses)


def check_L3(  # noqa: N802
    operator: OperatorMap,
    k: int,
    m: int,
    samples: int,
    seed: int,
    tol: float,
    probes: typing.Optional[typing.Sequence[HermitianOperator]] = None,
) -> ConditionReport:
    """Check that images of two rank k projections meet in dimension at least m − k.

    Args:
        operator: L.
        k: source projection rank.
        m: target projection rank.
        samples: number of random projections.
        seed: sampler seed.
        tol: tolerance of the projection test on images.
        probes: explicit projections to use instead of random ones.

    Returns:
        The report, vacuously passed when m ≤ k.

    Raises:
        InvalidParameterError: if samples is below 2.
        PreconditionViolatedError: if an image is not a rank m projection.
    """
    if samples < 2 and probes is None:
        raise InvalidParameterError(f"L3 needs at least two samples, got {samples}")
    inputs = _probe_projections(operator.n, k, samples, seed, probes)
    frames = []
    for image in apply(operator, inputs):
        try:
            frame = image_of_projection(image, tol)
        except NotAProjectionError as exc:
            logger.exception("L3 precondition failed")
            raise PreconditionViolatedError("L3 needs images that are projections") from exc
        if frame.rank != m:
            raise PreconditionViolatedError(f"L3 needs rank {m} images, got rank {frame.rank}")
        frames.append(frame)
    witnesses: typing.List[Witness] = []
    if m > k:
        for first, second in zip(*np.triu_indices(len(frames), 1)):
            shared = meet(frames[first], frames[second]).rank
            if shared < m - k:
                witnesses.append(
                    Witness(
                        inputs=[inputs[first], inputs[second]],
                        note=f"images meet in dimension {shared} < {m - k}",
                    )
                )
    return _report(Condition.L3, len(inputs), seed, witnesses, m)
