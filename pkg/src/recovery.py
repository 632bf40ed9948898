# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Decomposition of projection-preserving operators.

An operator sending rank k projections to rank m projections induces a map f
between Grassmannians. Star intersections descend f level by level down to a
map of lines f_1, whose common part W is split off; what remains is a map of
lines that a semilinear isometry U reproduces. The assembled model is checked
against the operator on fresh probes and entrywise.
"""

import functools
import logging
import typing

import numpy as np
import scipy.linalg

from constants import (
    CLASSIFY_TOL,
    DESCENT_SAMPLES,
    IMAGE_GAP_TOL,
    INJECTIVITY_GAP,
    MATRIX_DIFFERENCE_TOL,
    PROJECTION_TOL,
    RANK_TOL,
    RESIDUAL_PROBES,
    SEMILINEAR_PROBES,
    SIGMA_TOL,
    W_PROBES,
)
from exceptions import (
    ImageNotProjectionError,
    InconsistentStarImagesError,
    InvalidParameterError,
    NotAProjectionError,
    NotSemilinearError,
    PreconditionViolatedError,
    RankMismatchError,
    SigmaAmbiguousError,
    UnstableIntersectionError,
    WignerLabError,
)
from grassmann_graph import (
    distance,
    is_ortho_adjacent,
    random_compatible_pair,
    random_pair_at_distance,
)
from lab_types import (
    Classification,
    ConditionReport,
    Frame,
    OperatorMap,
    RelationReport,
    SemilinearMap,
    Sigma,
    Tag,
    VerificationReport,
)
from subspaces import (
    contains,
    gap_distance,
    image_of_projection,
    is_compatible,
    meet,
    ortho_complement,
    orthonormalize,
    projection_of,
    random_frame,
)
from wigner_maps import (
    apply,
    check_L1,
    check_L2,
    check_L3,
    compose,
    conjugation_operator,
    make_L_perp,
    make_L_U,
    make_L_UW,
    random_rank_k_projection,
    rank_bound_holds,
)
from xset import random_interval_member, xset_contains

logger = logging.getLogger(__name__)

InducedMap = typing.Callable[[Frame], Frame]


class _Fit(typing.NamedTuple):
    """A model fitted to an operator."""

    tag: Tag
    model: OperatorMap
    isometry: SemilinearMap
    padding: typing.Optional[Frame]


class _Attempt(typing.NamedTuple):
    """Outcome of one classification branch."""

    fit: typing.Optional[_Fit]
    residual: typing.Optional[float]
    matrix_difference: typing.Optional[float]
    detail: str


def induced_map(
    operator: OperatorMap, k: int, m: typing.Optional[int] = None, tol: float = PROJECTION_TOL
) -> InducedMap:
    """Return the map f with L(P_X) = P_f(X) on rank k subspaces.

    Args:
        operator: L.
        k: source rank.
        m: expected image rank, unchecked when omitted.
        tol: tolerance of the projection test.

    Returns:
        The induced map.
    """

    def image(frame: Frame) -> Frame:
        """Map a rank k subspace through the operator.

        Args:
            frame: X.

        Returns:
            f(X).

        Raises:
            RankMismatchError: if X does not have rank k.
            ImageNotProjectionError: if L(P_X) is not a rank m projection.
        """
        if frame.rank != k or frame.ambient_dim != operator.n:
            raise RankMismatchError(f"Induced map acts on rank {k} subspaces of C^{operator.n}")
        try:
            result = image_of_projection(apply(operator, projection_of(frame)), tol)
        except NotAProjectionError as exc:
            logger.exception("Operator image is not a projection")
            raise ImageNotProjectionError("L(P_X) is not a projection") from exc
        if m is not None and result.rank != m:
            raise ImageNotProjectionError(f"L(P_X) has rank {result.rank}, expected {m}")
        return result

    return image


def _intersect(frames: typing.Iterable[Frame]) -> Frame:
    """Intersect a nonempty family of subspaces."""
    return functools.reduce(meet, frames)


def _star_meet(
    images: typing.Sequence[Frame], samples: int, level: int, rank: typing.Optional[int]
) -> Frame:
    """Meet two disjoint halves of a star's images, which must agree."""
    first, second = _intersect(images[:samples]), _intersect(images[samples:])
    if first.rank != second.rank or gap_distance(first, second) > IMAGE_GAP_TOL:
        raise InconsistentStarImagesError(
            f"Star samples at level {level} disagree (ranks {first.rank}, {second.rank})"
        )
    if rank is not None and first.rank != rank:
        raise InconsistentStarImagesError(
            f"Level {level} image has rank {first.rank}, expected {rank}"
        )
    return first


def _descend(
    upper: InducedMap,
    upper_level: int,
    level: int,
    samples: int,
    seed: int,
    rank: typing.Optional[int] = None,
) -> InducedMap:
    """Build f_level from f_upper_level through every level in between.

    A query draws a pool of directions orthogonal to X. The node X ⊕ span(S)
    sits at level rank X + |S| and, below the upper level, is the meet of the
    nodes X ⊕ span(S ∪ {d}) over the first 2·samples pool directions d outside
    S, split into two sets that must agree. Nodes are shared between siblings
    and evaluated once per query.

    Args:
        upper: f_upper_level.
        upper_level: rank of the inputs of upper.
        level: rank of the inputs of the result, below upper_level.
        samples: star members per sample set.
        seed: seed of the pool, restarted on every query.
        rank: expected output rank at level, unchecked when omitted; each level
            above adds one.

    Returns:
        f_level.
    """
    depth = upper_level - level
    width = depth - 1 + 2 * samples

    def lower(frame: Frame) -> Frame:
        """Map a rank level subspace.

        Args:
            frame: X.

        Returns:
            f_level(X).

        Raises:
            RankMismatchError: if X does not have rank level.
            InconsistentStarImagesError: if two sample sets disagree.
        """
        if frame.rank != level:
            raise RankMismatchError(f"Level {level} map got a rank {frame.rank} subspace")
        rng = np.random.default_rng(seed)
        complement = ortho_complement(frame).columns
        shape = (complement.shape[1], width)
        pool = complement @ (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        nodes: typing.Dict[typing.Tuple[int, ...], Frame] = {}

        def node(chosen: typing.Tuple[int, ...]) -> Frame:
            if chosen in nodes:
                return nodes[chosen]
            if len(chosen) == depth:
                result = upper(orthonormalize(np.hstack([frame.columns, pool[:, list(chosen)]])))
            else:
                free = [d for d in range(width) if d not in chosen][: 2 * samples]
                members = [node(tuple(sorted((*chosen, d)))) for d in free]
                result = _star_meet(
                    members,
                    samples,
                    level + len(chosen),
                    None if rank is None else rank + len(chosen),
                )
            nodes[chosen] = result
            return result

        return node(())

    return lower


def descend_one_level(
    upper: InducedMap,
    level: int,
    samples: int,
    seed: int,
    rank: typing.Optional[int] = None,
) -> InducedMap:
    """Build f_{i−1} from f_i by intersecting images over a star.

    f_{i−1}(X) is the intersection of f_i(Z) over random Z ⊃ X of rank i. Two
    disjoint sample sets are drawn and must agree. The random draws restart
    from the seed on every query, so the result is a function of X alone.

    Args:
        upper: f_i.
        level: i, at least 2.
        samples: star members per sample set.
        seed: seed of the star members.
        rank: expected rank m − k + i − 1 of the outputs, unchecked when omitted.

    Returns:
        f_{i−1}.

    Raises:
        InvalidParameterError: if the level is below 2.
    """
    if level < 2:
        raise InvalidParameterError(f"Cannot descend below lines (level {level})")
    return _descend(upper, level, level - 1, samples, seed, rank)


def descent_chain(
    top: InducedMap, k: int, m: int, samples: int, seed: int
) -> typing.Dict[int, InducedMap]:
    """Build the chain f_k, f_{k−1}, ..., f_1.

    Every level descends from f_k directly, reusing the images of the levels
    in between within a query rather than recomputing them per branch.

    Args:
        top: f = f_k.
        k: source rank.
        m: image rank of f_k.
        samples: star members per sample set.
        seed: base seed, offset by level.

    Returns:
        The maps by level.
    """
    chain = {k: top}
    for level in range(k - 1, 0, -1):
        chain[level] = _descend(top, k, level, samples, seed + level, m - k + level)
    return chain


def probe_line_injectivity(lines: InducedMap, n: int, samples: int, seed: int) -> bool:
    """Check that distinct random lines have distinct images.

    Args:
        lines: f_1.
        n: source dimension.
        samples: number of random lines.
        seed: seed of the lines.

    Returns:
        Whether no two distinct probes share an image.
    """
    rng = np.random.default_rng(seed)
    probes = [random_frame(n, 1, rng) for _ in range(samples)]
    images = [lines(probe) for probe in probes]
    for i in range(samples):
        for j in range(i + 1, samples):
            if gap_distance(probes[i], probes[j]) <= INJECTIVITY_GAP:
                continue
            if images[i].rank != images[j].rank:
                continue
            if gap_distance(images[i], images[j]) <= IMAGE_GAP_TOL:
                logger.info("Lines %d and %d share an image", i, j)
                return False
    return True


def extract_W(lines: InducedMap, n: int, samples: int, seed: int) -> Frame:  # noqa: N802
    """Extract the subspace W common to every f_1 image.

    Args:
        lines: f_1.
        n: source dimension.
        samples: number of random lines to intersect, at least n.
        seed: seed of the lines.

    Returns:
        W.

    Raises:
        InvalidParameterError: if samples is below n.
        UnstableIntersectionError: if a fresh line image misses W.
    """
    if samples < n:
        raise InvalidParameterError(f"W extraction needs at least {n} lines, got {samples}")
    rng = np.random.default_rng(seed)
    padding = _intersect(lines(random_frame(n, 1, rng)) for _ in range(samples))
    for _ in range(W_PROBES):
        if not contains(lines(random_frame(n, 1, rng)), padding, IMAGE_GAP_TOL):
            raise UnstableIntersectionError("A fresh line image does not contain W")
    logger.info("Extracted W of rank %d", padding.rank)
    return padding


def _line_coefficients(
    first: np.ndarray, second: np.ndarray, target: np.ndarray
) -> typing.Tuple[complex, complex]:
    """Write target as a·first + b·second, failing when it is off their plane."""
    plane = np.column_stack([first, second])
    solution, *_ = scipy.linalg.lstsq(plane, target)
    if np.linalg.norm(plane @ solution - target) > SIGMA_TOL or abs(solution[0]) <= SIGMA_TOL:
        raise NotSemilinearError("Image of a sum is not spanned by the images of its terms")
    return complex(solution[0]), complex(solution[1])


def _canonical_phase(matrix: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero entry of column 0 is real positive."""
    leading = matrix[np.flatnonzero(np.abs(matrix[:, 0]) > RANK_TOL)[0], 0]
    return matrix * (abs(leading) / leading)


def reconstruct_semilinear(
    lines: InducedMap, n: int, tol: float = PROJECTION_TOL, seed: int = 1
) -> SemilinearMap:
    """Recover the semilinear isometry inducing a map of lines.

    Column j is a representative of g([e_j]) rescaled so that g([e_0 + e_j])
    is spanned by u_0 + u_j. The image of [e_0 + i·e_1] then fixes sigma, and
    the nearest isometry is taken by polar decomposition.

    Args:
        lines: g, sending lines of C^n to lines.
        n: source dimension.
        tol: gap tolerance of the validation probes.
        seed: seed of the validation probes.

    Returns:
        U with the canonical phase.

    Raises:
        NotSemilinearError: if g is not induced by a semilinear injection.
        SigmaAmbiguousError: if the probe ratio is neither i nor −i.
    """

    def representative(vector: np.ndarray) -> np.ndarray:
        image = lines(orthonormalize(vector))
        if image.rank != 1:
            raise NotSemilinearError(f"A line is sent to a rank {image.rank} subspace")
        return image.columns[:, 0]

    basis = np.eye(n, dtype=complex)
    columns = [representative(basis[:, 0])]
    for j in range(1, n):
        candidate = representative(basis[:, j])
        first, second = _line_coefficients(
            columns[0], candidate, representative(basis[:, 0] + basis[:, j])
        )
        columns.append(candidate * second / first)
    sigma = Sigma.IDENTITY
    if n > 1:
        first, second = _line_coefficients(
            columns[0], columns[1], representative(basis[:, 0] + 1j * basis[:, 1])
        )
        ratio = second / first
        if abs(ratio + 1j) <= SIGMA_TOL:
            sigma = Sigma.CONJUGATION
        elif abs(ratio - 1j) > SIGMA_TOL:
            raise SigmaAmbiguousError(f"Probe ratio {ratio:.6f} is neither i nor -i")
    matrix = np.column_stack(columns)
    singular = scipy.linalg.svd(matrix, compute_uv=False)
    if singular[-1] <= RANK_TOL * singular[0]:
        raise NotSemilinearError("Line representatives are linearly dependent")
    unitary, _ = scipy.linalg.polar(matrix)
    isometry = SemilinearMap(matrix=_canonical_phase(unitary), sigma=sigma)
    rng = np.random.default_rng(seed)
    for _ in range(SEMILINEAR_PROBES):
        probe = random_frame(n, 1, rng)
        if gap_distance(lines(probe), orthonormalize(isometry.apply(probe.columns))) > tol:
            raise NotSemilinearError("Reconstructed map misses a probe line")
    logger.info("Reconstructed a %s isometry C^%d -> C^%d", sigma.value, n, isometry.target_dim)
    return isometry


def _restrict_to(isometry: SemilinearMap, complement: Frame) -> SemilinearMap:
    """Project U onto a subspace and return the nearest isometry."""
    projected = complement.columns @ (complement.columns.conj().T @ isometry.matrix)
    unitary, _ = scipy.linalg.polar(projected)
    return SemilinearMap(matrix=_canonical_phase(unitary), sigma=isometry.sigma)


def _fit_augmented(operator: OperatorMap, k: int, m: int, tol: float, seed: int) -> _Fit:
    """Fit A ↦ U·σ(A)·U† + k⁻¹·tr(A)·P_W through the descent chain."""
    n = operator.n
    chain = descent_chain(induced_map(operator, k, m), k, m, DESCENT_SAMPLES, seed)
    lines = chain[1]
    if not probe_line_injectivity(lines, n, n + 1, seed + 1):
        raise NotSemilinearError("f_1 is not injective on probe lines")
    padding = extract_W(lines, n, n, seed + 2)
    if padding.rank != m - k:
        raise UnstableIntersectionError(f"W has rank {padding.rank}, expected {m - k}")
    if padding.rank == 0:
        isometry = reconstruct_semilinear(lines, n, tol, seed + 3)
        return _Fit(Tag.ISOMETRY_INDUCED, make_L_U(isometry, k), isometry, None)
    complement = ortho_complement(padding)
    isometry = reconstruct_semilinear(
        lambda line: meet(lines(line), complement), n, tol, seed + 3
    )
    isometry = _restrict_to(isometry, complement)
    return _Fit(Tag.W_AUGMENTED, make_L_UW(isometry, padding, k), isometry, padding)


def _fit_ortho_complement(operator: OperatorMap, k: int, tol: float, seed: int) -> _Fit:
    """Fit L = L_k^⊥ ∘ L_U for dim H = 2k."""
    perp = make_L_perp(k, operator.n)
    fit = _fit_augmented(compose(perp, operator), k, k, tol, seed)
    return _Fit(Tag.ORTHO_COMPLEMENT, compose(perp, fit.model), fit.isometry, None)


def _fit_reduced(operator: OperatorMap, k: int, tol: float, seed: int) -> _Fit:
    """Fit an m = k operator with 2k > n via L_k^⊥ ∘ L ∘ L_{n−k}^⊥ at rank n − k."""
    n = operator.n
    to_complement, from_complement = make_L_perp(k, n), make_L_perp(n - k, n)
    reduced = compose(to_complement, compose(operator, from_complement))
    fit = _fit_augmented(reduced, n - k, n - k, tol, seed)
    model = compose(from_complement, compose(fit.model, to_complement))
    return _Fit(Tag.ISOMETRY_INDUCED, model, fit.isometry, None)


def _measure(
    operator: OperatorMap, model: OperatorMap, k: int, seed: int, probes: int = RESIDUAL_PROBES
) -> typing.Tuple[float, float]:
    """Return the max probe residual and max entrywise matrix difference."""
    rng = np.random.default_rng(seed)
    inputs = np.stack([random_rank_k_projection(operator.n, k, rng) for _ in range(probes)])
    gaps = np.linalg.norm(apply(operator, inputs) - apply(model, inputs), axis=(-2, -1))
    residual = float(gaps.max())
    difference = float(np.abs(operator.matrix - model.matrix).max())
    return residual, difference


def _attempt(
    name: str,
    fit_model: typing.Callable[[], _Fit],
    operator: OperatorMap,
    k: int,
    tol: float,
    seed: int,
) -> _Attempt:
    """Run one branch and measure its model."""
    try:
        fit = fit_model()
    except WignerLabError as exc:
        logger.info("%s branch failed: %s", name, exc.msg)
        return _Attempt(None, None, None, f"{name}: {exc.msg}")
    if fit.model.n_prime != operator.n_prime:
        return _Attempt(None, None, None, f"{name}: model target dimension differs")
    residual, difference = _measure(operator, fit.model, k, seed)
    logger.info("%s branch residual %.3e, matrix difference %.3e", name, residual, difference)
    if residual > tol or difference > MATRIX_DIFFERENCE_TOL:
        detail = f"{name}: residual {residual:.3e}, matrix difference {difference:.3e}"
        return _Attempt(None, residual, difference, detail)
    return _Attempt(fit, residual, difference, "")


def _rejected(
    k: int,
    m: typing.Optional[int],
    reports: typing.List[ConditionReport],
    reason: str,
    detail: str,
    residual: typing.Optional[float] = None,
) -> Classification:
    """Build a rejection."""
    logger.info("Rejected (%s): %s", reason, detail)
    return Classification(
        tag=Tag.REJECTED,
        k=k,
        m=m,
        reports=reports,
        reason=reason,
        detail=detail,
        residual=residual,
    )


def _accepted(
    attempt: _Attempt,
    k: int,
    m: int,
    reports: typing.List[ConditionReport],
    coincidence: bool = False,
) -> Classification:
    """Build an accepted classification from a successful attempt."""
    fit = typing.cast(_Fit, attempt.fit)
    logger.info("Classified as %s", fit.tag.value)
    return Classification(
        tag=fit.tag,
        k=k,
        m=m,
        isometry=fit.isometry,
        padding=fit.padding,
        residual=attempt.residual,
        matrix_difference=attempt.matrix_difference,
        reports=reports,
        coincidence=coincidence,
    )


def _check_conditions(
    operator: OperatorMap, k: int, samples: int, seed: int, tol: float
) -> typing.Tuple[typing.List[ConditionReport], typing.Optional[Classification]]:
    """Run the three condition checks, returning a rejection at the first failure."""
    first = check_L1(operator, k, samples, seed, tol)
    reports = [first]
    if not first.passed:
        return reports, _rejected(k, None, reports, "L1", "(L1) failed")
    m = typing.cast(int, first.inferred_m)
    second = check_L2(operator, k, samples, seed, tol)
    reports.append(second)
    if not second.passed:
        return reports, _rejected(k, m, reports, "L2", "(L2) failed")
    third = check_L3(operator, k, m, samples, seed, tol)
    reports.append(third)
    if not third.passed:
        return reports, _rejected(k, m, reports, "L3", "(L3) failed")
    return reports, None


def classify_operator(
    operator: OperatorMap, k: int, samples: int, seed: int, tol: float
) -> Classification:
    """Decompose an operator into one of the known families.

    Args:
        operator: L.
        k: source projection rank.
        samples: condition check samples.
        seed: seed of every random draw.
        tol: condition tolerance and residual acceptance bound (capped at 1e-6).

    Returns:
        The classification; mathematical failures are Rejected values.
    """
    if not 0 < k <= operator.n:
        raise InvalidParameterError(f"Rank {k} is outside 1..{operator.n}")
    reports, rejection = _check_conditions(operator, k, samples, seed, tol)
    if rejection is not None:
        return rejection
    m = typing.cast(int, reports[0].inferred_m)
    logger.info("Conditions hold with k=%d, m=%d", k, m)
    n, n_prime = operator.n, operator.n_prime
    if m < k:
        detail = (
            "m < k although dim H >= 2k"
            if not rank_bound_holds(n, k, m)
            else "m < k with dim H < 2k lies outside the classified families"
        )
        return _rejected(k, m, reports, "MBelowK", detail)
    accept = min(tol, CLASSIFY_TOL)
    measure_seed = seed + 1000
    if m == k and n_prime == n and n == 2 * k:
        isometric = _attempt(
            "isometry",
            lambda: _fit_augmented(operator, k, m, tol, seed),
            operator,
            k,
            accept,
            measure_seed,
        )
        complemented = _attempt(
            "orthocomplement",
            lambda: _fit_ortho_complement(operator, k, tol, seed),
            operator,
            k,
            accept,
            measure_seed,
        )
        if isometric.fit is not None:
            if complemented.fit is not None:
                logger.warning("Both dim H = 2k branches fit, reporting the isometry branch")
            return _accepted(isometric, k, m, reports, complemented.fit is not None)
        if complemented.fit is not None:
            return _accepted(complemented, k, m, reports)
        detail = f"{isometric.detail}; {complemented.detail}"
        return _rejected(k, m, reports, "ResidualTooLarge", detail, isometric.residual)
    if m == k and n_prime == n and 2 * k > n:
        attempt = _attempt(
            "reduction",
            lambda: _fit_reduced(operator, k, tol, seed),
            operator,
            k,
            accept,
            measure_seed,
        )
    else:
        attempt = _attempt(
            "augmented",
            lambda: _fit_augmented(operator, k, m, tol, seed),
            operator,
            k,
            accept,
            measure_seed,
        )
    if attempt.fit is None:
        return _rejected(k, m, reports, "ResidualTooLarge", attempt.detail, attempt.residual)
    return _accepted(attempt, k, m, reports)


def rebuild_model(result: Classification) -> OperatorMap:
    """Rebuild the operator described by a classification, without validating U.

    Args:
        result: an accepted classification.

    Returns:
        The model operator.

    Raises:
        PreconditionViolatedError: if the classification is a rejection.
    """
    if result.tag is Tag.REJECTED or result.isometry is None:
        raise PreconditionViolatedError("Only accepted classifications describe a model")
    if result.tag is Tag.W_AUGMENTED:
        return conjugation_operator(result.isometry, result.padding, result.k)
    model = conjugation_operator(result.isometry, k=result.k)
    if result.tag is Tag.ORTHO_COMPLEMENT:
        return compose(make_L_perp(result.k, model.n_prime), model)
    return model


def verify_classification(
    operator: OperatorMap, result: Classification, probes: int = RESIDUAL_PROBES, seed: int = 1
) -> VerificationReport:
    """Re-validate a classification on fresh probes.

    Args:
        operator: L.
        result: an accepted classification of L.
        probes: number of probe projections.
        seed: seed of the probes.

    Returns:
        The residual and matrix difference of the rebuilt model.
    """
    residual, difference = _measure(operator, rebuild_model(result), result.k, seed, probes)
    accepted = residual <= CLASSIFY_TOL and difference <= MATRIX_DIFFERENCE_TOL
    logger.info("Verification residual %.3e, accepted: %s", residual, accepted)
    return VerificationReport(
        residual=residual, matrix_difference=difference, probes=probes, accepted=accepted
    )


def probe_induced_relations(
    image: InducedMap, n: int, k: int, m: int, samples: int, seed: int
) -> RelationReport:
    """Check on random pairs the relations an induced map must preserve.

    Args:
        image: f.
        n: source dimension.
        k: source rank.
        m: image rank.
        samples: pairs per relation.
        seed: seed of the pairs.

    Returns:
        Which relations held, with a description of each failure.
    """
    rng = np.random.default_rng(seed)
    failures: typing.List[str] = []
    verdicts = {"orthogonal": True, "adjacent": True, "ortho-adjacent": True, "transport": True}

    def fail(relation: str, index: int, note: str) -> None:
        verdicts[relation] = False
        failures.append(f"{relation} pair {index}: {note}")

    for index in range(samples):
        if n >= 2 * k:
            first, second = random_compatible_pair(n, k, 0, rng)
            first_image, second_image = image(first), image(second)
            shared = meet(first_image, second_image).rank
            if not is_compatible(first_image, second_image) or shared != m - k:
                fail("orthogonal", index, f"images meet in dimension {shared}")
        first, second = random_pair_at_distance(n, k, 1, rng)
        if distance(image(first), image(second)) != 1:
            fail("adjacent", index, "adjacency is not preserved")
        if min(k, n - k) >= 2:
            first, second = random_pair_at_distance(n, k, 2, rng)
            if distance(image(first), image(second)) == 1:
                fail("adjacent", index, "non-adjacent pair became adjacent")
        first, second = random_compatible_pair(n, k, k - 1, rng)
        if not is_ortho_adjacent(image(first), image(second)):
            fail("ortho-adjacent", index, "ortho-adjacency is not preserved")
        first, second = random_compatible_pair(n, k, max(0, 2 * k - n), rng)
        member = random_interval_member(first, second, rng)
        if not xset_contains(image(first), image(second), image(member)):
            fail("transport", index, "image of a member leaves X_m(f(X), f(Y))")
    return RelationReport(
        pairs=samples,
        orthogonality_law=verdicts["orthogonal"],
        adjacency_both_directions=verdicts["adjacent"],
        ortho_adjacency=verdicts["ortho-adjacent"],
        transport_inclusion=verdicts["transport"],
        failures=failures,
    )
