# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Property suites behind the verify command.

Every case draws from its own seed, derived from the run seed and the case
index, so the tallies do not depend on how cases are spread over threads.
"""

import functools
import logging
import os
import typing
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from constants import IMAGE_GAP_TOL, PROJECTION_TOL
from exceptions import InvalidParameterError, WignerLabError
from grassmann_graph import (
    build_geodesic,
    distance,
    geodesic_through_to_orthogonal,
    is_ortho_clique,
    max_compatible_in_star,
    max_compatible_in_top,
    probe_family_maximality,
    random_compatible_pair,
    random_pair_at_distance,
    random_star_member,
    random_top_member,
)
from lab_types import (
    Frame,
    GeherClass,
    OperatorMap,
    PropertyTally,
    RunConfig,
    SemilinearMap,
    Sigma,
    Star,
    SuiteScale,
    SuiteSummary,
    Tag,
    Top,
)
from recovery import classify_operator, verify_classification
from subspaces import gap_distance, is_compatible, is_orthogonal, random_frame
from wigner_maps import (
    check_L1,
    check_L2,
    check_L3,
    compose,
    make_L_perp,
    make_L_U,
    make_L_UW,
    make_trace_collapse,
    random_isometry,
    random_rank_k_projection,
    rank_bound_holds,
    scale as scale_operator,
    semilinear_image,
)
from xset import complementary_member, geher_classify, random_interval_member, xset_local_dimension

logger = logging.getLogger(__name__)

CaseResult = typing.Dict[str, bool]
Suite = typing.Callable[[RunConfig, SuiteScale], typing.Dict[str, PropertyTally]]

# classification tolerance of the round-trip families
ROUNDTRIP_TOL = 1e-8
ROUNDTRIP_LINES = 100


def _case(*names: str) -> typing.Callable[..., typing.Callable[..., CaseResult]]:
    """Mark every listed property failed when a case raises a lab error.

    Args:
        names: the properties the case reports.

    Returns:
        The decorator.
    """

    def decorate(function: typing.Callable[..., CaseResult]) -> typing.Callable[..., CaseResult]:
        """Wrap a case.

        Args:
            function: the case.

        Returns:
            The guarded case.
        """

        @functools.wraps(function)
        def run(*args: typing.Any) -> CaseResult:
            """Run the case.

            Args:
                args: the case arguments.

            Returns:
                The verdict of each property.
            """
            try:
                return function(*args)
            except WignerLabError as exc:
                logger.warning("Case %s%s raised: %s", function.__name__, args, exc.msg)
                return {name: False for name in names}

        return run

    return decorate


def case_seeds(seed: int, stream: int, count: int) -> typing.List[int]:
    """Derive independent integer seeds for a batch of cases.

    Args:
        seed: the run seed.
        stream: index of the batch within its suite.
        count: number of cases.

    Returns:
        One seed per case.
    """
    if count < 1:
        return []
    return [int(word) for word in np.random.SeedSequence([seed, stream]).generate_state(count)]


def worker_count(threads: int) -> int:
    """Resolve the thread cap, 0 meaning one per CPU.

    Args:
        threads: the configured cap.

    Returns:
        The number of workers.
    """
    return threads if threads > 0 else os.cpu_count() or 1


def _run(
    case: typing.Callable[..., CaseResult],
    arguments: typing.Sequence[typing.Tuple[typing.Any, ...]],
    threads: int,
) -> typing.List[CaseResult]:
    """Run cases on a thread pool, returning results in submission order."""
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        return list(pool.map(lambda args: case(*args), arguments))


def tally(results: typing.Iterable[CaseResult]) -> typing.Dict[str, PropertyTally]:
    """Count passing cases per property.

    Args:
        results: verdicts by property, one mapping per case.

    Returns:
        Tallies in order of first appearance.
    """
    tallies: typing.Dict[str, PropertyTally] = {}
    for result in results:
        for name, passed in result.items():
            current = tallies.get(name, PropertyTally())
            tallies[name] = PropertyTally(
                passed=current.passed + int(passed), total=current.total + 1
            )
    return tallies


def _shapes(max_dim: int, lowest_rank: int = 1) -> typing.List[typing.Tuple[int, int]]:
    """List (n, k) with lowest_rank ≤ k < n ≤ max_dim."""
    return [(n, k) for n in range(2, max_dim + 1) for k in range(lowest_rank, n)]


@_case("distance_formula", "geodesic_length")
def _distance_case(n: int, k: int, seed: int) -> CaseResult:
    """Compare the distance with the intersection formula and a geodesic."""
    rng = np.random.default_rng(seed)
    steps = int(rng.integers(0, min(k, n - k) + 1))
    first, second = random_pair_at_distance(n, k, steps, rng)
    path = build_geodesic(first, second)
    return {
        "distance_formula": distance(first, second) == steps,
        "geodesic_length": path.length == steps
        and gap_distance(path.vertices[0], first) <= PROJECTION_TOL
        and gap_distance(path.vertices[-1], second) <= PROJECTION_TOL,
    }


@_case("top_clique", "star_clique", "maximality")
def _clique_case(n: int, k: int, seed: int, candidates: int) -> CaseResult:
    """Check the size, clique property and maximality of top and star families."""
    rng = np.random.default_rng(seed)
    top = Top(roof=random_frame(n, k + 1, rng))
    star = Star(base=random_frame(n, k - 1, rng))
    top_family = max_compatible_in_top(top)
    star_family = max_compatible_in_star(star)
    top_candidates = [random_top_member(top, rng) for _ in range(candidates)]
    star_candidates = [random_star_member(star, rng) for _ in range(candidates)]
    return {
        "top_clique": len(top_family) == k + 1 and is_ortho_clique(top_family),
        "star_clique": len(star_family) == n - k + 1 and is_ortho_clique(star_family),
        "maximality": not probe_family_maximality(top_family, top_candidates)
        and not probe_family_maximality(star_family, star_candidates),
    }


@_case("compatible_geodesic")
def _compatible_geodesic_case(n: int, k: int, seed: int) -> CaseResult:
    """Extend a compatible pair to a geodesic ending at an orthogonal subspace."""
    rng = np.random.default_rng(seed)
    first, second = random_compatible_pair(n, k, int(rng.integers(0, k + 1)), rng)
    path = geodesic_through_to_orthogonal(first, second)
    vertices = path.vertices
    pairwise = all(
        is_compatible(vertices[i], vertices[j])
        for i in range(len(vertices))
        for j in range(i + 1, len(vertices))
    )
    through = any(gap_distance(vertex, second) <= PROJECTION_TOL for vertex in vertices)
    return {
        "compatible_geodesic": path.length == k
        and pairwise
        and through
        and is_orthogonal(vertices[0], vertices[-1])
    }


def graph_suite(config: RunConfig, scale: SuiteScale) -> typing.Dict[str, PropertyTally]:
    """Run the distance, clique and compatible geodesic properties.

    Args:
        config: the run options.
        scale: the case counts.

    Returns:
        Tallies by property.
    """
    shapes = _shapes(scale.max_dim)
    seeds = case_seeds(config.seed, 0, len(shapes) * scale.graph_pairs)
    distance_cases = [
        (n, k, seeds[index * scale.graph_pairs + offset])
        for index, (n, k) in enumerate(shapes)
        for offset in range(scale.graph_pairs)
    ]
    clique_shapes = _shapes(scale.max_dim, lowest_rank=2)
    clique_cases = [
        (n, k, seed, scale.maximality_candidates)
        for (n, k), seed in zip(
            clique_shapes, case_seeds(config.seed, 1, len(clique_shapes))
        )
    ]
    wide = [(n, k) for n, k in shapes if n >= 2 * k]
    geodesic_cases = [
        (*wide[index % len(wide)], seed)
        for index, seed in enumerate(case_seeds(config.seed, 2, scale.compatible_pairs))
    ]
    results = _run(_distance_case, distance_cases, config.threads)
    results += _run(_clique_case, clique_cases, config.threads)
    results += _run(_compatible_geodesic_case, geodesic_cases, config.threads)
    return tally(results)


@_case("noncompatible_adjacent_curve")
def _adjacent_case(n: int, k: int, seed: int, tol: float) -> CaseResult:
    """A generic adjacent pair spans a curve."""
    rng = np.random.default_rng(seed)
    first, second = random_pair_at_distance(n, k, 1, rng)
    verdict = geher_classify(first, second, tol, seed)
    return {
        "noncompatible_adjacent_curve": not is_compatible(first, second)
        and verdict is GeherClass.NON_COMPATIBLE_ADJACENT_CURVE
    }


@_case("orthogonal_dimension")
def _orthogonal_case(n: int, k: int, seed: int, tol: float) -> CaseResult:
    """An orthogonal pair spans a set of dimension 2k(n − k) at n = 2k."""
    rng = np.random.default_rng(seed)
    first, second = random_compatible_pair(n, k, 0, rng)
    member = random_interval_member(first, second, rng)
    dimension = xset_local_dimension(first, second, member, tol, seed)
    return {"orthogonal_dimension": dimension == 2 * k * k}


@_case("compatible_full_interval", "complementary_member")
def _compatible_case(n: int, k: int, seed: int, tol: float) -> CaseResult:
    """A compatible pair contains its whole interval, closed under complements."""
    rng = np.random.default_rng(seed)
    lowest = max(0, 2 * k - n)
    first, second = random_compatible_pair(n, k, int(rng.integers(lowest, k + 1)), rng)
    verdict = geher_classify(first, second, tol, seed)
    member = random_interval_member(first, second, rng)
    partner = complementary_member(first, second, member)
    return {
        "compatible_full_interval": verdict is GeherClass.COMPATIBLE_FULL_INTERVAL,
        "complementary_member": partner.rank == k,
    }


def xset_suite(config: RunConfig, scale: SuiteScale) -> typing.Dict[str, PropertyTally]:
    """Run the X_k classification and local dimension properties.

    Args:
        config: the run options.
        scale: the case counts.

    Returns:
        Tallies by property.
    """
    count, tol = scale.xset_pairs, PROJECTION_TOL
    adjacent_shapes = [(2, 1), (3, 1), (3, 2), (4, 2)]
    orthogonal_shapes = [(2, 1), (4, 2)]
    compatible_shapes = [(3, 1), (4, 2), (5, 2)]
    results = _run(
        _adjacent_case,
        [
            (*adjacent_shapes[index % len(adjacent_shapes)], seed, tol)
            for index, seed in enumerate(case_seeds(config.seed, 0, count))
        ],
        config.threads,
    )
    for stream, shape in enumerate(orthogonal_shapes, start=1):
        results += _run(
            _orthogonal_case,
            [(*shape, seed, tol) for seed in case_seeds(config.seed, stream, count)],
            config.threads,
        )
    results += _run(
        _compatible_case,
        [
            (*compatible_shapes[index % len(compatible_shapes)], seed, tol)
            for index, seed in enumerate(case_seeds(config.seed, 3, count))
        ],
        config.threads,
    )
    return tally(results)


def padded_family(
    n: int, k: int, rank: int, sigma: Sigma, seed: int
) -> typing.Tuple[OperatorMap, SemilinearMap, typing.Optional[Frame]]:
    """Build L_{U,W} with a random U and W inside C^(n + rank + 1).

    Args:
        n: source dimension.
        k: source projection rank.
        rank: dimension of W.
        sigma: the field automorphism of U.
        seed: seed of the draw.

    Returns:
        The operator with its U and W, W being None at rank 0.
    """
    n_prime = n + rank + 1
    unitary = random_isometry(n + rank, n_prime, seed, sigma).matrix
    isometry = SemilinearMap(matrix=unitary[:, :n], sigma=sigma)
    if rank == 0:
        return make_L_U(isometry, k), isometry, None
    padding = Frame(columns=unitary[:, n:])
    return make_L_UW(isometry, padding, k), isometry, padding


def _rank_bound(operator: OperatorMap, k: int, first: bool, second: bool, m: int) -> CaseResult:
    """Report the k ≤ m bound when L1 and L2 hold and n ≥ 2k."""
    if first and second and operator.n >= 2 * k:
        return {"rank_bound": rank_bound_holds(operator.n, k, m)}
    return {}


@_case("condition_checkers")
def _condition_case(index: int, seed: int, samples: int, tol: float) -> CaseResult:
    """Run the checkers on one padded operator, a collapse and a scaled map."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 6))
    k = int(rng.integers(1, n))
    rank = index % 3
    sigma = Sigma.CONJUGATION if index % 2 else Sigma.IDENTITY
    operator, _, _ = padded_family(n, k, rank, sigma, seed)
    first = check_L1(operator, k, samples, seed, tol)
    second = check_L2(operator, k, samples, seed, tol)
    third = check_L3(operator, k, k + rank, samples, seed, tol)
    padded_ok = first.passed and first.inferred_m == k + rank and second.passed and third.passed
    collapse = make_trace_collapse(random_rank_k_projection(n, int(rng.integers(1, n)), rng), k)
    collapse_ok = check_L1(collapse, k, samples, seed, tol).passed and not (
        check_L2(collapse, k, samples, seed, tol).passed
    )
    scaled_ok = not check_L1(scale_operator(operator, 0.5), k, samples, seed, tol).passed
    return {
        "condition_checkers": padded_ok and collapse_ok and scaled_ok,
        **_rank_bound(operator, k, first.passed, second.passed, k + rank),
    }


def _same_line_maps(
    recovered: SemilinearMap, expected: SemilinearMap, n: int, seed: int
) -> bool:
    """Compare two semilinear maps by the lines they induce."""
    rng = np.random.default_rng(seed)
    for _ in range(ROUNDTRIP_LINES):
        line = random_frame(n, 1, rng)
        image = semilinear_image(recovered, line)
        if gap_distance(image, semilinear_image(expected, line)) > IMAGE_GAP_TOL:
            return False
    return True


@_case("roundtrip", "sigma_recovery", "verification")
def _roundtrip_case(
    n: int, k: int, rank: int, sigma: Sigma, seed: int, samples: int
) -> CaseResult:
    """Classify a padded operator and compare with the construction."""
    operator, isometry, padding = padded_family(n, k, rank, sigma, seed)
    result = classify_operator(operator, k, samples, seed, ROUNDTRIP_TOL)
    if result.tag is Tag.REJECTED or result.isometry is None:
        logger.warning("Round trip n=%d k=%d rank=%d rejected: %s", n, k, rank, result.detail)
        return {"roundtrip": False, "sigma_recovery": False, "verification": False}
    expected = Tag.W_AUGMENTED if rank else Tag.ISOMETRY_INDUCED
    padding_ok = padding is None or (
        result.padding is not None and gap_distance(result.padding, padding) <= IMAGE_GAP_TOL
    )
    residual_ok = result.residual is not None and result.residual <= ROUNDTRIP_TOL
    reports = result.reports
    return {
        "roundtrip": result.tag is expected
        and padding_ok
        and residual_ok
        and _same_line_maps(result.isometry, isometry, n, seed + 1),
        "sigma_recovery": result.isometry.sigma is sigma,
        "verification": verify_classification(operator, result, seed=seed + 2).accepted,
        **_rank_bound(
            operator, k, reports[0].passed, reports[1].passed, typing.cast(int, result.m)
        ),
    }


@_case("dim_2k_branch")
def _branch_case(index: int, seed: int, samples: int) -> CaseResult:
    """Classify L_U and L_k^⊥ ∘ L_U for one unitary on C^4 with k = 2."""
    sigma = Sigma.CONJUGATION if index % 2 else Sigma.IDENTITY
    plain = make_L_U(random_isometry(4, 4, seed, sigma), 2)
    complemented = compose(make_L_perp(2, 4), plain)
    first = classify_operator(plain, 2, samples, seed, ROUNDTRIP_TOL)
    second = classify_operator(complemented, 2, samples, seed, ROUNDTRIP_TOL)
    return {
        "dim_2k_branch": first.tag is Tag.ISOMETRY_INDUCED
        and second.tag is Tag.ORTHO_COMPLEMENT
        and not first.coincidence
        and not second.coincidence
    }


def roundtrip_suite(config: RunConfig, scale: SuiteScale) -> typing.Dict[str, PropertyTally]:
    """Run the condition checker, round-trip, branch and rank bound properties.

    Args:
        config: the run options.
        scale: the case counts.

    Returns:
        Tallies by property.
    """
    condition_cases = [
        (index, seed, config.samples, config.tol)
        for index, seed in enumerate(case_seeds(config.seed, 0, scale.condition_trials))
    ]
    combinations = [
        (n, k, rank, sigma)
        for n in range(3, scale.max_dim + 1)
        for k in range(1, n)
        for rank in range(3)
        for sigma in Sigma
    ]
    roundtrip_cases = [
        (*combination, seed, scale.classify_samples)
        for combination, seed in zip(
            combinations, case_seeds(config.seed, 1, len(combinations))
        )
    ]
    branch_cases = [
        (index, seed, scale.classify_samples)
        for index, seed in enumerate(case_seeds(config.seed, 2, scale.unitaries))
    ]
    results = _run(_condition_case, condition_cases, config.threads)
    results += _run(_roundtrip_case, roundtrip_cases, config.threads)
    results += _run(_branch_case, branch_cases, config.threads)
    return tally(results)


SUITES: typing.Dict[str, Suite] = {
    "graph": graph_suite,
    "xset": xset_suite,
    "roundtrip": roundtrip_suite,
}


def run_suite(
    name: str, config: RunConfig, scale: typing.Optional[SuiteScale] = None
) -> SuiteSummary:
    """Run a named suite, or every suite for "all".

    Args:
        name: graph, xset, roundtrip or all.
        config: the run options.
        scale: the case counts, the acceptance scale when omitted.

    Returns:
        The summary; under "all" properties are prefixed by their suite.

    Raises:
        InvalidParameterError: if the suite is unknown.
    """
    scale = scale or SuiteScale()
    if name == "all":
        properties = {
            f"{suite}.{prop}": counts
            for suite, run in SUITES.items()
            for prop, counts in run(config, scale).items()
        }
    elif name in SUITES:
        properties = SUITES[name](config, scale)
    else:
        raise InvalidParameterError(f"Unknown suite {name}")
    summary = SuiteSummary(
        suite=name,
        seed=config.seed,
        properties=properties,
        ok=all(counts.ok for counts in properties.values()),
    )
    logger.info("Suite %s finished, ok: %s", name, summary.ok)
    return summary
