# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Tests for the subspaces module."""

import numpy as np
import pytest

from exceptions import (
    BadRankError,
    DimensionMismatchError,
    NotAProjectionError,
    RankDeficientError,
    RankMismatchError,
)
from lab_types import Frame
from subspaces import (
    compatible_split,
    contains,
    empty_frame,
    gap_distance,
    image_of_projection,
    is_compatible,
    is_orthogonal,
    join,
    meet,
    ortho_complement,
    orthonormalize,
    principal_angles,
    projection_of,
    random_frame,
)

SQRT_HALF = 1 / np.sqrt(2)


def span(n, *vectors):
    """Build the frame spanned by real vectors given as coefficient lists or basis indices."""
    columns = []
    for vector in vectors:
        if isinstance(vector, int):
            column = np.zeros(n)
            column[vector] = 1
        else:
            column = np.asarray(vector, dtype=float)
        columns.append(column)
    return orthonormalize(np.column_stack(columns))


def same_subspace(first, second):
    """Compare two frames by their projections."""
    return np.allclose(projection_of(first), projection_of(second), atol=1e-10)


def test_orthonormalize_keeps_orthonormal_frame():
    """
    arrange: Take (e1, e2) in C^3.
    act: Orthonormalize.
    assert: The same columns come back.
    """
    frame = orthonormalize(np.eye(3)[:, :2])

    assert np.allclose(frame.columns, np.eye(3)[:, :2])


def test_orthonormalize_normalizes():
    """
    arrange: Take the single vector 2·e1.
    act: Orthonormalize.
    assert: e1 comes back.
    """
    frame = orthonormalize(np.array([2.0, 0.0, 0.0]))

    assert np.allclose(frame.columns[:, 0], [1, 0, 0])


def test_orthonormalize_rejects_dependent_columns():
    """
    arrange: Take (e1, e1).
    act: Orthonormalize.
    assert: RankDeficientError is raised.
    """
    with pytest.raises(RankDeficientError):
        orthonormalize(np.column_stack([np.eye(3)[:, 0], np.eye(3)[:, 0]]))


def test_random_frame_has_requested_shape(rng):
    """
    arrange: Pick a shape with k = 0 and k = n as edge cases.
    act: Draw random frames.
    assert: Ranks match and bad ranks are refused.
    """
    assert random_frame(4, 2, rng).rank == 2
    assert random_frame(4, 0, rng).rank == 0
    assert random_frame(4, 4, rng).rank == 4
    with pytest.raises(BadRankError):
        random_frame(3, 4, rng)


@pytest.mark.parametrize(
    "frame, expected",
    [
        pytest.param(span(2, 0), np.diag([1, 0]), id="coordinate line"),
        pytest.param(span(2, [1, 1]), 0.5 * np.ones((2, 2)), id="diagonal line"),
        pytest.param(span(3, 0, 1, 2), np.eye(3), id="full space"),
    ],
)
def test_projection_of(frame, expected):
    """
    arrange: Take frames with known projections.
    act: Build the projection.
    assert: It matches.
    """
    assert np.allclose(projection_of(frame), expected)


def test_image_of_projection():
    """
    arrange: Take diag(1, 0), I_3 and the diagonal line projection.
    act: Compute the images.
    assert: e1, the full space and (e1 + e2)/√2 up to phase come back.
    """
    assert same_subspace(image_of_projection(np.diag([1.0, 0.0])), span(2, 0))
    assert image_of_projection(np.eye(3)).rank == 3
    line = image_of_projection(0.5 * np.ones((2, 2)))
    assert np.allclose(np.abs(line.columns[:, 0]), [SQRT_HALF, SQRT_HALF])


def test_image_of_projection_rejects_non_projection():
    """
    arrange: Take diag(0.5, 0.5).
    act: Compute its image.
    assert: NotAProjectionError is raised.
    """
    with pytest.raises(NotAProjectionError):
        image_of_projection(np.diag([0.5, 0.5]))


def test_meet_of_overlapping_planes():
    """
    arrange: Take span(e1, e2) and span(e2, e3) in C^4.
    act: Intersect them.
    assert: span(e2) comes back.
    """
    result = meet(span(4, 0, 1), span(4, 1, 2))

    assert same_subspace(result, span(4, 1))


def test_meet_edge_cases(rng):
    """
    arrange: Take a random plane and two orthogonal lines.
    act: Intersect the plane with itself and the lines with each other.
    assert: The plane comes back, the lines meet in 0.
    """
    plane = random_frame(4, 2, rng)

    assert same_subspace(meet(plane, plane), plane)
    assert meet(span(3, 0), span(3, 1)).rank == 0


def test_join():
    """
    arrange: Take e1 with e2 and e1 with (e1 + e2)/√2.
    act: Join them.
    assert: span(e1, e2) comes back both times.
    """
    assert same_subspace(join(span(3, 0), span(3, 1)), span(3, 0, 1))
    assert same_subspace(join(span(3, 0), span(3, [1, 1, 0])), span(3, 0, 1))


def test_join_of_subspace_with_itself(rng):
    """
    arrange: Take a random plane.
    act: Join it with itself.
    assert: The plane comes back.
    """
    plane = random_frame(5, 2, rng)

    assert same_subspace(join(plane, plane), plane)


def test_meet_and_join_dimensions_add_up(rng):
    """
    arrange: Take random subspaces sharing a known line.
    act: Compute meet and join.
    assert: dim(X ∩ Y) + dim(X + Y) = dim X + dim Y.
    """
    for _ in range(10):
        shared = rng.standard_normal((5, 1)) + 1j * rng.standard_normal((5, 1))
        first = orthonormalize(np.hstack([shared, rng.standard_normal((5, 1))]))
        second = orthonormalize(np.hstack([shared, rng.standard_normal((5, 2))]))

        assert meet(first, second).rank == 1
        assert meet(first, second).rank + join(first, second).rank == 5


def test_meet_rejects_mismatched_ambient():
    """
    arrange: Take lines in C^2 and C^3.
    act: Intersect them.
    assert: DimensionMismatchError is raised.
    """
    with pytest.raises(DimensionMismatchError):
        meet(span(2, 0), span(3, 0))


def test_ortho_complement():
    """
    arrange: Take e1 in C^2, the zero subspace of C^3 and (e1 + e2)/√2.
    act: Take the orthogonal complements.
    assert: e2, the full space and (e1 − e2)/√2 come back.
    """
    assert same_subspace(ortho_complement(span(2, 0)), span(2, 1))
    assert ortho_complement(empty_frame(3)).rank == 3
    assert same_subspace(ortho_complement(span(2, [1, 1])), span(2, [1, -1]))


def test_ortho_complement_of_full_space():
    """
    arrange: Take the full space C^2.
    act: Take its complement.
    assert: The zero subspace comes back.
    """
    assert ortho_complement(span(2, 0, 1)).rank == 0


@pytest.mark.parametrize(
    "first, second, expected",
    [
        pytest.param(span(2, 0), span(2, 0), [0.0], id="identical"),
        pytest.param(span(2, 0), span(2, 1), [np.pi / 2], id="orthogonal"),
        pytest.param(span(2, 0), span(2, [1, 1]), [np.pi / 4], id="diagonal"),
        pytest.param(span(3, 0, 1), span(3, 1), [0.0], id="different ranks"),
    ],
)
def test_principal_angles(first, second, expected):
    """
    arrange: Take pairs with known angles.
    act: Compute the principal angles.
    assert: They match.
    """
    assert np.allclose(principal_angles(first, second), expected, atol=1e-10)


def test_principal_angles_are_accurate_near_zero():
    """
    arrange: Take two lines at angle 1e-9.
    act: Compute the principal angle.
    assert: The tiny angle is resolved.
    """
    angle = 1e-9

    result = principal_angles(span(2, 0), span(2, [np.cos(angle), np.sin(angle)]))

    assert np.isclose(result[0], angle, rtol=1e-3)


@pytest.mark.parametrize(
    "first, second, expected",
    [
        pytest.param(span(2, 0), span(2, 1), True, id="orthogonal lines"),
        pytest.param(span(4, 0, 1), span(4, 1, 2), True, id="overlapping planes"),
        pytest.param(span(2, 0), span(2, [1, 1]), False, id="tilted lines"),
    ],
)
def test_is_compatible(first, second, expected):
    """
    arrange: Take pairs with known commutation.
    act: Test compatibility.
    assert: The verdict matches.
    """
    assert is_compatible(first, second) is expected


def test_compatible_split():
    """
    arrange: Take span(e1, e2) and span(e2, e3) in C^4.
    act: Split them around their intersection.
    assert: The parts are e1, e2 and e3.
    """
    first_part, common, second_part = compatible_split(span(4, 0, 1), span(4, 1, 2))

    assert same_subspace(first_part, span(4, 0))
    assert same_subspace(common, span(4, 1))
    assert same_subspace(second_part, span(4, 2))


def test_gap_distance():
    """
    arrange: Take identical and orthogonal lines.
    act: Compute the gaps in both orders.
    assert: 0 and √2, symmetric.
    """
    assert gap_distance(span(2, 0), span(2, 0)) == pytest.approx(0.0)
    assert gap_distance(span(2, 0), span(2, 1)) == pytest.approx(np.sqrt(2))
    tilted = span(2, [1, 2])
    assert gap_distance(span(2, 0), tilted) == pytest.approx(gap_distance(tilted, span(2, 0)))


def test_gap_distance_rejects_rank_mismatch():
    """
    arrange: Take a line and a plane.
    act: Compute the gap.
    assert: RankMismatchError is raised.
    """
    with pytest.raises(RankMismatchError):
        gap_distance(span(3, 0), span(3, 0, 1))


def test_contains_and_is_orthogonal():
    """
    arrange: Take a plane, a line inside it and a line orthogonal to it.
    act: Test containment and orthogonality.
    assert: The relations come out right.
    """
    plane = span(3, 0, 1)

    assert contains(plane, span(3, [1, 1, 0]))
    assert not contains(plane, span(3, 2))
    assert is_orthogonal(plane, span(3, 2))
    assert not is_orthogonal(plane, span(3, [0, 1, 1]))


def test_frame_rejects_non_orthonormal_columns():
    """
    arrange: Take columns that are not orthonormal.
    act: Build a frame.
    assert: Validation fails.
    """
    with pytest.raises(ValueError):
        Frame(columns=np.array([[1.0, 1.0], [0.0, 1.0]]))
