# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Metric and clique structure of the Grassmann graph.

Vertices are k-dimensional subspaces; two vertices are adjacent when they
meet in dimension k − 1.
"""

import logging
import typing

import networkx as nx
import numpy as np
import scipy.linalg

from constants import PROJECTION_TOL
from exceptions import (
    InsufficientAmbientDimError,
    InvalidParameterError,
    NotCompatibleError,
    RankDeficientError,
)
from lab_types import Frame, GeodesicPath, Star, Top
from subspaces import (
    check_same_rank,
    compatible_split,
    contains,
    gap_distance,
    is_compatible,
    join,
    meet,
    ortho_complement,
    random_frame,
)

logger = logging.getLogger(__name__)

Relation = typing.Callable[[Frame, Frame], bool]


def distance(first: Frame, second: Frame) -> int:
    """Return the graph distance k − dim(X ∩ Y).

    Args:
        first: X.
        second: Y.

    Returns:
        The distance.

    Raises:
        RankMismatchError: if the ranks differ.
    """
    check_same_rank(first, second)
    return first.rank - meet(first, second).rank


def is_adjacent(first: Frame, second: Frame) -> bool:
    """Test adjacency in the Grassmann graph.

    Args:
        first: X.
        second: Y.

    Returns:
        Whether the distance is 1.
    """
    return distance(first, second) == 1


def is_ortho_adjacent(first: Frame, second: Frame) -> bool:
    """Test ortho-adjacency: adjacent and compatible.

    Args:
        first: X.
        second: Y.

    Returns:
        Whether X and Y are ortho-adjacent.
    """
    return is_adjacent(first, second) and is_compatible(first, second)


def build_geodesic(first: Frame, second: Frame) -> GeodesicPath:
    """Build a shortest path between two subspaces of equal rank.

    The differing parts X ⊖ (X ∩ Y) and Y ⊖ (X ∩ Y) are given principal
    vector bases x_j, y_j. Vertex j is spanned by X ∩ Y, y_1..y_j and
    x_{j+1}..x_d, which is orthonormal because distinct principal vectors are
    orthogonal.

    Args:
        first: X.
        second: Y.

    Returns:
        A path of length d(X, Y).

    Raises:
        RankDeficientError: if a step is numerically not adjacent.
    """
    steps = distance(first, second)
    if steps == 0:
        return GeodesicPath(vertices=[first])
    first_rest, common, second_rest = compatible_split(first, second)
    left, _, right = scipy.linalg.svd(first_rest.columns.conj().T @ second_rest.columns)
    x_vectors = first_rest.columns @ left
    y_vectors = second_rest.columns @ right.conj().T
    vertices = [first]
    for step in range(1, steps):
        columns = np.hstack([common.columns, y_vectors[:, :step], x_vectors[:, step:]])
        vertices.append(Frame(columns=columns))
    vertices.append(second)
    for previous, current in zip(vertices, vertices[1:]):
        if not is_adjacent(previous, current):
            raise RankDeficientError("Geodesic step degenerated to a non-adjacent pair")
    logger.debug("Geodesic of length %d in G_%d(C^%d)", steps, first.rank, first.ambient_dim)
    return GeodesicPath(vertices=vertices)


def geodesic_through_to_orthogonal(first: Frame, second: Frame) -> GeodesicPath:
    """Extend a compatible pair to a geodesic between orthogonal subspaces.

    With C = X ∩ Y and Y = Y' ⊕ C, the far end is B = Y' ⊕ D for a
    dim C subspace D orthogonal to X + Y. The path runs X → Y → B.

    Args:
        first: X.
        second: Y, compatible with X.

    Returns:
        A geodesic of length k from X to B through Y, made of mutually compatible vertices.

    Raises:
        NotCompatibleError: if X and Y are not compatible.
        InsufficientAmbientDimError: if the ambient dimension is below 2k.
    """
    check_same_rank(first, second)
    if first.ambient_dim < 2 * first.rank:
        raise InsufficientAmbientDimError(
            f"C^{first.ambient_dim} has no orthogonal pair of rank {first.rank} subspaces"
        )
    if not is_compatible(first, second):
        raise NotCompatibleError("Subspaces are not compatible")
    _, common, second_rest = compatible_split(first, second)
    if common.rank == 0:
        return build_geodesic(first, second)
    padding = ortho_complement(join(first, second)).columns[:, : common.rank]
    far_end = Frame(columns=np.hstack([second_rest.columns, padding]))
    vertices = build_geodesic(first, second).vertices
    vertices += build_geodesic(second, far_end).vertices[1:]
    return GeodesicPath(vertices=vertices)


def top_members(top: Top) -> typing.List[Frame]:
    """Return the hyperplanes of the roof obtained by dropping one basis vector.

    Args:
        top: the top.

    Returns:
        k + 1 frames, the i-th missing roof column i.
    """
    roof = top.roof.columns
    return [Frame(columns=np.delete(roof, index, axis=1)) for index in range(roof.shape[1])]


def max_compatible_in_top(top: Top) -> typing.List[Frame]:
    """Return a maximal compatible family inside a top.

    Args:
        top: the top.

    Returns:
        The k + 1 mutually ortho-adjacent hyperplanes of the roof.
    """
    return top_members(top)


def _star_directions(star: Star, ambient: typing.Optional[Frame]) -> np.ndarray:
    """Orthonormal basis of the part of the ambient space orthogonal to the base."""
    base = star.base
    if ambient is None:
        return ortho_complement(base).columns
    if not contains(ambient, base):
        raise InvalidParameterError("Star base is not inside the ambient subspace")
    return ambient.columns @ scipy.linalg.null_space(base.columns.conj().T @ ambient.columns)


def max_compatible_in_star(
    star: Star, ambient: typing.Optional[Frame] = None
) -> typing.List[Frame]:
    """Return a maximal compatible family inside a star.

    Args:
        star: the star.
        ambient: the ambient subspace, the whole space when omitted.

    Returns:
        base ⊕ span(v_i) over an orthonormal basis v_i of ambient ⊖ base.

    Raises:
        InvalidParameterError: if the base is not inside the ambient subspace.
    """
    directions = _star_directions(star, ambient)
    return [
        Frame(columns=np.hstack([star.base.columns, directions[:, index : index + 1]]))
        for index in range(directions.shape[1])
    ]


def random_star_member(
    star: Star, rng: np.random.Generator, ambient: typing.Optional[Frame] = None
) -> Frame:
    """Draw a random member of a star.

    Args:
        star: the star.
        rng: the random generator.
        ambient: the ambient subspace, the whole space when omitted.

    Returns:
        base ⊕ span(v) for a random unit v orthogonal to the base.
    """
    directions = _star_directions(star, ambient)
    line = random_frame(directions.shape[1], 1, rng)
    return Frame(columns=np.hstack([star.base.columns, directions @ line.columns]))


def random_top_member(top: Top, rng: np.random.Generator) -> Frame:
    """Draw a random member of a top.

    Args:
        top: the top.
        rng: the random generator.

    Returns:
        A random k-dimensional subspace of the roof.
    """
    inner = random_frame(top.roof.rank, top.k, rng)
    return Frame(columns=top.roof.columns @ inner.columns)


def relation_graph(frames: typing.Sequence[Frame], relation: Relation) -> nx.Graph:
    """Build the graph on a family of frames induced by a symmetric relation.

    Args:
        frames: the family.
        relation: the relation joining two vertices.

    Returns:
        Graph on the indices of the family.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(len(frames)))
    for i, first in enumerate(frames):
        for j in range(i + 1, len(frames)):
            if relation(first, frames[j]):
                graph.add_edge(i, j)
    return graph


def ortho_adjacency_graph(frames: typing.Sequence[Frame]) -> nx.Graph:
    """Build the ortho-adjacency graph of a family.

    Args:
        frames: the family.

    Returns:
        Graph with an edge between ortho-adjacent members.
    """
    return relation_graph(frames, is_ortho_adjacent)


def is_clique(graph: nx.Graph) -> bool:
    """Test whether a graph is complete.

    Args:
        graph: the graph.

    Returns:
        Whether some maximal clique covers every vertex.
    """
    if graph.number_of_nodes() == 0:
        return True
    return max(len(clique) for clique in nx.find_cliques(graph)) == graph.number_of_nodes()


def is_ortho_clique(frames: typing.Sequence[Frame]) -> bool:
    """Test whether a family is mutually ortho-adjacent.

    Args:
        frames: the family.

    Returns:
        Whether the ortho-adjacency graph is complete.
    """
    return is_clique(ortho_adjacency_graph(frames))


def probe_family_maximality(
    family: typing.Sequence[Frame], candidates: typing.Iterable[Frame], tol: float = PROJECTION_TOL
) -> typing.List[Frame]:
    """Find candidates that would extend a compatible family.

    Args:
        family: a mutually compatible family.
        candidates: frames of the same rank.
        tol: gap below which a candidate counts as a member.

    Returns:
        Candidates compatible with every member and distinct from all of them.
    """
    violations = []
    for candidate in candidates:
        if not all(is_compatible(candidate, member) for member in family):
            continue
        if all(gap_distance(candidate, member) > tol for member in family):
            violations.append(candidate)
    if violations:
        logger.info("%d candidates extend the compatible family", len(violations))
    return violations


def random_pair_at_distance(
    n: int, k: int, steps: int, rng: np.random.Generator
) -> typing.Tuple[Frame, Frame]:
    """Draw a generic pair of rank k subspaces at a prescribed distance.

    Args:
        n: ambient dimension.
        k: rank.
        steps: the distance, at most min(k, n − k).
        rng: the random generator.

    Returns:
        (X, Y) with dim(X ∩ Y) = k − steps.

    Raises:
        InvalidParameterError: if the distance is not achievable.
    """
    if not 0 <= steps <= min(k, n - k):
        raise InvalidParameterError(f"No rank {k} pair at distance {steps} in C^{n}")
    first = random_frame(n, k, rng)
    common = Frame(columns=first.columns @ random_frame(k, k - steps, rng).columns)
    outside = ortho_complement(common).columns @ random_frame(n - k + steps, steps, rng).columns
    return first, Frame(columns=np.hstack([common.columns, outside]))


def random_compatible_pair(
    n: int, k: int, shared: int, rng: np.random.Generator
) -> typing.Tuple[Frame, Frame]:
    """Draw a compatible pair of rank k subspaces meeting in a given dimension.

    Args:
        n: ambient dimension.
        k: rank.
        shared: dimension of the intersection, with 2k − shared ≤ n.
        rng: the random generator.

    Returns:
        (X, Y) spanned by overlapping runs of one random orthonormal basis.

    Raises:
        InvalidParameterError: if the pair does not fit in C^n.
    """
    if not 0 <= shared <= k or 2 * k - shared > n:
        raise InvalidParameterError(f"No compatible rank {k} pair sharing {shared} in C^{n}")
    basis = random_frame(n, 2 * k - shared, rng).columns
    return Frame(columns=basis[:, :k]), Frame(columns=basis[:, k - shared : 2 * k - shared])
