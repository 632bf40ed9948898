#!/usr/bin/env python3

# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Type definitions for the wigner lab.

Every model here doubles as the JSON format of the corresponding payload:
complex scalars are ``[re, im]`` pairs, matrices are row-major and frame
columns are column-major.
"""

import enum
import logging
import pathlib
import typing

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_serializer,
    field_validator,
    model_validator,
)

from constants import CLASSIFY_TOL, FRAME_TOL


class Sigma(str, enum.Enum):
    """Field automorphism attached to a semilinear map.

    Attributes:
        IDENTITY: the map is linear.
        CONJUGATION: the map is conjugate-linear.
    """

    IDENTITY = "id"
    CONJUGATION = "conj"


class Condition(str, enum.Enum):
    """Conditions imposed on an operator between Hermitian spaces.

    Attributes:
        L1: rank-k projections go to rank-m projections.
        L2: the restriction to rank-k projections is injective.
        L3: images of two projections meet in dimension at least m - k.
    """

    L1 = "L1"
    L2 = "L2"
    L3 = "L3"


class Tag(str, enum.Enum):
    """Outcome of an operator classification.

    Attributes:
        ISOMETRY_INDUCED: conjugation by a linear or conjugate-linear isometry.
        ORTHO_COMPLEMENT: orthocomplementation after an isometric conjugation.
        W_AUGMENTED: isometric conjugation padded by a fixed subspace.
        REJECTED: the operator fits none of the models.
    """

    ISOMETRY_INDUCED = "IsometryInduced"
    ORTHO_COMPLEMENT = "OrthoComplementCase"
    W_AUGMENTED = "WAugmented"
    REJECTED = "Rejected"


class GeherClass(str, enum.Enum):
    """Shape of the set X_k(X, Y) for a pair of subspaces.

    Attributes:
        COMPATIBLE_FULL_INTERVAL: the set is the whole interval [X∩Y, X+Y]_k.
        NON_COMPATIBLE_ADJACENT_CURVE: the set is a one dimensional manifold.
        OTHER: neither of the above.
    """

    COMPATIBLE_FULL_INTERVAL = "CompatibleFullInterval"
    NON_COMPATIBLE_ADJACENT_CURVE = "NonCompatibleAdjacentCurve"
    OTHER = "Other"


def encode_complex_matrix(matrix: np.ndarray) -> typing.List[typing.Any]:
    """Encode a complex matrix as row-major nested ``[re, im]`` pairs.

    Args:
        matrix: the matrix to encode.

    Returns:
        Nested lists of python floats.
    """
    matrix = np.asarray(matrix, dtype=complex)
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()


def decode_complex_matrix(value: typing.Any, shape: typing.Tuple[int, int]) -> np.ndarray:
    """Decode row-major nested ``[re, im]`` pairs into a complex matrix.

    Args:
        value: the decoded JSON value.
        shape: the expected (rows, columns), used for empty payloads.

    Returns:
        The complex matrix.

    Raises:
        ValueError: if the payload does not match the expected shape.
    """
    pairs = np.asarray(value, dtype=float)
    if pairs.size == 0:
        return np.zeros(shape, dtype=complex)
    if pairs.ndim != 3 or pairs.shape[-1] != 2:
        raise ValueError(f"Expected nested [re, im] pairs, got shape {pairs.shape}")
    matrix = pairs[..., 0] + 1j * pairs[..., 1]
    if matrix.shape != shape:
        raise ValueError(f"Expected a {shape} matrix, got {matrix.shape}")
    return matrix


def _read_only(array: np.ndarray) -> np.ndarray:
    """Return a read-only copy of an array."""
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


class _ArrayModel(BaseModel):
    """Base for immutable models that hold numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, populate_by_name=True)


class Frame(_ArrayModel):
    """A k-dimensional subspace of C^n given by orthonormal columns.

    Attributes:
        columns: n×k complex matrix with orthonormal columns.
        ambient_dim: n.
        rank: k.
    """

    columns: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _decode_columns(cls, data: typing.Any) -> typing.Any:
        """Turn the column-major JSON payload into an n×k array.

        Args:
            data: raw model input.

        Returns:
            The input with ``columns`` as an array.

        Raises:
            ValueError: if the declared rank does not match the columns.
        """
        if not isinstance(data, dict) or isinstance(data.get("columns"), np.ndarray):
            return data
        columns = data.get("columns", [])
        ambient_dim = int(data.get("ambient_dim", len(columns[0]) if columns else 0))
        by_column = decode_complex_matrix(columns, (len(columns), ambient_dim))
        if "rank" in data and int(data["rank"]) != len(columns):
            raise ValueError(f"Declared rank {data['rank']} but {len(columns)} columns given")
        return {"columns": by_column.T}

    @field_validator("columns")
    @classmethod
    def _check_orthonormal(cls, value: np.ndarray) -> np.ndarray:
        """Check the orthonormality invariant.

        Args:
            value: the columns.

        Returns:
            A read-only complex copy.

        Raises:
            ValueError: if the columns are not orthonormal.
        """
        value = np.asarray(value, dtype=complex)
        if value.ndim != 2:
            raise ValueError(f"Frame columns must be a matrix, got {value.ndim} dimensions")
        defect = np.linalg.norm(value.conj().T @ value - np.eye(value.shape[1]))
        if defect > FRAME_TOL:
            raise ValueError(f"Frame columns are not orthonormal (defect {defect:.3e})")
        return _read_only(value)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def ambient_dim(self) -> int:
        """Dimension n of the ambient space."""
        return int(self.columns.shape[0])

    @computed_field  # type: ignore[prop-decorator]
    @property
    def rank(self) -> int:
        """Dimension k of the subspace."""
        return int(self.columns.shape[1])

    @field_serializer("columns")
    def _encode_columns(self, value: np.ndarray) -> typing.List[typing.Any]:
        """Encode the columns column-major."""
        return encode_complex_matrix(value.T)


class Spectrum(_ArrayModel):
    """Spectral decomposition of a Hermitian operator.

    Attributes:
        eigenvalues: real eigenvalues sorted descending.
        eigenvectors: unitary matrix whose columns are the eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class SemilinearMap(_ArrayModel):
    """A linear (sigma = id) or conjugate-linear (sigma = conj) map C^n -> C^n''.

    The isometry invariant is enforced where the map is used, so that
    perturbed maps can still be loaded and diagnosed.

    Attributes:
        matrix: n''×n complex matrix.
        sigma: the field automorphism.
    """

    matrix: np.ndarray
    sigma: Sigma = Sigma.IDENTITY

    @model_validator(mode="before")
    @classmethod
    def _decode_matrix(cls, data: typing.Any) -> typing.Any:
        """Decode a JSON matrix payload.

        Args:
            data: raw model input.

        Returns:
            The input with ``matrix`` as an array.
        """
        if isinstance(data, dict) and not isinstance(data.get("matrix"), np.ndarray):
            rows = data.get("matrix", [])
            shape = (len(rows), len(rows[0]) if rows else 0)
            data = {**data, "matrix": decode_complex_matrix(rows, shape)}
        return data

    @field_validator("matrix")
    @classmethod
    def _check_matrix(cls, value: np.ndarray) -> np.ndarray:
        """Check the matrix shape.

        Args:
            value: the matrix.

        Returns:
            A read-only complex copy.

        Raises:
            ValueError: if the value is not a matrix.
        """
        value = np.asarray(value, dtype=complex)
        if value.ndim != 2:
            raise ValueError("Semilinear map matrix must be two dimensional")
        return _read_only(value)

    @field_serializer("matrix")
    def _encode_matrix(self, value: np.ndarray) -> typing.List[typing.Any]:
        """Encode the matrix row-major."""
        return encode_complex_matrix(value)

    @property
    def source_dim(self) -> int:
        """Dimension of the domain."""
        return int(self.matrix.shape[1])

    @property
    def target_dim(self) -> int:
        """Dimension of the codomain."""
        return int(self.matrix.shape[0])

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """Apply the map to a vector or to the columns of a matrix.

        Args:
            vectors: a vector or a matrix of column vectors.

        Returns:
            matrix·x, or matrix·conj(x) for a conjugate-linear map.
        """
        vectors = np.asarray(vectors, dtype=complex)
        if self.sigma is Sigma.CONJUGATION:
            vectors = vectors.conj()
        return self.matrix @ vectors

    def isometry_defect(self) -> float:
        """Return ‖U†U − I‖_F."""
        return float(np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(self.source_dim)))


class OperatorMap(_ArrayModel):
    """A real-linear map from Hermitian n×n matrices to Hermitian n'×n' matrices.

    Attributes:
        n: source Hilbert space dimension.
        n_prime: target Hilbert space dimension.
        k: source projection rank, when known.
        m: target projection rank, when known.
        matrix: real n'²×n² matrix in canonical Hermitian basis coordinates.
    """

    n: int = Field(ge=1)
    n_prime: int = Field(ge=1)
    k: typing.Optional[int] = None
    m: typing.Optional[int] = None
    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _decode_matrix(cls, value: typing.Any) -> np.ndarray:
        """Accept nested lists as well as arrays.

        Args:
            value: raw matrix.

        Returns:
            The matrix as a read-only float array.

        Raises:
            ValueError: if the matrix has an imaginary part.
        """
        array = np.asarray(value)
        if np.iscomplexobj(array):
            if np.any(array.imag != 0):
                raise ValueError("Operator map matrices are real")
            array = array.real
        return _read_only(np.asarray(array, dtype=float))

    @model_validator(mode="after")
    def _check_shape(self) -> "OperatorMap":
        """Check the matrix shape against n and n_prime.

        Returns:
            The validated model.

        Raises:
            ValueError: if the matrix shape does not match.
        """
        expected = (self.n_prime**2, self.n**2)
        if self.matrix.shape != expected:
            raise ValueError(f"Expected a {expected} matrix, got {self.matrix.shape}")
        return self

    @field_serializer("matrix")
    def _encode_matrix(self, value: np.ndarray) -> typing.List[typing.Any]:
        """Encode the matrix row-major."""
        return value.tolist()


class Witness(_ArrayModel):
    """Counterexample found by a condition checker.

    Attributes:
        inputs: the offending input projections.
        note: what went wrong.
    """

    inputs: typing.List[np.ndarray]
    note: str

    @field_validator("inputs", mode="before")
    @classmethod
    def _decode_inputs(cls, value: typing.Any) -> typing.List[np.ndarray]:
        """Decode JSON matrices.

        Args:
            value: raw inputs.

        Returns:
            The inputs as read-only complex arrays.
        """
        decoded = []
        for item in value:
            if not isinstance(item, np.ndarray):
                size = len(item)
                item = decode_complex_matrix(item, (size, size))
            decoded.append(_read_only(np.asarray(item, dtype=complex)))
        return decoded

    @field_serializer("inputs")
    def _encode_inputs(self, value: typing.List[np.ndarray]) -> typing.List[typing.Any]:
        """Encode the inputs as row-major matrices."""
        return [encode_complex_matrix(item) for item in value]


class ConditionReport(BaseModel):
    """Outcome of a sampled condition check.

    Attributes:
        condition: which condition was checked.
        samples: number of sampled projections.
        seed: seed of the sampler.
        passed: whether no counterexample was found.
        witnesses: counterexamples, non-empty when the check failed.
        inferred_m: rank of the image projections, when known.
    """

    model_config = ConfigDict(frozen=True)

    condition: Condition
    samples: int = Field(ge=0)
    seed: int
    passed: bool
    witnesses: typing.List[Witness] = Field(default_factory=list)
    inferred_m: typing.Optional[int] = None

    @model_validator(mode="after")
    def _check_witnesses(self) -> "ConditionReport":
        """A failed report must carry a witness.

        Returns:
            The validated model.

        Raises:
            ValueError: if a failed report has no witness.
        """
        if not self.passed and not self.witnesses:
            raise ValueError("A failed condition report needs at least one witness")
        return self


class Star(BaseModel):
    """All k-dimensional subspaces containing a (k-1)-dimensional base.

    Attributes:
        base: the common (k-1)-dimensional subspace.
    """

    model_config = ConfigDict(frozen=True)

    base: Frame

    @field_validator("base")
    @classmethod
    def _check_base(cls, value: Frame) -> Frame:
        """Check that the base is not zero.

        Args:
            value: the base frame.

        Returns:
            The base frame.

        Raises:
            ValueError: if the base has rank 0.
        """
        if value.rank < 1:
            raise ValueError("A star needs a base of rank at least 1")
        return value

    @property
    def k(self) -> int:
        """Rank of the members."""
        return self.base.rank + 1


class Top(BaseModel):
    """All k-dimensional subspaces of a (k+1)-dimensional roof.

    Attributes:
        roof: the common (k+1)-dimensional subspace.
    """

    model_config = ConfigDict(frozen=True)

    roof: Frame

    @field_validator("roof")
    @classmethod
    def _check_roof(cls, value: Frame) -> Frame:
        """Check that members have positive rank.

        Args:
            value: the roof frame.

        Returns:
            The roof frame.

        Raises:
            ValueError: if the roof has rank below 2.
        """
        if value.rank < 2:
            raise ValueError("A top needs a roof of rank at least 2")
        return value

    @property
    def k(self) -> int:
        """Rank of the members."""
        return self.roof.rank - 1


class GeodesicPath(BaseModel):
    """A path of subspaces of equal rank, consecutive ones adjacent.

    Attributes:
        vertices: the subspaces along the path.
    """

    model_config = ConfigDict(frozen=True)

    vertices: typing.List[Frame] = Field(min_length=1)

    @field_validator("vertices")
    @classmethod
    def _check_ranks(cls, value: typing.List[Frame]) -> typing.List[Frame]:
        """Check that all vertices share rank and ambient dimension.

        Args:
            value: the vertices.

        Returns:
            The vertices.

        Raises:
            ValueError: on mixed ranks or ambient dimensions.
        """
        shapes = {(vertex.ambient_dim, vertex.rank) for vertex in value}
        if len(shapes) != 1:
            raise ValueError(f"Geodesic vertices have mixed shapes {sorted(shapes)}")
        return value

    @property
    def length(self) -> int:
        """Number of edges."""
        return len(self.vertices) - 1


class XSetSample(BaseModel):
    """Members of X_k(X, Y) found by local search.

    Attributes:
        x: the first subspace.
        y: the second subspace.
        points: verified members.
        seed: seed of the search.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    x: Frame = Field(alias="X")
    y: Frame = Field(alias="Y")
    points: typing.List[Frame] = Field(default_factory=list)
    seed: int


class LocalDimension(BaseModel):
    """Two independent estimates of the local dimension of X_k(X, Y).

    Attributes:
        jacobian: nullity of the constraint Jacobian on the tangent space.
        pca: number of significant principal components of nearby members.
    """

    model_config = ConfigDict(frozen=True)

    jacobian: int = Field(ge=0)
    pca: int = Field(ge=0)

    @property
    def agreed(self) -> bool:
        """Whether both estimators give the same integer."""
        return self.jacobian == self.pca


class Classification(BaseModel):
    """Result of decomposing an operator.

    Attributes:
        tag: which model fits.
        k: source projection rank.
        m: inferred target projection rank.
        isometry: the recovered semilinear isometry U.
        padding: the recovered padding subspace W.
        residual: max probe residual between the operator and the model.
        matrix_difference: max entrywise difference of the two real matrices.
        reports: the condition reports.
        reason: rejection reason.
        detail: human readable detail for a rejection.
        coincidence: whether both dim H = 2k branches fitted.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    tag: Tag
    k: int
    m: typing.Optional[int] = None
    isometry: typing.Optional[SemilinearMap] = Field(default=None, alias="U")
    padding: typing.Optional[Frame] = Field(default=None, alias="W")
    residual: typing.Optional[float] = None
    matrix_difference: typing.Optional[float] = None
    reports: typing.List[ConditionReport] = Field(default_factory=list)
    reason: typing.Optional[str] = None
    detail: typing.Optional[str] = None
    coincidence: bool = False

    @model_validator(mode="after")
    def _check_residual(self) -> "Classification":
        """An accepted classification must have a small residual.

        Returns:
            The validated model.

        Raises:
            ValueError: if an accepted classification has a large residual.
        """
        if self.tag is not Tag.REJECTED and (
            self.residual is None or self.residual > CLASSIFY_TOL
        ):
            raise ValueError(f"Accepted classification with residual {self.residual}")
        return self


class VerificationReport(BaseModel):
    """Independent re-validation of a classification.

    Attributes:
        residual: max probe residual.
        matrix_difference: max entrywise difference of the real matrices.
        probes: number of probe projections.
        accepted: whether both numbers are within tolerance.
    """

    model_config = ConfigDict(frozen=True)

    residual: float
    matrix_difference: float
    probes: int
    accepted: bool


class RelationReport(BaseModel):
    """Relations preserved by an induced map of Grassmannians on probe pairs.

    Attributes:
        pairs: number of probe pairs per relation.
        orthogonality_law: orthogonal pairs go to compatible pairs meeting in m - k.
        adjacency_both_directions: adjacency is preserved and reflected.
        ortho_adjacency: ortho-adjacent pairs go to ortho-adjacent pairs.
        transport_inclusion: f(X_k(X, Y)) lies in X_m(f(X), f(Y)).
        failures: descriptions of the failing probes.
    """

    model_config = ConfigDict(frozen=True)

    pairs: int
    orthogonality_law: bool
    adjacency_both_directions: bool
    ortho_adjacency: bool
    transport_inclusion: bool
    failures: typing.List[str] = Field(default_factory=list)


class GroundTruth(_ArrayModel):
    """Ground truth written next to a generated operator.

    Attributes:
        kind: the construction that produced the operator.
        k: source projection rank.
        m: target projection rank.
        isometry: the isometry used, when any.
        padding: the padding subspace used, when any.
        projection: the collapse target, when any.
    """

    kind: str
    k: int
    m: int
    isometry: typing.Optional[SemilinearMap] = Field(default=None, alias="U")
    padding: typing.Optional[Frame] = Field(default=None, alias="W")
    projection: typing.Optional[np.ndarray] = Field(default=None, alias="P")

    @field_validator("projection", mode="before")
    @classmethod
    def _decode_projection(cls, value: typing.Any) -> typing.Optional[np.ndarray]:
        """Decode a JSON matrix.

        Args:
            value: raw projection.

        Returns:
            The projection, if any.
        """
        if value is None or isinstance(value, np.ndarray):
            return value
        return decode_complex_matrix(value, (len(value), len(value)))

    @field_serializer("projection")
    def _encode_projection(self, value: typing.Optional[np.ndarray]) -> typing.Any:
        """Encode the projection row-major."""
        return None if value is None else encode_complex_matrix(value)


class PropertyTally(BaseModel):
    """Pass count for one property of a verification suite.

    Attributes:
        passed: number of passing cases.
        total: number of cases.
    """

    passed: int = 0
    total: int = 0

    @property
    def ok(self) -> bool:
        """Whether every case passed."""
        return self.passed == self.total


class SuiteSummary(BaseModel):
    """Summary printed by the verify command.

    Attributes:
        suite: the suite name.
        seed: the seed.
        properties: tallies by property name.
        ok: whether every property passed.
    """

    suite: str
    seed: int
    properties: typing.Dict[str, PropertyTally]
    ok: bool


class RunConfig(BaseModel):
    """Options shared by every command.

    Attributes:
        seed: seed of every random draw.
        tol: numerical tolerance of the condition checks.
        samples: number of sampled projections.
        threads: cap on worker threads, 0 meaning one per CPU.
        log_level: level of the stderr log.
        input_path: input file, when the command reads one.
        output_path: output file, when the command writes one.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=1)
    tol: float = Field(gt=0)
    samples: int = Field(ge=1)
    threads: int = Field(ge=0)
    log_level: str = "WARNING"
    input_path: typing.Optional[pathlib.Path] = None
    output_path: typing.Optional[pathlib.Path] = None

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        """Normalize and check the log level.

        Args:
            value: the input value.

        Returns:
            The upper-cased level name.

        Raises:
            ValueError: if the level is unknown.
        """
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown log level: {value}")
        return level


class SuiteScale(BaseModel):
    """Case counts of the verification suites.

    Attributes:
        max_dim: largest ambient dimension visited.
        graph_pairs: random pairs per (n, k) for the distance formula.
        maximality_candidates: candidates drawn for each of the top and star families.
        compatible_pairs: compatible pairs extended to orthogonal geodesics.
        xset_pairs: pairs per X_k class.
        condition_trials: seeded condition checker trials.
        unitaries: random unitaries in the dim H = 2k branch test.
        classify_samples: condition samples used inside each round-trip classification.
    """

    model_config = ConfigDict(frozen=True)

    max_dim: int = Field(default=6, ge=3)
    graph_pairs: int = Field(default=500, ge=1)
    maximality_candidates: int = Field(default=1000, ge=1)
    compatible_pairs: int = Field(default=200, ge=1)
    xset_pairs: int = Field(default=20, ge=1)
    condition_trials: int = Field(default=50, ge=1)
    unitaries: int = Field(default=50, ge=1)
    classify_samples: int = Field(default=50, ge=2)


class CheckSummary(BaseModel):
    """Output of the check command.

    Attributes:
        k: source projection rank.
        inferred_m: rank of the image projections, when L1 holds.
        reports: the condition reports in order L1, L2, L3.
        passed: whether every report passed.
    """

    model_config = ConfigDict(frozen=True)

    k: int
    inferred_m: typing.Optional[int] = None
    reports: typing.List[ConditionReport]
    passed: bool


class XSetReport(BaseModel):
    """Output of the xset command.

    Attributes:
        classification: shape of X_k(X, Y).
        count: number of members found.
        sample: the members found.
        local_dimensions: both dimension estimates at up to three members.
    """

    model_config = ConfigDict(frozen=True)

    classification: GeherClass
    count: int
    sample: XSetSample
    local_dimensions: typing.List[LocalDimension] = Field(default_factory=list)
