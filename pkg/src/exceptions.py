# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Exceptions used by the wigner lab."""


class WignerLabError(Exception):
    """Base exception for every failure raised by the lab.

    Attrs:
        msg (str): Explanation of the error.
    """

    def __init__(self, msg: str):
        """Initialize a new instance of the WignerLabError exception.

        Args:
            msg (str): Explanation of the error.
        """
        super().__init__(msg)
        self.msg = msg


class InvalidParameterError(WignerLabError):
    """Exception raised when a count, rank or tolerance is out of range."""


class NonHermitianInputError(WignerLabError):
    """Exception raised when a matrix is not Hermitian within tolerance."""


class DimensionMismatchError(WignerLabError):
    """Exception raised when operands live in spaces of different dimension."""


class RankMismatchError(WignerLabError):
    """Exception raised when two frames are required to have the same rank."""


class RankDeficientError(WignerLabError):
    """Exception raised when vectors do not have the expected numerical rank."""


class BadRankError(WignerLabError):
    """Exception raised when a projection rank is outside its admissible range."""


class NotAProjectionError(WignerLabError):
    """Exception raised when an operator is expected to be a projection but is not."""


class NotCompatibleError(WignerLabError):
    """Exception raised when two subspaces are expected to be compatible but are not."""


class InsufficientAmbientDimError(WignerLabError):
    """Exception raised when the ambient space is too small for a construction."""


class NotAnIsometryError(WignerLabError):
    """Exception raised when a matrix does not have orthonormal columns."""


class NotOrthogonalError(WignerLabError):
    """Exception raised when a padding subspace meets the range of the isometry."""


class PreconditionViolatedError(WignerLabError):
    """Exception raised when a checker is run on an operator outside its domain."""


class NotAMemberError(WignerLabError):
    """Exception raised when a frame is not a member of the set X_k(X, Y)."""


class EstimatorDisagreementError(WignerLabError):
    """Exception raised when the two local dimension estimators disagree."""


class CrossValidationError(WignerLabError):
    """Exception raised when a classification fails its independent cross-check."""


class ModelFitError(WignerLabError):
    """Base exception for failures while reconstructing an operator model."""


class ImageNotProjectionError(ModelFitError):
    """Exception raised when an operator sends a projection to a non-projection."""


class InconsistentStarImagesError(ModelFitError):
    """Exception raised when two star samples give different descended images."""


class UnstableIntersectionError(ModelFitError):
    """Exception raised when the extracted padding subspace misses a fresh probe."""


class NotSemilinearError(ModelFitError):
    """Exception raised when a map of lines is not induced by a semilinear injection."""


class SigmaAmbiguousError(ModelFitError):
    """Exception raised when the field automorphism is neither identity nor conjugation."""


class InputFormatError(WignerLabError):
    """Exception raised when an input file cannot be read or parsed."""


class SpectralDecompositionError(WignerLabError):
    """Exception raised when an eigendecomposition does not reproduce its matrix."""
