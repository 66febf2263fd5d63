"""Exception types shared across the package."""


class NovactError(Exception):
    """Base class for all novact errors."""


class DegenerateRange(NovactError):
    """A joint dimension has zero width in the training data."""


class AllZero(NovactError):
    """A softmax block is numerically all zero and cannot be decoded."""


class DimensionMismatch(NovactError):
    """Trajectory/sequence dimensions disagree with the codec layout."""


class ShapeMismatch(NovactError):
    """Array shapes disagree with the network structure."""


class ParseError(NovactError):
    """A manifest or CSV file could not be parsed."""


class InconsistentDims(NovactError):
    """Trajectory files in one training set disagree on joint count."""


class NonFinite(NovactError):
    """Input data contains NaN or infinite values."""


class MissingTeacher(NovactError):
    """Teacher frames are required whenever the closed-loop ratio is below 1."""


class Diverged(NovactError):
    """Training loss became non-finite."""


class VersionMismatch(NovactError):
    """Checkpoint format tag is not recognized."""


class CorruptCheckpoint(NovactError):
    """Checkpoint file is truncated or structurally invalid."""


class InsufficientPatterns(NovactError):
    """Not enough patterns to draw the requested sample."""


class CheckpointLoadError(NovactError):
    """Service could not load the configured checkpoint."""


class BindError(NovactError):
    """Service could not bind the requested address."""
