"""Exception types shared across the package."""


class EchokitError(Exception):
    """Base class for all echokit errors."""


class ValidationError(EchokitError, ValueError):
    """A parameter, config value, or data invariant is violated."""


class UnsupportedFormatError(EchokitError):
    """File is recognizable but not a supported image format/bit depth."""


class CorruptImageError(EchokitError):
    """File claims a supported format but its contents are malformed."""


class TrainingDivergedError(EchokitError):
    """Network training produced a non-finite loss."""


class PipelineError(EchokitError):
    """A pipeline stage failed; the message names the stage."""
