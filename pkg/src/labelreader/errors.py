"""Exception types shared across the package."""


class LabelReaderError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LabelReaderError):
    """A parameter is outside its documented range."""


class DimensionError(LabelReaderError):
    """Image, mask, or vector dimensions violate an operation's contract."""


class NoObjectDetectedError(LabelReaderError):
    """Foreground aggregation produced nothing above the persistence threshold."""


class DegenerateInputError(LabelReaderError):
    """Input carries no usable signal (constant patch, single-class samples)."""


class ImageFormatError(LabelReaderError):
    """A PPM/PGM file is malformed or uses an unsupported variant."""


class ModelFormatError(LabelReaderError):
    """A classifier model or feature-record file is malformed."""


class GroundTruthError(LabelReaderError):
    """A ground-truth or detections file cannot be parsed."""


class ConfigError(LabelReaderError):
    """A configuration file contains unknown keys or invalid values."""


class OcrError(LabelReaderError):
    """The external OCR command failed, timed out, or was misconfigured."""


class TtsError(LabelReaderError):
    """The external speech command failed or was misconfigured."""
