"""Exception hierarchy shared across the package."""


class RwdetectError(Exception):
    """Base class for all package errors."""


class DataFormatError(RwdetectError):
    """A dataset or report file violates its documented format."""


class SplitError(RwdetectError):
    """A train/test split cannot be constructed as requested."""


class FitError(RwdetectError):
    """A model cannot be trained on the given input."""


class FingerprintMismatch(RwdetectError):
    """A model was asked to score data from a different feature space."""


class ModelFormatError(RwdetectError):
    """A serialized model payload is malformed or incompatible."""
