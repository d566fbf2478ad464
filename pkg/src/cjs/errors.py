"""Exception hierarchy for the cjs package.

Every error raised by library code derives from :class:`CJSError`, so callers
(CLI, HTTP service) can catch one type and map it to an exit code / 400.
"""


class CJSError(Exception):
    """Base class for all cjs errors."""


# data loading / encoding
class ParseError(CJSError):
    """A data file could not be parsed (bad token, ragged row, non-finite value)."""


class LabelLengthMismatch(CJSError):
    """Label file length differs from the number of feature samples."""


class LabelOutOfRange(CJSError):
    """A class label falls outside [0, n_classes)."""


class DimensionMismatch(CJSError):
    """Operands live in different ambient dimensions."""


class MixedLabeling(CJSError):
    """Attempt to merge labeled and unlabeled datasets."""


# numerical kernels
class ZeroMatrix(CJSError):
    """All columns of a sample matrix are numerically zero."""


class SingularSystem(CJSError):
    """The structured Sylvester operator is numerically singular."""


# clustering / anchors
class TooManyClusters(CJSError):
    """Requested more k-means groups than there are samples."""


class NoAnchors(CJSError):
    """No group was large enough to yield an anchor subspace."""


# classification
class EmptyClass(CJSError):
    """A class has no member samples."""


class SolverFailure(CJSError):
    """The SVM solver exhausted its epoch budget above the duality-gap tolerance."""


# evaluation / generation
class LengthMismatch(CJSError):
    """Prediction and truth vectors have different lengths."""


class BadDimensions(CJSError):
    """Synthetic generator dimensions are inconsistent."""
