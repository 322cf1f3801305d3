"""Exception hierarchy shared across the toolkit.

Every domain error derives from :class:`SelkitError` so callers (and the
command line layer) can catch one base class and map it to a diagnostic.
"""


class SelkitError(Exception):
    """Base class for all toolkit errors."""


# --- dataset ingestion / serialization ------------------------------------

class MissingFileError(SelkitError):
    """Input file does not exist."""


class ParseError(SelkitError):
    """A cell or row of a text input could not be parsed."""

    def __init__(self, row: int, col: int, message: str):
        super().__init__(f"row {row}, column {col}: {message}")
        self.row = row
        self.col = col


class MissingTargetError(SelkitError):
    """The requested target column is not in the header."""


class NonFiniteValueError(SelkitError):
    """NaN or infinite value encountered where finite reals are required."""


class WriteError(SelkitError):
    """Output file could not be written."""


# --- core numeric preconditions -------------------------------------------

class DegenerateSplitError(SelkitError):
    """A train/test split would leave one side empty."""


class DegenerateVarianceError(SelkitError):
    """An operation requires strictly positive variance."""


class NonPositiveScaleError(SelkitError):
    """Scale parameter must be strictly positive."""


class TooShortError(SelkitError):
    """Input sequence is shorter than the operation requires."""


class EmptyInputError(SelkitError):
    """Operation requires at least one element."""


class InvalidProbabilityError(SelkitError):
    """Probabilities must be sorted and lie in [0, 1]."""


class InvalidAlphaError(SelkitError):
    """Smoothing factor must lie in (0, 1]."""


class EmptyCorpusError(SelkitError):
    """Corpus must contain at least one non-empty document."""


class LengthMismatchError(SelkitError):
    """Paired vectors must have equal length."""


# --- estimation -------------------------------------------------------------

class ConvergenceError(SelkitError):
    """Iterative fit failed to converge within its iteration budget."""


class DisconnectedScheduleError(SelkitError):
    """Match schedule splits into groups with no cross-matches."""


class UnknownTeamError(SelkitError):
    """Team does not appear in the supplied matches."""


class FutureMatchError(SelkitError):
    """Match date lies after the reference date."""


class RankDeficientError(SelkitError):
    """Design matrix does not have full column rank."""


# --- learners ---------------------------------------------------------------

class TooFewRowsError(SelkitError):
    """Not enough rows to fit the requested model."""


class InvalidMtryError(SelkitError):
    """Per-split feature sample size must be in [1, feature count]."""


class InvalidRateError(SelkitError):
    """Learning rate must lie in (0, 1]."""


class MissingFeatureError(SelkitError):
    """A feature required by the model is absent from the dataset."""


# --- image ingestion --------------------------------------------------------

class UnsupportedFormatError(SelkitError):
    """Raster file is not a supported PGM/PPM variant."""


class MaxvalTooLargeError(SelkitError):
    """Raster maxval exceeds the 8-bit range."""


class TruncatedPayloadError(SelkitError):
    """Raster payload ends before all pixels are read."""


# --- command line -----------------------------------------------------------

class UsageError(SelkitError):
    """Invalid command-line invocation."""
