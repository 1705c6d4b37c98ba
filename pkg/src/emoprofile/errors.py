"""Exception hierarchy shared across the package.

Every error raised by this package derives from EmoprofileError, so callers
can catch one type at the boundary.  Data/validation problems and backend
availability problems are kept on separate branches because the CLI maps
them to different exit codes.
"""

from __future__ import annotations


class EmoprofileError(Exception):
    """Base class for all errors raised by this package."""


class DataError(EmoprofileError):
    """Invalid input data, configuration, or serialized state."""


class UnknownLabelError(DataError):
    """An emotion label outside the 32-label vocabulary was used."""


class AllZeroCountsError(DataError):
    """A counts map with zero total cannot be normalized."""


class EmptyInputError(DataError):
    """An operation that needs at least one element received none."""


class AllZeroWeightsError(DataError):
    """Mixing weights are all zero."""


class EmptySampleSetError(DataError):
    """No samples to aggregate."""


class IncompleteHistoryTurnError(DataError):
    """A history turn is missing its emotion or response."""


class ReservedTokenError(DataError):
    """User text contains a special-token literal; rejected, not escaped."""


class MalformedFormatError(DataError):
    """Serialized conversation violates the token layout.

    ``offset`` is the byte offset (UTF-8) where parsing failed.
    """

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class BackendUnavailableError(EmoprofileError):
    """The classifier backend could not serve the request (after retries)."""


class AllSamplesDiscardedError(EmoprofileError):
    """Every sampled emotion fell outside the vocabulary.

    Callers decide whether to skip the prompt; ``discarded`` carries how
    many generations were dropped.
    """

    def __init__(self, discarded: int) -> None:
        super().__init__(f"all {discarded} sampled emotions were out of vocabulary")
        self.discarded = discarded


class UnknownSessionError(DataError):
    """Session id not present in the store."""


class EmptySessionError(DataError):
    """The session has no accumulated samples yet."""


class EmptyReferenceSetError(DataError):
    """A distance table needs at least one reference."""


class EmptyCorpusError(DataError):
    """No usable segments remain after segmentation and filtering."""


class SchemaViolationError(DataError):
    """A persisted document failed validation; ``path`` names the field."""

    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class MissingPolarityClassError(DataError):
    """Screening needs at least one positive and one negative reference."""


class MalformedDatasetError(DataError):
    """An evaluation dataset file is structurally invalid."""
