"""Exception types shared across the package."""


class GbmDeskError(Exception):
    """Base class for every error raised by gbmdesk."""


class IngestError(GbmDeskError):
    """CSV ingestion failure; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class EmptyFile(IngestError):
    pass


class MalformedRow(IngestError):
    pass


class DuplicateDate(IngestError):
    pass


class UnparseableDate(IngestError):
    pass


class SeriesTooShort(GbmDeskError):
    pass


class SeriesTooLong(GbmDeskError):
    pass


class ZeroVariance(GbmDeskError):
    pass


class RankDeficient(GbmDeskError):
    pass


class DegenerateSplit(GbmDeskError):
    pass


class DomainError(GbmDeskError):
    pass


class LengthMismatch(GbmDeskError):
    pass


class IoError(GbmDeskError):
    pass
