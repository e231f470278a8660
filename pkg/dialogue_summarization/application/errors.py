from __future__ import annotations


class DialsumError(ValueError):
    """Base class for every error raised by the summarization pipeline."""


class TranscriptError(DialsumError):
    """A transcript or reference file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TaggingError(DialsumError):
    pass


class GraphError(DialsumError):
    pass


class NoKeywordsError(GraphError):
    pass


class SegmentationError(DialsumError):
    pass


class ConfigError(DialsumError):
    pass
