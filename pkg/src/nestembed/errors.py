"""Exception types shared across the package.

Every error raised on purpose derives from NestembedError so callers can
separate library failures from programming mistakes. Configuration errors
(bad flags, bad hyperparameters) are kept distinct from runtime/data errors
because the CLI maps them to different exit codes.
"""

from __future__ import annotations


class NestembedError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(NestembedError):
    """Invalid configuration value (bad ladder, bad fractions, F not a power of two, ...)."""


class DimensionError(NestembedError):
    """Dimension out of range or mismatched between operands."""


class ZeroVectorError(NestembedError):
    """An operation that needs a nonzero vector received one with near-zero norm."""


class LabelError(NestembedError):
    """Class label outside [0, L)."""


class EmptyBatchError(NestembedError):
    """A loss was asked to reduce over zero examples."""


class EmptyDatasetError(NestembedError):
    """Training was started with no rows."""


class DivergenceError(NestembedError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, batch_index: int):
        super().__init__(message)
        self.batch_index = batch_index


class FormatError(NestembedError):
    """A binary file failed structural validation; `offset` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class SchemaError(NestembedError):
    """CSV header does not match the expected schema."""


class RowError(NestembedError):
    """A CSV data row is malformed; `line` is the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DecodeError(NestembedError):
    """Input bytes are not valid UTF-8; `offset` is the first bad byte."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ScoreRangeError(NestembedError):
    """A raw gold score lies outside its declared source range."""


class UndefinedCorrelationError(NestembedError):
    """Correlation of a constant series is undefined and refused."""


class ResultSizeError(NestembedError):
    """A search result holds fewer entries than the requested cutoff."""


class FingerprintError(NestembedError):
    """Corpus was built with a different encoder model."""
