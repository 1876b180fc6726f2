"""Exception hierarchy shared by the engine, the HTTP service, and the CLI.

Every error carries a stable machine-readable ``code`` so the service can
serialize it into an API error object and the CLI can print it uniformly.
"""

from __future__ import annotations

from typing import Any


class PcpError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_api_error(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


class EmptyDatasetError(PcpError):
    """Fewer than two usable rows survived ingestion."""

    code = "empty_dataset"


class NonNumericColumnError(PcpError):
    """A selected column has no numeric interpretation at all."""

    code = "non_numeric_column"


class DuplicateColumnNameError(PcpError):
    code = "duplicate_column_name"


class UnknownColumnError(PcpError):
    """A selected column is missing from the header (or the header is blank)."""

    code = "unknown_column"


class LengthMismatchError(PcpError):
    code = "length_mismatch"


class ZeroBandwidthError(PcpError):
    code = "zero_bandwidth"


class NoActivePropertiesError(PcpError):
    """All property weights are zero; a weighted score is undefined."""

    code = "no_active_properties"


class EmptyMatrixError(PcpError):
    """An ordering was requested over fewer than two axes."""

    code = "empty_matrix"


class InvalidAxisPairError(PcpError):
    """A diagonal pair (i, i) was requested."""

    code = "invalid_pair"


class UnknownAxisError(PcpError):
    code = "unknown_axis"


class AxisAlreadyUsedError(PcpError):
    code = "axis_already_used"


class BrokenChainError(PcpError):
    """A chosen pair does not start at the tail of the fixed prefix."""

    code = "broken_chain"


class NothingToUndoError(PcpError):
    code = "nothing_to_undo"


class UnknownDatasetError(PcpError):
    code = "unknown_dataset"


class UnknownSessionError(PcpError):
    code = "unknown_session"
