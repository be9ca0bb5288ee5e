"""Shared exception base for the whole package.

Every error carries a stable machine-readable ``code`` so the service layer
can map exceptions to HTTP responses without string matching.
"""


class RoomSimError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ZoneCountMismatchError(RoomSimError):
    """The document does not contain exactly one thermal zone."""

    code = "zone_count_mismatch"
