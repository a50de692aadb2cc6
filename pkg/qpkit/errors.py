"""
Exception hierarchy for qpkit.

Library code raises these; the tool layer turns them into {"error": ...} dicts
and the CLI turns them into exit codes.
"""


class QPKitError(Exception):
    """Base class for every error raised by qpkit."""


class QuiverFormatError(QPKitError):
    """Malformed or invalid input file (quiver, QP, algebra, representation)."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class AlgebraError(QPKitError):
    """An algebra violates a precondition (admissibility, finiteness, gldim)."""


class BoundExceeded(QPKitError):
    """A computation hit the configured degree or power bound."""


class WindowError(QPKitError):
    """A mesh query left the knitted window."""


class PipelineError(QPKitError):
    """A stage of the slice pipeline failed."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
