"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: validation problems exit 1,
numerical/computation problems exit 2, and I/O problems (plain OSError)
exit 3.
"""

from __future__ import annotations


class CooldecompError(Exception):
    """Base class for all package errors."""


class ValidationError(CooldecompError):
    """Invalid inputs: bad values, malformed files, empty selections.

    ``issues`` carries one message per offending row/column/field so a
    rejection can list every problem, not just the first.
    """

    def __init__(self, message: str, issues: list[str] | None = None):
        self.issues = list(issues) if issues else []
        if self.issues:
            message = message + "\n" + "\n".join("  - " + i for i in self.issues)
        super().__init__(message)


class ComputationError(CooldecompError):
    """Numerical failure: singular system, non-finite level, accuracy breach."""


class SingularMatrixError(ComputationError):
    """The decomposition system matrix could not be solved."""

    def __init__(self, segment: int):
        self.segment = segment
        super().__init__(f"singular system matrix at integration segment {segment}")
