"""Exception hierarchy shared by every cmdeg module."""

from __future__ import annotations

from typing import Any


class CmdegError(Exception):
    """Base class for all errors raised by cmdeg."""


class DomainError(CmdegError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class UnsupportedError(CmdegError):
    """The operation deliberately does not cover this parameter combination."""


class PrecisionError(CmdegError):
    """A precision context is invalid or a truncation could not be certified."""


class QuadratureNonConvergence(CmdegError):
    """Refinement hit its level or node cap before meeting the tolerance.

    The partial result is kept on ``result`` so callers can report it.
    """

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result


class InconclusiveError(CmdegError):
    """A scan or bracket could not reach a certified decision.

    ``report`` holds whatever evidence was collected before giving up.
    """

    def __init__(self, message: str, report: Any = None) -> None:
        super().__init__(message)
        self.report = report
