"""Exception types shared across the package.

Each maps to a distinct CLI exit code (see :mod:`torpid.cli`).
"""

from __future__ import annotations

from typing import Any


class TorpidError(Exception):
    """Base class for all package errors."""


class GuardExceeded(TorpidError):
    """A brute-force computation would exceed its configured size limit."""

    def __init__(self, what: str, size: int | float, limit: int | float):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: size {size} exceeds limit {limit}")


class InvalidInput(TorpidError, ValueError):
    """Input violates an operation's precondition."""


class StructuralPropertyError(TorpidError):
    """The level-by-level height construction failed; carries a witness."""

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)
