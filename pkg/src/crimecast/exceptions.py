"""Shared exception types for validation and numeric failure modes."""

from __future__ import annotations

from typing import Iterable


class CrimecastError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(CrimecastError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(CrimecastError, ValueError):
    """Input is structurally valid but statistically degenerate (e.g. zero variance)."""


class CollinearityError(CrimecastError, ValueError):
    """Design matrix is rank deficient; carries the offending column names."""

    def __init__(self, columns: Iterable[str], message: str | None = None) -> None:
        self.columns = tuple(columns)
        if message is None:
            message = "design matrix is rank deficient; offending columns: " + ", ".join(self.columns)
        super().__init__(message)


class EmptyPanelError(CrimecastError, ValueError):
    """Balancing removed every unit from the panel."""
