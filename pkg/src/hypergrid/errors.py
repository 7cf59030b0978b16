"""Shared exception types for the engine."""

from __future__ import annotations


class HypergridError(Exception):
    """Base class for all engine errors."""


class SpaceError(HypergridError):
    """Structural misuse of a hypothesis space (bad ids, rule violations at add time)."""


class AccrualError(HypergridError):
    """Upward probability accrual cannot proceed."""


class ResolutionError(HypergridError):
    """Interpretation enumeration, ranking, or tree extraction cannot proceed."""


class InternalError(HypergridError):
    """An engine invariant broke; indicates a bug or a corrupted space."""


class BoundError(HypergridError):
    """Invalid input to the analytic bound or Monte Carlo operations."""


class ScenarioError(HypergridError):
    """Scenario text cannot be read, parsed, or cross-validated."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class PipelineError(HypergridError):
    """An engine error, tagged with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
