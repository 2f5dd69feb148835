"""Exception hierarchy and the CLI exit-code mapping.

Exit codes: 0 success, 2 config error, 3 data error, 4 runtime/timeout.
"""

import time


class GckError(Exception):
    """Base class; exit_code drives the CLI process status."""

    exit_code = 4


class ConfigError(GckError):
    exit_code = 2


class ParameterError(ConfigError):
    """An argument violates an operation's precondition."""


class DataError(GckError):
    exit_code = 3


class ShapeError(DataError):
    """Matrix/graph dimensions disagree."""


class EmptyInputError(DataError):
    """An operation that needs at least one row/node got none."""


class DegenerateInputError(DataError):
    """Input is structurally unusable (e.g. edgeless graph for EC)."""


class CorruptionError(DataError):
    """Serialized payload is internally inconsistent."""


class ContractViolationError(GckError):
    """A mutation was attempted on a node state that forbids it."""


class TrainingDivergedError(GckError):
    """Loss became non-finite during training."""


class StageTimeoutError(GckError):
    """A pipeline stage exceeded its time budget."""

    def __init__(self, stage: str, budget_secs: float):
        super().__init__(f"stage '{stage}' exceeded time budget of {budget_secs:.3g}s")
        self.stage = stage
        self.budget_secs = budget_secs


class Deadline:
    """Cooperative wall-clock budget checked inside long-running loops."""

    def __init__(self, budget_secs: float | None, stage: str = "pipeline"):
        self.budget_secs = budget_secs
        self.stage = stage
        self._t0 = time.monotonic()

    def check(self) -> None:
        if self.budget_secs is not None and time.monotonic() - self._t0 > self.budget_secs:
            raise StageTimeoutError(self.stage, self.budget_secs)

    def relabel(self, stage: str) -> "Deadline":
        """Same clock, new stage name for error reporting."""
        d = Deadline.__new__(Deadline)
        d.budget_secs = self.budget_secs
        d.stage = stage
        d._t0 = self._t0
        return d
