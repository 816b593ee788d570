"""Exception types raised across the package."""

from __future__ import annotations

from typing import NamedTuple


class Violation(NamedTuple):
    kind: str
    residual: float


class QccError(Exception):
    """Base class for all package errors."""


class DimMismatch(QccError, ValueError):
    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class BadSubsystemIndex(QccError, IndexError):
    pass


class StateValidationError(QccError, ValueError):
    """A matrix failed one or more density-matrix invariants.

    ``violations`` lists every failed check with its measured residual, not
    only the one that names the exception class.
    """

    kind = "invalid"

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        text = ", ".join(f"{v.kind}({v.residual:.3g})" for v in self.violations)
        super().__init__(text)

    @property
    def residual(self) -> float:
        for v in self.violations:
            if v.kind == self.kind:
                return v.residual
        return self.violations[0].residual


class NonHermitian(StateValidationError):
    kind = "NonHermitian"


class TraceNotOne(StateValidationError):
    kind = "TraceNotOne"


class NotPSD(StateValidationError):
    kind = "NotPSD"


class OptimizerDidNotConverge(QccError, RuntimeError):
    """No restart met the convergence criterion.

    ``best_value`` is still a valid upper bound for the minimised quantity.
    """

    def __init__(self, message: str, best_value: float, result=None):
        super().__init__(message)
        self.best_value = best_value
        self.result = result


class NoSymmetricCandidateFound(QccError, RuntimeError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


class NotClassicalOnRegistry(QccError, ValueError):
    def __init__(self, message: str, off_block_mass: float):
        super().__init__(message)
        self.off_block_mass = off_block_mass
