"""
Typed errors raised by the solver, the data layer and the CLI.

Every error carries a human-readable ``detail`` and the process exit code
the CLI should use when it surfaces the error.
"""
from typing import Optional

EXIT_OK = 0
EXIT_IO = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INFEASIBLE = 66


class SarlError(ValueError):
    """Base class for all domain errors."""

    exit_code: int = EXIT_DATA

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# Numerics / shapes
class EmptyInput(SarlError):
    pass


class ShapeMismatch(SarlError):
    pass


class NonFiniteInput(SarlError):
    pass


class NotPositiveDefinite(SarlError):
    def __init__(self, smallest_eigenvalue: float, detail: Optional[str] = None):
        super().__init__(detail or f"Matrix is not positive definite (smallest eigenvalue {smallest_eigenvalue:.3e})")
        self.smallest_eigenvalue = smallest_eigenvalue


# Parameters
class InvalidLambda(SarlError):
    exit_code = EXIT_USAGE

    def __init__(self, lam: float):
        super().__init__(f"lambda must lie in [0, 1], got {lam}")
        self.lam = lam


class InvalidParameter(SarlError):
    exit_code = EXIT_USAGE


# Trade-off search
class InfeasibleTolerance(SarlError):
    exit_code = EXIT_INFEASIBLE

    def __init__(self, alpha_tol: float, alpha_min: float, alpha_max: float):
        super().__init__(
            f"Tolerable leakage {alpha_tol:.6g} is outside the attainable range "
            f"[{alpha_min:.6g}, {alpha_max:.6g}]"
        )
        self.alpha_tol = alpha_tol
        self.alpha_min = alpha_min
        self.alpha_max = alpha_max


class NotReached(SarlError):
    exit_code = EXIT_INFEASIBLE

    def __init__(self, alpha_tol: float, best_lambda: float, best_j_s: float, iterations: int):
        super().__init__(
            f"No lambda reached J_s = {alpha_tol:.6g} within {iterations} iterations "
            f"(closest: lambda={best_lambda:.6g}, J_s={best_j_s:.6g})"
        )
        self.alpha_tol = alpha_tol
        self.best_lambda = best_lambda
        self.best_j_s = best_j_s
        self.iterations = iterations


class SweepPointError(SarlError):
    def __init__(self, lam: float, cause: SarlError):
        super().__init__(f"lambda={lam}: {cause.detail}")
        self.lam = lam
        self.cause = cause
        self.exit_code = cause.exit_code


# Data layer
class SchemaError(SarlError):
    pass


class ParseError(SarlError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"Cannot parse value {value!r} in column '{column}' at row {row}")
        self.row = row
        self.column = column


class MissingValue(SarlError):
    def __init__(self, row: int, column: str):
        super().__init__(f"Missing value in column '{column}' at row {row}")
        self.row = row
        self.column = column


class InvalidCount(SarlError):
    pass


class InvalidLabel(SarlError):
    pass


class InvalidSplit(SarlError):
    pass


class ArtifactError(SarlError):
    pass
