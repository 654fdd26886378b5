"""
Error hierarchy.

Every error carries a human readable ``detail`` plus optional context and the
process exit code the CLI reports for it: 2 for invalid input, 3 for
numerical failures.
"""

from typing import Any, Dict


class MotherbodyError(Exception):
    exit_code = 3

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            'error': type(self).__name__,
            'detail': self.detail,
            'exit_code': self.exit_code,
        }
        if self.context:
            payload['context'] = {key: _plain(value) for key, value in self.context.items()}
        return payload


def _plain(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)


# Invalid input (exit 2)

class ValidationError(MotherbodyError):
    exit_code = 2


class InvalidParams(ValidationError):
    pass


class PhaseViolation(ValidationError):
    """Critical points of the conformal map are not real (t >= t*)."""


class ParseError(ValidationError):
    pass


class NonIntegralCharge(ValidationError):
    """cN is not a nonnegative integer."""


# Numerical failures (exit 3)

class NumericalError(MotherbodyError):
    exit_code = 3


class NoRoot(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class PoleAt(NumericalError):
    pass


class BranchCutHit(NumericalError):
    pass


class BranchAmbiguity(NumericalError):
    pass


class InconsistentConstants(NumericalError):
    pass


class DegreeMismatch(NumericalError):
    pass


class NodeNotFound(NumericalError):
    pass


class NegativeDensity(NumericalError):
    pass


class ConstraintViolation(NumericalError):
    pass


class VariationalViolation(NumericalError):
    pass


class ContourNotFound(NumericalError):
    pass


class PathCrossesCut(NumericalError):
    pass


class QuadratureBudgetExceeded(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class PrecisionExhausted(NumericalError):
    pass
