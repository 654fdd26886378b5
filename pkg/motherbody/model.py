"""
Model parameters and phase boundaries.

The external potential is V(z) = c log(z^2 + a^2): two point charges of
strength c at +-ia. The droplet has area pi t. The package covers the
first phase 0 < t < t*, where the mother body is a single real interval.
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .config import get_settings
from .errors import InvalidParams, NoRoot, PhaseViolation
from .report import ValidationReport

logger = logging.getLogger(__name__)

SCAN_POINTS = 400
BOUNDARY_RTOL = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """The triple (a, c, t). Values are not checked here, see ``validate``."""
    a: float
    c: float
    t: float

    def scaled(self, lam: float) -> 'ModelParams':
        """Image under the scaling (a, c, t) -> (lam a, lam^2 c, lam^2 t)"""
        return ModelParams(self.a * lam, self.c * lam ** 2, self.t * lam ** 2)

    def with_t(self, t: float) -> 'ModelParams':
        return replace(self, t=t)


@dataclass(frozen=True)
class PhaseConstants:
    t_star: float
    t_c: float
    quintic_coeffs: Tuple[float, ...]  # highest degree first

    def quintic(self, t: float) -> float:
        return float(np.polyval(self.quintic_coeffs, t))


def compute_t_c(a: float, c: float) -> float:
    """Closing time of the droplet: a^2 + 2a sqrt(c) - c"""
    return a * a + 2.0 * a * math.sqrt(c) - c


def t_star_upper_bound(a: float, c: float) -> float:
    return (a + math.sqrt(2.0 * c)) ** 2


def quintic_coefficients(a: float, c: float) -> Tuple[float, ...]:
    """Coefficients of the degree 5 polynomial whose positive root is t*"""
    a4 = a ** 4
    a8 = a4 * a4
    return (
        36.0,
        207.0 * c,
        24.0 * a4 + 468.0 * c ** 2,
        c * (114.0 * a4 + 522.0 * c ** 2),
        4.0 * a8 + 108.0 * a4 * c ** 2 + 288.0 * c ** 4,
        -c * (a8 + 30.0 * a4 * c ** 2 - 63.0 * c ** 4),
    )


def quintic_value(a: float, c: float, t: float) -> float:
    return float(np.polyval(quintic_coefficients(a, c), t))


def _check_charges(a: float, c: float) -> None:
    if not (a > 0 and c > 0):
        raise InvalidParams(f"a and c must be positive (a={a}, c={c})", a=a, c=c)
    if a * a < 2.0 * c * (1.0 - BOUNDARY_RTOL):
        raise InvalidParams(f"a² < 2c (a={a}, c={c})", a=a, c=c)


def compute_t_star(a: float, c: float, tol: Optional[float] = None) -> float:
    """
    Unique positive root of the quintic, bracketed on a geometric grid up to
    (a + sqrt(2c))^2, refined with brentq and polished by Newton.

    Raises:
        InvalidParams: a, c not positive or a^2 < 2c
        NoRoot: the sign pattern on the bracket is not a single change
    """
    _check_charges(a, c)
    tol = tol if tol is not None else get_settings().solver.tol
    coeffs = quintic_coefficients(a, c)
    upper = t_star_upper_bound(a, c)

    grid = np.concatenate(([0.0], np.geomspace(upper * 1e-10, upper, SCAN_POINTS)))
    values = np.polyval(coeffs, grid)
    signs = np.sign(values)
    changes = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if len(changes) != 1 or values[0] >= 0:
        raise NoRoot(
            f"quintic has {len(changes)} sign changes on (0, {upper:.6g}]",
            a=a, c=c, value_at_zero=float(values[0]),
        )

    lo, hi = grid[changes[0]], grid[changes[0] + 1]
    root = brentq(lambda s: np.polyval(coeffs, s), lo, hi, xtol=tol * upper, rtol=4 * np.finfo(float).eps)

    derivative = np.polyder(coeffs)
    for _ in range(3):
        slope = np.polyval(derivative, root)
        if slope == 0:
            break
        step = np.polyval(coeffs, root) / slope
        root -= step
        if abs(step) <= tol * root:
            break

    logger.debug(f"t* = {root:.15g} for a={a}, c={c}")
    return float(root)


def phase_constants(a: float, c: float, tol: Optional[float] = None) -> PhaseConstants:
    return PhaseConstants(
        t_star=compute_t_star(a, c, tol),
        t_c=compute_t_c(a, c),
        quintic_coeffs=quintic_coefficients(a, c),
    )


def validate(params: ModelParams, tol: Optional[float] = None) -> ValidationReport:
    """
    Check the standing assumptions: a, c, t > 0, a^2 >= 2c and t < t*.

    Returns a report; params are accepted iff ``report.is_valid()``.
    """
    report = ValidationReport('model')
    a, c, t = params.a, params.c, params.t

    if not a > 0:
        report.add_error("a ≤ 0")
    if not c > 0:
        report.add_error("c ≤ 0")
    if not t > 0:
        report.add_error("t ≤ 0")
    if a > 0 and c > 0 and a * a < 2.0 * c * (1.0 - BOUNDARY_RTOL):
        report.add_error("a² < 2c")

    if report.is_valid():
        try:
            constants = phase_constants(a, c, tol)
        except NoRoot as e:
            report.add_error(e.detail)
        else:
            report.add_info(f"t* = {constants.t_star:.12g}, t_c = {constants.t_c:.12g}")
            if t >= constants.t_star:
                report.add_error(f"t ≥ t* ({t} ≥ {constants.t_star:.12g})")
    return report


def require_phase_one(params: ModelParams, tol: Optional[float] = None) -> PhaseConstants:
    """Raise unless params are inside the first phase"""
    report = validate(params, tol)
    if not report.is_valid():
        reasons = '; '.join(report.errors)
        if any(reason.startswith('t ≥ t*') for reason in report.errors):
            raise PhaseViolation(f"parameters outside phase 1: {reasons}", a=params.a, c=params.c, t=params.t)
        raise InvalidParams(f"invalid parameters: {reasons}", a=params.a, c=params.c, t=params.t)
    return phase_constants(params.a, params.c, tol)
