"""
Strong asymptotics of P_{n,N} away from [-x1, x1] and their comparison with
the exact polynomials.

    log P_{n,N}(z) ~ n g1(z) + log M1(F1(z)),
    M1(w) = (w^2 + alpha^2) / ((w^2 - w1^2)(w^2 - w2^2))^(1/2),  M1(w) -> 1 as w -> inf

M1(F1(z))^2 = rho F1'(z), and M1 is written as a product of principal square
roots of 1 - w_k^2/w^2, which is single valued on the exterior sheet.
Everything is compared in log form; imaginary parts are taken mod 2 pi.
"""

import cmath
import math
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import get_settings
from .conformal import ConformalData, eval_dF1, eval_F1, eval_f, solve_map
from .errors import BranchCutHit, InvalidParams
from .measures import DensityGrid, density_mu1, g1_value
from .model import ModelParams
from .oracle import (
    MOMENT,
    ExactPolynomial,
    OracleParams,
    ZeroStatistics,
    log_eval,
    solve,
    zero_counting_measure,
)
from .report import ValidationReport

logger = logging.getLogger(__name__)

SLOPE_TARGET = -1.0
SLOPE_TOL = 0.4
KS_DEGREE = 64
KS_LIMIT = 0.08


@dataclass(frozen=True)
class AsymptoticPrediction:
    z: complex
    n: int
    log_value: complex
    prefactor: complex

    @property
    def log_modulus(self) -> float:
        return self.log_value.real

    @property
    def phase(self) -> float:
        return self.log_value.imag


def wrap_phase(value: complex) -> complex:
    """Imaginary part reduced to [-pi, pi]"""
    return complex(value.real, math.remainder(value.imag, 2.0 * math.pi))


def prefactor_from_w(cd: ConformalData, w: complex) -> complex:
    """M1(w) = (1 + alpha^2/w^2) / (sqrt(1 - w1^2/w^2) sqrt(1 - w2^2/w^2))"""
    w = complex(w)
    inv = 1.0 / (w * w)
    root1 = cmath.sqrt(1.0 - cd.w1 ** 2 * inv)
    root2 = cmath.sqrt(1.0 - cd.w2 ** 2 * inv)
    return (1.0 + cd.alpha ** 2 * inv) / (root1 * root2)


def prefactor(cd: ConformalData, z: complex) -> complex:
    """
    (rho F1'(z))^(1/2), positive on (x1, inf).

    Raises:
        BranchCutHit: z on [-x1, x1]
    """
    return prefactor_from_w(cd, eval_F1(cd, z))


def prefactor_square_error(cd: ConformalData, z: complex) -> float:
    """|M1(F1(z))^2 - rho F1'(z)|, relative"""
    m1 = prefactor(cd, z)
    direct = cd.rho * eval_dF1(cd, z)
    return abs(m1 * m1 - direct) / abs(direct)


def predict(cd: ConformalData, mu1: DensityGrid, n: int, z: complex) -> AsymptoticPrediction:
    """
    Raises:
        BranchCutHit: z on [-x1, x1]
    """
    z = complex(z)
    if z.imag == 0.0 and abs(z.real) <= cd.x1:
        raise BranchCutHit(f"prediction undefined on [-x1, x1] (z={z.real})", z=z.real, x1=cd.x1)
    m1 = prefactor(cd, z)
    log_value = n * g1_value(mu1, z) + cmath.log(m1)
    return AsymptoticPrediction(z=z, n=n, log_value=log_value, prefactor=m1)


def panel_points(cd: ConformalData) -> Tuple[complex, ...]:
    """Exterior, boundary and inside-droplet points, none on [-x1, x1]"""
    a = cd.params.a
    return (
        complex(2.0 * cd.x2),
        cd.x2 * cmath.exp(0.25j * math.pi),
        0.5j * (a + cd.x2),
        complex(eval_f(cd, cmath.exp(1j * math.pi / 3.0))),
        complex(0.5 * (cd.x1 + cd.x2)),
    )


@dataclass(frozen=True)
class ErrorRow:
    n: int
    N: int
    z: complex
    error: complex


def compare(poly: ExactPolynomial, cd: ConformalData, mu1: DensityGrid, points: Sequence[complex]) -> List[ErrorRow]:
    """log P(z) - prediction at every point, phase wrapped"""
    rows = []
    for z in points:
        pred = predict(cd, mu1, poly.n, z)
        err = wrap_phase(log_eval(poly, z) - pred.log_value)
        rows.append(ErrorRow(n=poly.n, N=poly.N, z=complex(z), error=err))
    return rows


def fit_slope(ns: Sequence[int], errors: Sequence[float], last: int = 3) -> float:
    """Least-squares slope of log(error) against log(n) over the last points"""
    x = np.log(np.asarray(ns[-last:], dtype=float))
    y = np.log(np.asarray(errors[-last:], dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def n_step_consistency(cd: ConformalData, mu1: DensityGrid, n: int, z: complex) -> float:
    """|[pred(n+1) - pred(n)] - g1(z)|"""
    step = predict(cd, mu1, n + 1, z).log_value - predict(cd, mu1, n, z).log_value
    return abs(step - g1_value(mu1, z))


def loop_phase_change(cd: ConformalData, radius: Optional[float] = None, n_samples: int = 720) -> float:
    """Total change of arg M1(F1(z)) around |z| = radius (default 2 x2)"""
    radius = radius or 2.0 * cd.x2
    theta = 2.0 * math.pi * (np.arange(n_samples + 1) + 0.5) / n_samples
    values = [prefactor(cd, radius * cmath.exp(1j * th)) for th in theta]
    args = np.unwrap(np.angle(values))
    return float(args[-1] - args[0])


# Ladder

@dataclass
class LadderPoint:
    n: int
    N: int
    poly: ExactPolynomial
    errors: List[ErrorRow]
    zeros: ZeroStatistics

    @property
    def max_error(self) -> float:
        return max(abs(row.error) for row in self.errors)


@dataclass
class LadderResult:
    params: ModelParams
    cd: Optional[ConformalData] = None
    mu1: Optional[DensityGrid] = None
    points: List[LadderPoint] = field(default_factory=list)

    @property
    def ns(self) -> List[int]:
        return [p.n for p in self.points]

    def error_table(self) -> List[Dict[str, float]]:
        return [
            {
                'n': row.n,
                'N': row.N,
                're_z': row.z.real,
                'im_z': row.z.imag,
                'log_err_re': row.error.real,
                'log_err_im': row.error.imag,
            }
            for p in self.points for row in p.errors
        ]

    def zero_table(self) -> List[Dict[str, float]]:
        return [
            {'n': p.n, 'N': p.N, 'ks': p.zeros.ks, 'delta': p.zeros.delta, 'max_imag': p.zeros.max_imag}
            for p in self.points
        ]


def ladder_sizes(t: float, ns: Sequence[int]) -> List[Tuple[int, int]]:
    """
    (n, N) pairs with n/N = t and cN integral.

    Raises:
        InvalidParams: no such N for some n
    """
    pairs = []
    for n in ns:
        N = round(n / t)
        if N < 1 or abs(n / N - t) > 1e-12 * t:
            raise InvalidParams(f"n={n} admits no integer N with n/N = t = {t}", n=n, t=t)
        pairs.append((n, N))
    return pairs


def _solve_instance(op: OracleParams) -> ExactPolynomial:
    return solve(op, MOMENT)


def ladder(params: ModelParams, ns: Sequence[int]) -> LadderResult:
    """
    Exact polynomials along n with t = n/N fixed, compared with the
    prediction at the test-point panel. Instances run in worker processes
    when MOTHERBODY_THREADS > 1.

    Raises:
        InvalidParams, NonIntegralCharge, PhaseViolation, PrecisionExhausted
    """
    pairs = ladder_sizes(params.t, sorted(ns))
    ops = [OracleParams.from_floats(n, N, params.a, params.c) for n, N in pairs]
    cd = solve_map(params)
    mu1 = density_mu1(cd)
    points = panel_points(cd)

    # instances are independent; exact arithmetic dominates the cost
    threads = get_settings().runtime.threads
    if threads > 1 and len(ops) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(ops))) as ex:
            polys = list(ex.map(_solve_instance, ops))
    else:
        polys = [_solve_instance(op) for op in ops]

    result = LadderResult(params=params, cd=cd, mu1=mu1)
    for (n, N), poly in zip(pairs, polys):
        rows = compare(poly, cd, mu1, points)
        stats = zero_counting_measure(poly.zeros, cd)
        result.points.append(LadderPoint(n=n, N=N, poly=poly, errors=rows, zeros=stats))
        logger.info(
            f"📈 ladder n={n} N={N}: max log error {max(abs(r.error) for r in rows):.3e}, "
            f"KS {stats.ks:.4f}, delta {stats.delta:.3e}"
        )
    return result


def _decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def asymptotics_report(result: LadderResult) -> ValidationReport:
    """Per-point decrease along the ladder and the fitted decay exponent of the max error"""
    report = ValidationReport('asymptotics')
    ns = result.ns
    if len(ns) < 3:
        report.add_error(f"ladder needs at least 3 sizes, got {len(ns)}")
        return report
    n_points = len(result.points[0].errors)
    for k in range(n_points):
        errs = [abs(p.errors[k].error) for p in result.points]
        z = result.points[0].errors[k].z
        report.add_check(f'error decreases at z={z:.4g}', _decreasing(errs), errs[-1], errs[0])
    max_errs = [p.max_error for p in result.points]
    slope = fit_slope(ns, max_errs)
    report.add_check('decay exponent', abs(slope - SLOPE_TARGET) <= SLOPE_TOL, slope, SLOPE_TOL, target=SLOPE_TARGET)

    last = result.points[-1]
    # P has real coefficients, so the error at conj(z) is the conjugate error
    row = next((r for r in last.errors if r.z.imag != 0.0), None)
    if row is not None and result.cd is not None:
        mirror = compare(last.poly, result.cd, result.mu1, [row.z.conjugate()])[0]
        gap = abs(mirror.error - row.error.conjugate())
        report.add_check('conjugation symmetry', gap < 1e-8, gap, 1e-8, n=last.n)
    return report


def zero_report(result: LadderResult) -> ValidationReport:
    """KS distance and support excess along the ladder, zeros symmetric about 0, KS bound at n=64"""
    report = ValidationReport('zeros')
    if len(result.points) < 3:
        report.add_error(f"ladder needs at least 3 sizes, got {len(result.points)}")
        return report
    ks = [p.zeros.ks for p in result.points]
    delta = [p.zeros.delta for p in result.points]
    report.add_check('KS decreasing', _decreasing(ks), ks[-1], ks[0], table=ks)
    report.add_check('delta decreasing', _decreasing(delta), delta[-1], delta[0], table=delta)
    worst_mean = max(abs(p.zeros.mean) for p in result.points)
    report.add_check('zeros centred', worst_mean < 1e-12, worst_mean, 1e-12)
    target = next((p for p in result.points if p.n == KS_DEGREE), None)
    if target is not None:
        report.add_check(f'KS at n={KS_DEGREE}', target.zeros.ks < KS_LIMIT, target.zeros.ks, KS_LIMIT)
    else:
        report.add_warning(f"ladder stops at n={result.ns[-1]}, KS at n={KS_DEGREE} not checked")
    return report
