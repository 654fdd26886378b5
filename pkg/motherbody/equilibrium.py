"""
Variational conditions, the contour function u and the phi-functions.

    E1(x) = 2 U1 - U2 - (c/t) log|x^2 + a^2|     = ell on [-x1, x1], > ell on (x1, x2]
    E2(x) = 2 U2 - U1 + ((t+2c)/t) log|x|        = 0 on Delta2, < 0 on (-x2, x2)
    u(z)  = U1 + U2 - (c/t) log|z^2 + a^2| + ((t+2c)/t) log|z| + (a/t) |Im z|

The contour gamma runs inside {u > ell} around [-x1, x1].
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .conformal import MINUS, PLUS
from .config import get_settings
from .errors import ContourNotFound, PathCrossesCut, PoleAt, VariationalViolation
from .measures import Measures, potentials, potentials_complex
from .quadrature import cosine_rule, gauss_legendre, sqrt_start_rule
from .report import ValidationReport
from .spectral import branch_values

logger = logging.getLogger(__name__)

GAMMA_MARGIN = 1.1
GAMMA_ENLARGE = (1.25, 1.5, 2.0, 3.0)


@dataclass(frozen=True)
class EquilibriumData:
    ell: float
    x3: float
    gamma_samples: np.ndarray
    x_gamma: float
    y_gamma: float
    construction: str    # 'ellipse' or 'radial'
    min_margin: float    # min over gamma of u - ell


def E1(ms: Measures, x: float) -> float:
    a, c, t = ms.params.a, ms.params.c, ms.params.t
    u1, u2 = potentials(ms, x)
    return 2.0 * u1 - u2 - (c / t) * math.log(x * x + a * a)


def E2(ms: Measures, x: float) -> float:
    c, t = ms.params.c, ms.params.t
    u1, u2 = potentials(ms, x)
    return 2.0 * u2 - u1 + ((t + 2.0 * c) / t) * math.log(abs(x))


def u(ms: Measures, z: complex) -> float:
    """Contour-existence function; on the real axis u = E1 + E2"""
    a, c, t = ms.params.a, ms.params.c, ms.params.t
    z = complex(z)
    if z == 0:
        raise PoleAt("u has a logarithmic singularity at 0")
    u1, u2 = potentials_complex(ms, z)
    return (
        u1 + u2
        - (c / t) * math.log(abs(z * z + a * a))
        + ((t + 2.0 * c) / t) * math.log(abs(z))
        + (a / t) * abs(z.imag)
    )


def variational_constant(ms: Measures, n_samples: int = 40) -> Tuple[float, float]:
    """(ell, stddev) of E1 over interior points of [0, x1]"""
    xs = ms.cd.x1 * np.linspace(0.0, 0.98, n_samples)
    values = np.array([E1(ms, x) for x in xs])
    return float(values.mean()), float(values.std())


def variational_check(ms: Measures, n_samples: int = 40, strict: bool = False) -> Tuple[ValidationReport, float]:
    """
    Equality and inequality conditions for both measures.

    Raises:
        VariationalViolation: only with ``strict``, on the first failed condition
    """
    cd = ms.cd
    report = ValidationReport('variational')
    ell, spread = variational_constant(ms, n_samples)
    report.add_info(f"ell = {ell:.12g}")
    report.add_check('E1 constant on supp mu1', spread < 1e-6, spread, 1e-6)

    gap = cd.x1 + (cd.x2 - cd.x1) * np.linspace(0.02, 1.0, 25)
    e1_gap = np.array([E1(ms, x) for x in gap]) - ell
    k = int(e1_gap.argmin())
    report.add_check('E1 > ell on (x1, x2]', e1_gap[k] > 0, float(e1_gap[k]), 0.0, x=float(gap[k]))

    delta2 = cd.x2 * np.array([1.02, 1.1, 1.3, 1.7, 2.5, 4.0, 8.0, 20.0])
    e2_delta2 = np.abs([E2(ms, x) for x in delta2])
    report.add_check('E2 = 0 on Δ2', e2_delta2.max() < 1e-6, float(e2_delta2.max()), 1e-6)

    inside = cd.x2 * np.linspace(0.02, 0.99, 25)
    e2_inside = np.array([E2(ms, x) for x in inside])
    k = int(e2_inside.argmax())
    report.add_check('E2 < 0 on (-x2, x2)', e2_inside[k] < 0, float(e2_inside[k]), 0.0, x=float(inside[k]))

    if strict and not report.is_valid():
        failed = next(record for record in report.checks if not record.passed)
        raise VariationalViolation(
            f"{failed.name}: magnitude {failed.value}", condition=failed.name,
            magnitude=failed.value, location=failed.details.get('x'),
        )
    return report, ell


def find_x3(ms: Measures, ell: float) -> float:
    """u(x3) = ell with x3 in (x1, x2)"""
    cd = ms.cd
    fn = lambda x: u(ms, x) - ell
    lo, hi = cd.x1 * (1.0 + 1e-9), cd.x2 * (1.0 - 1e-9)
    if fn(lo) >= 0 or fn(hi) <= 0:
        raise VariationalViolation("u - ell does not change sign on (x1, x2)", lo=fn(lo), hi=fn(hi))
    return float(brentq(fn, lo, hi, xtol=1e-12 * cd.x2))


def _ellipse(x_gamma: float, y_gamma: float, n: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(n) / n
    return x_gamma * np.cos(theta) + 1j * y_gamma * np.sin(theta)


def _quadrant_margin(ms: Measures, samples: np.ndarray, ell: float) -> float:
    # u is even in both axes; the first quadrant suffices
    quadrant = [z for z in samples if z.real >= -1e-15 and z.imag >= -1e-15]
    return min(u(ms, z) - ell for z in quadrant)


def _radial_contour(ms: Measures, ell: float, x_gamma: float, y_gamma: float, n: int) -> np.ndarray:
    """Star-shaped contour: along each ray the first radius with u > ell, plus a margin"""
    cd = ms.cd
    quarter = n // 4
    angles = np.linspace(0.0, np.pi / 2.0, quarter + 1)
    r_top = 10.0 * max(cd.params.a, cd.x2)
    radii = []
    for phi in angles:
        if phi == 0.0:
            radii.append(x_gamma)
            continue
        if phi == np.pi / 2.0:
            radii.append(y_gamma)
            continue
        grid = np.geomspace(0.5 * cd.x1, r_top, 80)
        above = [u(ms, r * np.exp(1j * phi)) > ell for r in grid]
        hits = [k for k in range(len(grid) - 2) if above[k] and above[k + 1] and above[k + 2]]
        if not hits:
            raise ContourNotFound(f"no point with u > ell on the ray at angle {phi:.4f}", angle=float(phi))
        radii.append(GAMMA_MARGIN * grid[hits[0]])
    quadrant = np.array(radii) * np.exp(1j * angles)
    # mirror into the other quadrants, endpoints on the axes shared once
    upper = np.concatenate((quadrant, -np.conj(quadrant[-2::-1])))
    return np.concatenate((upper, np.conj(upper[-2:0:-1])))


def contour_u_and_gamma(ms: Measures, ell: Optional[float] = None, n_samples: int = 128) -> EquilibriumData:
    """
    x3 by brentq, then gamma through x_gamma = (x3 + x2)/2 and i y_gamma with
    y_gamma 10% above the first y > a where u(iy) > ell. An ellipse is tried
    first (enlarging y_gamma if needed), a radial construction second.

    Raises:
        ContourNotFound
    """
    cd = ms.cd
    a = cd.params.a
    if ell is None:
        ell, _ = variational_constant(ms)
    x3 = find_x3(ms, ell)
    x_gamma = 0.5 * (x3 + cd.x2)

    y_first = None
    for y in a * np.geomspace(1.01, 20.0, 60):
        if u(ms, 1j * y) > ell:
            y_first = float(y)
            break
    if y_first is None:
        raise ContourNotFound("u stays below ell on the imaginary axis above ia", a=a)
    y_gamma = GAMMA_MARGIN * y_first

    # ellipse first, taller ellipses next, the radial contour last
    for factor in (1.0,) + GAMMA_ENLARGE:
        samples = _ellipse(x_gamma, factor * y_gamma, n_samples)
        margin = _quadrant_margin(ms, samples, ell)
        if margin > 0:
            logger.info(f"⭕ gamma: ellipse x={x_gamma:.8g} y={factor * y_gamma:.8g}, min(u - ell)={margin:.3e}")
            return EquilibriumData(ell, x3, samples, x_gamma, factor * y_gamma, 'ellipse', margin)
        logger.debug(f"ellipse with y={factor * y_gamma:.6g} dips below ell by {-margin:.3e}")

    samples = _radial_contour(ms, ell, x_gamma, y_gamma, n_samples)
    margin = _quadrant_margin(ms, samples, ell)
    if margin <= 0:
        raise ContourNotFound(f"no contour with u > ell found (best margin {margin:.3e})", margin=margin)
    logger.info(f"⭕ gamma: radial construction, min(u - ell)={margin:.3e}")
    return EquilibriumData(ell, x3, samples, x_gamma, y_gamma, 'radial', margin)


def imaginary_axis_increasing(ms: Measures, n: int = 25) -> Tuple[bool, float]:
    """u(iy) strictly increasing on [0, a]: (verdict, smallest difference)"""
    ys = ms.params.a * np.linspace(0.02, 0.98, n)
    values = np.array([u(ms, 1j * y) for y in ys])
    diffs = np.diff(values)
    return bool(np.all(diffs > 0)), float(diffs.min())


# phi-functions

PHI_SHEETS = {1: (2, 1), 2: (2, 3), 3: (3, 1)}


def _anchor(ms: Measures, which: int, x3: Optional[float]) -> float:
    if which == 1:
        return ms.cd.x1
    if which == 2:
        return ms.cd.x2
    if x3 is None:
        raise ValueError("phi3 needs x3")
    return x3


def _crosses_real_cut(cd, p: complex, q: complex) -> bool:
    """Segment p -> q passes through (-inf, x1] or [x2, inf) away from its start"""
    if (p.imag > 0 and q.imag > 0) or (p.imag < 0 and q.imag < 0):
        return False
    if p.imag == 0.0 and q.imag == 0.0:
        lo, hi = sorted((p.real, q.real))
        return lo < cd.x1 or hi > cd.x2
    if p.imag == 0.0:
        return False
    x_cross = q.real if q.imag == 0.0 else p.real - p.imag * (q.real - p.real) / (q.imag - p.imag)
    return not cd.x1 < x_cross < cd.x2


def _crosses_imaginary_cut(p: complex, q: complex, inner: bool, a: float) -> bool:
    """Segment meets [-ia, ia] (inner) or |Im| >= a on the imaginary axis (outer)"""
    if (p.real > 0 and q.real > 0) or (p.real < 0 and q.real < 0):
        return False
    if p.real == 0.0 and q.real == 0.0:
        ys = (p.imag, q.imag)
        return (min(abs(y) for y in ys) <= a) if inner else (max(abs(y) for y in ys) >= a)
    y_cross = q.imag if q.real == 0.0 else p.imag - p.real * (q.imag - p.imag) / (q.real - p.real)
    return abs(y_cross) <= a if inner else abs(y_cross) >= a


def check_path(ms: Measures, which: int, vertices: Sequence[complex], side: Optional[str]) -> None:
    """
    Raises:
        PathCrossesCut: a segment leaves the analyticity domain of phi_which
    """
    cd = ms.cd
    a = cd.params.a
    for p, q in zip(vertices[:-1], vertices[1:]):
        p, q = complex(p), complex(q)
        real_path = p.imag == 0.0 and q.imag == 0.0
        if real_path and side in (PLUS, MINUS):
            continue
        if _crosses_real_cut(cd, p, q):
            raise PathCrossesCut(f"phi{which}: segment {p} -> {q} crosses a real cut", which=which)
        if which == 1 and _crosses_imaginary_cut(p, q, inner=False, a=a):
            raise PathCrossesCut(f"phi1: segment {p} -> {q} crosses |Im z| >= a", which=which)
        if which == 3 and _crosses_imaginary_cut(p, q, inner=True, a=a):
            raise PathCrossesCut(f"phi3: segment {p} -> {q} crosses [-ia, ia]", which=which)


def default_path(ms: Measures, which: int, z: complex, x3: Optional[float] = None) -> List[complex]:
    """Straight segment from the anchor, with a detour over the imaginary axis when needed"""
    cd = ms.cd
    a = cd.params.a
    start = _anchor(ms, which, x3)
    z = complex(z)
    if z.imag == 0.0:
        x = z.real
        stops = [start]
        for b in (cd.x2, cd.x1, 0.0, -cd.x1, -cd.x2):
            if min(start, x) < b < max(start, x):
                stops.append(b)
        stops.append(x)
        return [complex(v) for v in stops]
    if z.real < 0 and which in (1, 3):
        sign = 1.0 if z.imag > 0 else -1.0
        height = 0.5 * a if which == 1 else max(1.5 * a, abs(z.imag))
        return [complex(start), complex(0.0, sign * height), z]
    return [complex(start), z]


def _segment_integral(ms: Measures, which: int, p: complex, q: complex, side: Optional[str], first: bool) -> complex:
    """Regularized integrand (S_j - S_k + [S3 pole term])/(2t) over one segment"""
    cd = ms.cd
    c, t = cd.params.c, cd.params.t
    n = get_settings().quadrature.path_nodes
    j, k = PHI_SHEETS[which]
    if p.imag == 0.0 and q.imag == 0.0:
        nodes, weights = cosine_rule(n, p, q)
    elif first:
        nodes, weights = sqrt_start_rule(n, p, q)
    else:
        nodes, weights = gauss_legendre(n, p, q)

    total = 0j
    for s, w in zip(nodes, weights):
        values = branch_values(cd, s, side or PLUS)
        integrand = values[j - 1] - values[k - 1]
        # remove the simple pole of S3 at 0, residue t + 2c
        if j == 3:
            integrand -= (t + 2.0 * c) / s
        elif k == 3:
            integrand += (t + 2.0 * c) / s
        total += w * integrand
    return total / (2.0 * t)


def _log_along(vertices: Sequence[complex]) -> complex:
    """log(z_end) - log(z_start) along a polyline that does not cross the negative real axis"""
    total = 0j
    for p, q in zip(vertices[:-1], vertices[1:]):
        p, q = complex(p), complex(q)
        if p.imag == 0.0 and q.imag == 0.0 and p.real * q.real <= 0:
            raise PoleAt("phi path through the pole of S3 at 0")
        total += np.log(q) - np.log(p)
    return total


def phi_function(
    ms: Measures,
    z: complex,
    which: int,
    x3: Optional[float] = None,
    side: Optional[str] = None,
    path: Optional[Sequence[complex]] = None,
) -> complex:
    """
    phi_which(z) = (1/2t) int (S_j - S_k) ds from the anchor (x1, x2 or x3),
    along ``path`` or a default cut-avoiding path. On the real axis ``side``
    selects boundary values; real paths run along the axis, split at the
    branch points. The simple pole of S3 at 0 is integrated in closed form.

    Raises:
        PathCrossesCut, PoleAt
    """
    cd = ms.cd
    c, t = cd.params.c, cd.params.t
    z = complex(z)
    vertices = list(path) if path is not None else default_path(ms, which, z, x3)
    if abs(complex(vertices[-1]) - z) > 1e-14 * max(1.0, abs(z)):
        raise ValueError("path does not end at z")
    check_path(ms, which, vertices, side)

    total = 0j
    for idx, (p, q) in enumerate(zip(vertices[:-1], vertices[1:])):
        total += _segment_integral(ms, which, complex(p), complex(q), side, idx == 0)

    j, k = PHI_SHEETS[which]
    if 3 in (j, k):
        sign = 1.0 if j == 3 else -1.0
        log_diff = _real_log_diff(vertices, side) if z.imag == 0.0 else _log_along(vertices)
        total += sign * (t + 2.0 * c) / (2.0 * t) * log_diff
    return complex(total)


def _real_log_diff(vertices: Sequence[complex], side: Optional[str]) -> complex:
    """log(z) - log(start) along the real axis, passing 0 on the side given"""
    start, end = complex(vertices[0]).real, complex(vertices[-1]).real
    if end == 0.0 or start == 0.0:
        raise PoleAt("phi path ends at the pole of S3")
    diff = math.log(abs(end)) - math.log(abs(start))
    if start * end < 0:
        # above 0 (plus side) the argument moves from 0 to pi
        turn = math.pi if side != MINUS else -math.pi
        diff_im = turn if end < 0 else -turn
        return complex(diff, diff_im)
    return complex(diff, 0.0)


def phi_derivative_check(ms: Measures, z: complex, which: int = 1, x3: Optional[float] = None, h: float = 1e-5) -> float:
    """Relative error between 2t phi'(z) by central differences and S_j - S_k"""
    t = ms.params.t
    z = complex(z)
    step = h * max(1.0, abs(z))
    forward = phi_function(ms, z + step, which, x3)
    backward = phi_function(ms, z - step, which, x3)
    numeric = 2.0 * t * (forward - backward) / (2.0 * step)
    j, k = PHI_SHEETS[which]
    values = branch_values(ms.cd, z)
    exact = values[j - 1] - values[k - 1]
    return float(abs(numeric - exact) / max(abs(exact), 1e-300))


def path_independence(ms: Measures, z: complex, which: int, x3: Optional[float] = None) -> float:
    """|phi(z)| difference between the straight path and an L-shaped one (vertical then horizontal)"""
    start = _anchor(ms, which, x3)
    z = complex(z)
    straight = phi_function(ms, z, which, x3)
    corner = complex(start, z.imag)
    bent = phi_function(ms, z, which, x3, path=[complex(start), corner, z])
    return float(abs(straight - bent))


def phi_sign_checks(ms: Measures, eq: EquilibriumData, n_samples: int = 24) -> ValidationReport:
    """Sign structure of the phi-functions on gamma and on the real axis"""
    cd = ms.cd
    report = ValidationReport('phi')
    x3 = eq.x3

    quadrant = [z for z in eq.gamma_samples if z.real >= 0 and z.imag > 0]
    re_phi3 = [phi_function(ms, z, 3, x3).real for z in quadrant]
    report.add_check('Re phi3 > 0 on gamma', min(re_phi3) > 0, min(re_phi3), 0.0)

    inside = cd.x2 * np.linspace(0.05, 0.97, n_samples)
    inside = inside[np.abs(inside - cd.x1) > 1e-3 * cd.x1]
    re_phi2 = [phi_function(ms, x, 2, side=PLUS).real for x in np.concatenate((inside, -inside))]
    report.add_check('Re phi2,+ > 0 on (-x2, x2)', min(re_phi2) > 0, min(re_phi2), 0.0)

    cut = cd.x1 * np.linspace(-0.98, 0.98, n_samples)
    re_phi1 = [abs(phi_function(ms, x, 1, side=PLUS).real) for x in cut]
    report.add_check('Re phi1,+ = 0 on [-x1, x1]', max(re_phi1) < 1e-8, max(re_phi1), 1e-8)

    gap = cd.x1 + (cd.x2 - cd.x1) * np.linspace(0.05, 1.0, n_samples)
    re_gap = [phi_function(ms, x, 1).real for x in gap]
    report.add_check('Re phi1 > 0 on (x1, x2]', min(re_gap) > 0, min(re_gap), 0.0)

    anchors = [abs(phi_function(ms, cd.x1, 1)), abs(phi_function(ms, cd.x2, 2)), abs(phi_function(ms, x3, 3, x3))]
    report.add_check('phi vanishes at its anchor', max(anchors) < 1e-14, max(anchors))
    return report
