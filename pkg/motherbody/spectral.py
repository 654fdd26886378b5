"""
Spectral curve.

The three branches S1, S2, S3 solve the cubic

    P(S, z) = A S^3 + B S^2 + C S + D = 0
    A = z^3 + a^2 z
    B = -(t + 4c) z^2 - a^2 (t + 2c)
    C = a^2 z^3 + C1 z
    D = -a^2 (t + 2c) z^2 - C2

Branch values come from the rational parametrization S(f(w)) = f(1/w), the
cubic is used to cross-check them and to build the discriminant.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as poly
from scipy.optimize import brentq, minimize_scalar

from . import conformal
from .conformal import ConformalData, MINUS, PLUS
from .errors import DegreeMismatch, InconsistentConstants, NodeNotFound, PoleAt
from .model import ModelParams
from .report import ValidationReport

logger = logging.getLogger(__name__)

CLUSTER_RTOL = 1e-5
CONSTANTS_RTOL = 1e-8
POLE_RTOL = 1e-13


class Sheet(IntEnum):
    FIRST = 1
    SECOND = 2
    THIRD = 3


class Side(str, Enum):
    PLUS = PLUS
    MINUS = MINUS
    OFF_AXIS = 'off-axis'


@dataclass(frozen=True)
class SheetPoint:
    z: complex
    sheet: Sheet
    side: Side = Side.OFF_AXIS


@dataclass(frozen=True)
class Discriminant:
    coeffs: Tuple[float, ...]                       # ascending powers of z
    roots: Tuple[complex, ...]
    clusters: Tuple[Tuple[complex, int], ...]       # (center, multiplicity)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass
class SpectralCurve:
    cd: ConformalData
    C1: float
    C2: float
    b0: float = math.nan
    b1: float = math.nan
    b2: float = math.nan
    disc_roots: Tuple[Tuple[complex, int], ...] = field(default_factory=tuple)

    @property
    def params(self):
        return self.cd.params


def _side_of(p: SheetPoint) -> Optional[str]:
    return None if p.side == Side.OFF_AXIS else p.side.value


def _check_pole(cd: ConformalData, z: complex, sheet: int) -> None:
    a = cd.params.a
    if sheet == 1 and min(abs(z - 1j * a), abs(z + 1j * a)) <= POLE_RTOL * a:
        raise PoleAt(f"S1 has poles at ±ia (z={z})", z=z, sheet=sheet)
    if sheet == 3 and z == 0:
        raise PoleAt("S3 has a pole at 0", z=z, sheet=sheet)


def eval_S(sc: SpectralCurve, p: SheetPoint) -> complex:
    """
    Branch value S_sheet(z), boundary value on cuts selected by ``p.side``.

    Raises:
        PoleAt: S1 at ±ia, S3 at 0
        BranchCutHit: z on a cut of the sheet without a side
        BranchAmbiguity: preimages cannot be labelled
    """
    z = complex(p.z)
    sheet = int(p.sheet)
    _check_pole(sc.cd, z, sheet)
    w = conformal.branch_preimage(sc.cd, z, sheet, _side_of(p))
    return conformal.S_from_w(sc.cd, w)


def branch_values(cd: ConformalData, z: complex, side: str = PLUS) -> Tuple[complex, complex, complex]:
    """(S1, S2, S3) at z from a single root solve"""
    z = complex(z)
    for sheet in (1, 3):
        _check_pole(cd, z, sheet)
    ws = conformal.sheet_preimages(cd, z, side)
    return tuple(conformal.S_from_w(cd, w) for w in ws)


def symmetric_functions(sc: SpectralCurve, z: complex) -> Tuple[complex, complex, complex]:
    s1, s2, s3 = branch_values(sc.cd, z)
    return s1 + s2 + s3, s1 * s2 + s1 * s3 + s2 * s3, s1 * s2 * s3


def closed_form_symmetric(sc: SpectralCurve, z: complex) -> Tuple[complex, complex, complex]:
    a, c, t = sc.params.a, sc.params.c, sc.params.t
    z = complex(z)
    q = z * z + a * a
    e1 = ((t + 4 * c) * z * z + (t + 2 * c) * a * a) / (z * q)
    e2 = (a * a * z * z + sc.C1) / q
    e3 = ((t + 2 * c) * a * a * z * z + sc.C2) / (z * q)
    return e1, e2, e3


def _constants_at(cd: ConformalData, z: complex) -> Tuple[float, float]:
    a, c, t = cd.params.a, cd.params.c, cd.params.t
    s1, s2, s3 = branch_values(cd, z)
    e2 = s1 * s2 + s1 * s3 + s2 * s3
    e3 = s1 * s2 * s3
    q = z * z + a * a
    C1 = e2 * q - a * a * z * z
    C2 = e3 * z * q - (t + 2 * c) * a * a * z * z
    return C1.real, C2.real


def compute_constants(cd: ConformalData, mu1=None, tol: float = CONSTANTS_RTOL) -> Tuple[float, float]:
    """
    C1, C2 from the symmetric functions at the gap midpoint, cross-checked at
    an off-axis point, against C2 = a^2 (t+2c) |S1,+(0)|^2 and, when a mu1
    density grid is supplied, against C1 = a^4 + 4c^2 + 2c t int s^2/(s^2+a^2) dmu1.

    Raises:
        InconsistentConstants: routes disagree beyond tol
    """
    a, c, t = cd.params.a, cd.params.c, cd.params.t
    C1, C2 = _constants_at(cd, 0.5 * (cd.x1 + cd.x2))
    routes: Dict[str, Tuple[float, float]] = {}

    z_off = 0.5 * (cd.x1 + cd.x2) + 0.5j * a
    C1_off, C2_off = _constants_at(cd, z_off)
    routes['C1 off-axis'] = (C1_off, C1)
    routes['C2 off-axis'] = (C2_off, C2)

    s_plus = conformal.S_from_w(cd, conformal.branch_preimage(cd, 0.0, 1, PLUS))
    routes['C2 boundary value'] = (a * a * (t + 2 * c) * abs(s_plus) ** 2, C2)

    if mu1 is not None:
        integral = float(np.sum(mu1.weights * mu1.values * mu1.nodes ** 2 / (mu1.nodes ** 2 + a * a)))
        routes['C1 integral'] = (a ** 4 + 4 * c * c + 2 * c * t * integral, C1)

    scale = max(abs(C1), abs(C2), a ** 4)
    for name, (got, expected) in routes.items():
        if abs(got - expected) > tol * scale:
            raise InconsistentConstants(
                f"{name}: {got:.15g} vs {expected:.15g}", route=name, got=got, expected=expected,
            )
    logger.debug(f"C1={C1:.15g} C2={C2:.15g}")
    return C1, C2


def curve_coefficients(sc: SpectralCurve) -> np.ndarray:
    """4x4 matrix M with M[i, j] the coefficient of S^i z^j in P"""
    a, c, t = sc.params.a, sc.params.c, sc.params.t
    m = np.zeros((4, 4))
    m[3, 3] = 1.0
    m[2, 2] = -(t + 4 * c)
    m[3, 1] = m[1, 3] = a * a
    m[2, 0] = m[0, 2] = -a * a * (t + 2 * c)
    m[1, 1] = sc.C1
    m[0, 0] = -sc.C2
    return m


def P_eval(sc: SpectralCurve, S: complex, z: complex) -> complex:
    m = curve_coefficients(sc)
    return complex(np.polynomial.polynomial.polyval2d(S, z, m))


def P_residual(sc: SpectralCurve, S: complex, z: complex) -> float:
    """|P(S, z)| relative to the sum of the moduli of its terms"""
    m = curve_coefficients(sc)
    powers_s = np.array([S ** i for i in range(4)])
    powers_z = np.array([z ** j for j in range(4)])
    terms = m * np.outer(powers_s, powers_z)
    return float(abs(terms.sum()) / max(np.abs(terms).sum(), 1e-300))


def curve_symmetry_check(sc: SpectralCurve) -> ValidationReport:
    """P(S, z) = P(z, S) and P(-S, -z) = P(S, z), on the coefficients"""
    report = ValidationReport('curve symmetry')
    m = curve_coefficients(sc)
    report.add_check('swap symmetry', bool(np.array_equal(m, m.T)))
    odd = [(i, j) for i in range(4) for j in range(4) if (i + j) % 2 == 1]
    report.add_check('odd symmetry', all(m[i, j] == 0.0 for i, j in odd))
    return report


def _cluster(roots: Sequence[complex], rtol: float) -> List[Tuple[complex, int]]:
    remaining = sorted(roots, key=lambda r: (r.real, r.imag))
    clusters: List[Tuple[complex, int]] = []
    while remaining:
        seed = remaining[0]
        near = [k for k, r in enumerate(remaining) if abs(r - seed) <= rtol * max(1.0, abs(seed))]
        clusters.append((complex(np.mean([remaining[k] for k in near])), len(near)))
        remaining = [r for k, r in enumerate(remaining) if k not in near]
    return clusters


def discriminant(sc: SpectralCurve) -> Discriminant:
    """
    Disc_S P as a polynomial in z, with roots grouped into clusters.

    Raises:
        DegreeMismatch: leading coefficient cancels
    """
    a, c, t = sc.params.a, sc.params.c, sc.params.t
    A = [0.0, a * a, 0.0, 1.0]
    B = [-a * a * (t + 2 * c), 0.0, -(t + 4 * c)]
    C = [0.0, sc.C1, 0.0, a * a]
    D = [-sc.C2, 0.0, -a * a * (t + 2 * c)]

    def mul(*factors):
        out = [1.0]
        for factor in factors:
            out = poly.polymul(out, factor)
        return out

    terms = [
        18.0 * np.asarray(mul(A, B, C, D)),
        -4.0 * np.asarray(mul(B, B, B, D)),
        np.asarray(mul(B, B, C, C)),
        -4.0 * np.asarray(mul(A, C, C, C)),
        -27.0 * np.asarray(mul(A, A, D, D)),
    ]
    total = np.zeros(13)
    for term in terms:
        total[:len(term)] += term

    scale = max(np.abs(term).max() for term in terms)
    lead = total[12]
    if abs(lead) <= 1e-12 * scale or abs(lead + 4.0 * a ** 6) > 1e-9 * scale:
        raise DegreeMismatch(f"leading coefficient {lead:.6g} (expected {-4 * a ** 6:.6g})", lead=lead)
    # Disc is even in z; odd coefficients are rounding noise
    total[1::2] = 0.0

    # roots in u = z^2 first, then both square roots
    u_roots = poly.polyroots(total[0::2])
    z_plus = np.sqrt(u_roots.astype(complex))
    roots = np.concatenate((z_plus, -z_plus))
    clusters = _cluster(list(roots), CLUSTER_RTOL)
    logger.debug(f"discriminant clusters: {[(complex(r), m) for r, m in clusters]}")
    return Discriminant(tuple(total), tuple(complex(r) for r in roots), tuple(clusters))


def discriminant_pattern(sc: SpectralCurve, disc: Discriminant, tol: float = 1e-8) -> ValidationReport:
    """Simple real roots at ±x1, ±x2 and double imaginary roots at ±ib1, ±ib2"""
    cd = sc.cd
    report = ValidationReport('discriminant')
    report.add_check('degree 12', disc.degree == 12, disc.degree)
    simple = sorted(r.real for r, m in disc.clusters if m == 1 and abs(r.imag) <= 1e-6 * cd.scale)
    double = sorted(r.imag for r, m in disc.clusters if m == 2 and abs(r.real) <= 1e-6 * cd.scale)
    report.add_check('four simple real roots', len(simple) == 4, len(simple))
    report.add_check('four double imaginary roots', len(double) == 4, len(double))
    if len(simple) == 4:
        expected = [-cd.x2, -cd.x1, cd.x1, cd.x2]
        err = max(abs(got - want) for got, want in zip(simple, expected))
        report.add_check('branch points match critical values', err < tol * cd.scale, err, tol)
    if len(double) == 4 and not math.isnan(sc.b1):
        expected = [-sc.b2, -sc.b1, sc.b1, sc.b2]
        # double roots split under rounding; agreement at the square root of the precision
        err = max(abs(got - want) for got, want in zip(double, expected))
        report.add_check('nodes match double roots', err < 1e-5 * cd.scale, err, 1e-5)
    return report


def imaginary_axis_branches(cd: ConformalData, y: np.ndarray) -> np.ndarray:
    """Im S_j(iy) for y > 0, shape (3, len(y)); the values S_j(iy) are purely imaginary"""
    out = np.empty((3, len(y)))
    for k, yk in enumerate(y):
        out[:, k] = [s.imag for s in branch_values(cd, 1j * yk)]
    return out


def _im_branch(cd: ConformalData, sheet: int, y: float) -> float:
    return conformal.S_from_w(cd, conformal.branch_preimage(cd, 1j * y, sheet)).imag


def _bracket_root(fn, lo: float, hi: float, name: str, tol: float) -> float:
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo * f_hi > 0:
        raise NodeNotFound(f"no sign change for {name} on [{lo:.6g}, {hi:.6g}]", node=name, lo=lo, hi=hi)
    return brentq(fn, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def find_nodes(cd: ConformalData) -> Tuple[float, float, float]:
    """
    b0: S1(ib0) = 0 with b0 in (0, a); b1: S1(ib1) = S2(ib1) with b1 < a;
    b2: S1(ib2) = S3(ib2) with b2 > a. Each by brentq on imaginary parts.

    Raises:
        NodeNotFound
    """
    a = cd.params.a
    tol = 1e-15 * a
    lo, hi = 1e-9 * a, a * (1.0 - 1e-7)

    b0 = _bracket_root(lambda y: _im_branch(cd, 1, y), lo, hi, 'b0', tol)
    b1 = _bracket_root(lambda y: _im_branch(cd, 1, y) - _im_branch(cd, 2, y), lo, hi, 'b1', tol)

    diff3 = lambda y: _im_branch(cd, 1, y) - _im_branch(cd, 3, y)
    lo3, hi3 = a * (1.0 + 1e-7), 2.0 * a
    while diff3(hi3) < 0:
        hi3 *= 2.0
        if hi3 > 1e8 * a:
            raise NodeNotFound("no sign change for b2 above a", node='b2')
    b2 = _bracket_root(diff3, lo3, hi3, 'b2', tol)

    if not 0 < b0 <= b1 < a < b2:
        raise NodeNotFound(f"node ordering violated: b0={b0}, b1={b1}, b2={b2}", b0=b0, b1=b1, b2=b2)
    logger.debug(f"nodes b0={b0:.12g} b1={b1:.12g} b2={b2:.12g}")
    return b0, b1, b2


def scaling_check(params: ModelParams, lam: float, tol: float = 1e-9) -> ValidationReport:
    """Map covariance from conformal.scaling_check plus the nodes b0, b1, b2 scaling like lam"""
    report = conformal.scaling_check(params, lam, tol)
    base = find_nodes(conformal.solve_map(params))
    scaled = find_nodes(conformal.solve_map(params.scaled(lam)))
    for name, got, ref in zip(('b0', 'b1', 'b2'), scaled, base):
        err = abs(got - lam * ref) / (lam * ref)
        report.add_check(f'{name} scales', err < tol, err, tol)
    return report


def build_curve(cd: ConformalData, mu1=None) -> SpectralCurve:
    """Spectral curve with constants, nodes and discriminant clusters"""
    C1, C2 = compute_constants(cd, mu1)
    sc = SpectralCurve(cd=cd, C1=C1, C2=C2)
    sc.b0, sc.b1, sc.b2 = find_nodes(cd)
    sc.disc_roots = discriminant(sc).clusters
    logger.info(
        f"📈 spectral curve: C1={C1:.12g} C2={C2:.12g} "
        f"b0={sc.b0:.10g} b1={sc.b1:.10g} b2={sc.b2:.10g}"
    )
    return sc


# zS on the imaginary axis

def _zs_grid(cd: ConformalData, n: int = 2000) -> Tuple[np.ndarray, np.ndarray]:
    a = cd.params.a
    top = 1e4 * cd.scale
    below = np.geomspace(1e-7 * a, a * (1.0 - 1e-9), n)
    above = np.geomspace(a * (1.0 + 1e-9), top, n)
    return below, above


def _count_crossings(values: np.ndarray, v: float) -> int:
    shifted = values - v
    return int(np.count_nonzero(shifted[:-1] * shifted[1:] < 0))


@dataclass(frozen=True)
class ZSCount:
    value: float
    total: int
    by_sheet: Dict[int, int]


def zs_value_solutions(sc: SpectralCurve, v: float) -> ZSCount:
    """
    Solutions of z S_j(z) = v on the imaginary axis of each sheet.

    With z = iy, zS = -y Im S_j(iy) is real and even in y; counted for y > 0
    by sign changes on a geometric grid (split at the pole y = a of S1) and
    doubled.
    """
    below, above = _zs_grid(sc.cd)
    by_sheet: Dict[int, int] = {}
    for part in (below, above):
        h = -part * imaginary_axis_branches(sc.cd, part)
        for sheet in (1, 2, 3):
            by_sheet[sheet] = by_sheet.get(sheet, 0) + 2 * _count_crossings(h[sheet - 1], v)
    return ZSCount(value=v, total=sum(by_sheet.values()), by_sheet=by_sheet)


def zS_value_count(sc: SpectralCurve, v: float) -> int:
    return zs_value_solutions(sc, v).total


@dataclass(frozen=True)
class ZSCriticalValues:
    s1: float   # min of x S1(x) on (x1, inf), attained at p1
    p1: float
    s2: float   # max of zS1 on (0, ib0), attained at i p2
    p2: float


def zs_critical_values(sc: SpectralCurve) -> ZSCriticalValues:
    """Critical values of zS1: 0 < s2 < s1 < t + 2c"""
    cd = sc.cd

    def xs1(x: float) -> float:
        return x * conformal.S_from_w(cd, conformal.branch_preimage(cd, x, 1)).real

    def h1(y: float) -> float:
        return -y * _im_branch(cd, 1, y)

    xs = np.geomspace(cd.x1 * (1.0 + 1e-9), 1e3 * cd.scale, 400)
    vals = np.array([xs1(x) for x in xs])
    k = int(np.argmin(vals))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    res = minimize_scalar(xs1, bounds=(lo, hi), method='bounded', options={'xatol': 1e-12 * hi})
    p1, s1 = float(res.x), float(res.fun)

    ys = np.linspace(0.0, sc.b0, 402)[1:-1]
    hv = np.array([h1(y) for y in ys])
    k = int(np.argmax(hv))
    lo, hi = ys[max(k - 1, 0)], ys[min(k + 1, len(ys) - 1)]
    res = minimize_scalar(lambda y: -h1(y), bounds=(lo, hi), method='bounded', options={'xatol': 1e-12 * sc.b0})
    p2, s2 = float(res.x), float(-res.fun)
    return ZSCriticalValues(s1=s1, p1=p1, s2=s2, p2=p2)


# Property checks

def verify_curve(sc: SpectralCurve, n_points: int = 200, seed: int = 7) -> ValidationReport:
    """Curve equation, oddness, sum rules, gluing and far field at deterministic sample points"""
    cd = sc.cd
    a, c, t = sc.params.a, sc.params.c, sc.params.t
    report = ValidationReport('spectral')
    rng = np.random.default_rng(seed)
    radius = rng.uniform(0.1, 3.0, n_points) * cd.scale
    angle = rng.uniform(0.05, np.pi - 0.05, n_points) * rng.choice([-1.0, 1.0], n_points)
    zs = radius * np.exp(1j * angle)

    worst_curve = worst_odd = worst_e1 = worst_e2 = worst_e3 = 0.0
    for z in zs:
        values = branch_values(cd, z)
        mirrored = branch_values(cd, -z)
        worst_curve = max(worst_curve, *(P_residual(sc, s, z) for s in values))
        worst_odd = max(worst_odd, *(abs(s + m) / max(1.0, abs(s)) for s, m in zip(values, mirrored)))
        e = symmetric_functions(sc, z)
        closed = closed_form_symmetric(sc, z)
        worst_e1 = max(worst_e1, abs(e[0] - closed[0]))
        worst_e2 = max(worst_e2, abs(e[1] - closed[1]) / max(1.0, abs(closed[1])))
        worst_e3 = max(worst_e3, abs(e[2] - closed[2]) / max(1.0, abs(closed[2])))

    report.add_check('curve equation', worst_curve < 1e-9, worst_curve, 1e-9)
    report.add_check('odd branches', worst_odd < 1e-9, worst_odd, 1e-9)
    report.add_check('sum rule e1', worst_e1 < 1e-10, worst_e1, 1e-10)
    report.add_check('e2 closed form', worst_e2 < 1e-9, worst_e2, 1e-9)
    report.add_check('e3 closed form', worst_e3 < 1e-9, worst_e3, 1e-9)

    report.add_check('C1 > a^4 + 4c^2', sc.C1 > a ** 4 + 4 * c * c, sc.C1, a ** 4 + 4 * c * c)
    report.add_check('C2 >= 0', sc.C2 >= 0, sc.C2, 0.0)
    c2_nodes = a * a * (t + 2 * c) * sc.b0 ** 2
    report.add_check('C2 from b0', abs(c2_nodes - sc.C2) < 1e-6 * max(1.0, sc.C2), abs(c2_nodes - sc.C2), 1e-6)

    # gluing across the cuts
    glue1 = max(
        abs(eval_S(sc, SheetPoint(x, Sheet.FIRST, Side.PLUS)) - eval_S(sc, SheetPoint(x, Sheet.SECOND, Side.MINUS)))
        for x in np.linspace(-0.95, 0.95, 21) * cd.x1
    )
    xs2 = cd.x2 * np.array([1.05, 1.5, 3.0, 10.0, -2.0])
    glue2 = max(
        abs(eval_S(sc, SheetPoint(x, Sheet.SECOND, Side.PLUS)) - eval_S(sc, SheetPoint(x, Sheet.THIRD, Side.MINUS)))
        for x in xs2
    )
    report.add_check('gluing on Δ1', glue1 < 1e-8, glue1, 1e-8)
    report.add_check('gluing on Δ2', glue2 < 1e-8, glue2, 1e-8)

    # far field: S2 -> ia + c/z in the upper half plane
    far = [1e3 * cd.scale * np.exp(1j * phi) for phi in (0.3, 1.2, 2.5)]
    ratios = []
    for z in far:
        s2 = branch_values(cd, z)[1]
        ratios.append(abs(s2 - 1j * a - c / z) * abs(z) ** 2)
    report.add_check('S2 far field O(1/z^2)', max(ratios) < 1e3 * cd.scale ** 2, max(ratios))

    s1_far = branch_values(cd, 1e4 * cd.scale * (1 + 1j))[0]
    zs1 = abs(1e4 * cd.scale * (1 + 1j) * s1_far - (t + 2 * c))
    report.add_check('z S1 -> t + 2c', zs1 < 1e-3 * (t + 2 * c), zs1)

    report.merge(curve_symmetry_check(sc))
    return report
