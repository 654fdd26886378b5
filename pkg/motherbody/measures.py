"""
Mother-body measure mu1, constrained measure mu2, their Cauchy transforms,
potentials and g-functions, and the t -> 0 limit measure rho.

Both Cauchy transforms are rational in the branches of S:

    t C_mu1(z) = S1(z) - 2cz/(z^2 + a^2)
    t C_mu2(z) = -S3(z) + (t + 2c)/z -+ ia       (+-Im z > 0)

so densities come from boundary values on the real axis and potentials from
integrating real parts of C along the axis, anchored far out through the
known far-field behaviour. Direct quadrature against the density grids is
kept as a second route for checks.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from . import conformal
from .conformal import ConformalData, MINUS, PLUS
from .config import get_settings
from .errors import BranchCutHit, ConstraintViolation, NegativeDensity
from .model import ModelParams
from .quadrature import (
    chebyshev_sqrt_rule,
    cosine_rule,
    gauss_legendre,
    geometric_panels,
    sqrt_start_rule,
    tail_rule,
)
from .report import ValidationReport
from .spectral import branch_values

logger = logging.getLogger(__name__)

NEGATIVE_TOL = 1e-12
CONSTRAINT_TOL = 1e-10
ANCHOR_FACTOR = 4.0


@dataclass(frozen=True)
class DensityGrid:
    label: str
    support: Tuple[Tuple[float, float], ...]
    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    tail_kappa: float = 0.0   # density ~ tail_kappa / x^2 beyond x_max
    x_max: float = math.inf

    def tail_mass(self) -> float:
        return 2.0 * self.tail_kappa / self.x_max if self.tail_kappa else 0.0

    def mass(self) -> float:
        return float(np.sum(self.weights * self.values)) + self.tail_mass()

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray]) -> Union[float, complex]:
        """Integral of fn against the grid part of the measure (tail excluded); complex fn gives a complex result"""
        total = np.sum(self.weights * self.values * fn(self.nodes))
        return complex(total) if np.iscomplexobj(total) else float(total)


def _fit_tail(nodes: np.ndarray, values: np.ndarray, x_max: float) -> float:
    """kappa of a kappa/x^2 fit over the last decade of nodes"""
    mask = nodes >= x_max / 10.0
    x, v = nodes[mask], values[mask]
    return float(np.sum(v / x ** 2) / np.sum(1.0 / x ** 4))


# Densities

def mu1_density_at(cd: ConformalData, x: float) -> float:
    """-Im S1,+(x) / (pi t) on (-x1, x1), zero elsewhere"""
    if abs(x) >= cd.x1:
        return 0.0
    s1_plus = conformal.S_from_w(cd, conformal.branch_preimage(cd, x, 1, PLUS))
    return -s1_plus.imag / (math.pi * cd.params.t)


def mu2_density_at(cd: ConformalData, x: float) -> float:
    """a/(pi t) on [-x2, x2], (a + Im S3,+(x))/(pi t) outside"""
    a, t = cd.params.a, cd.params.t
    if abs(x) <= cd.x2:
        return a / (math.pi * t)
    s3_plus = conformal.S_from_w(cd, conformal.branch_preimage(cd, x, 3, PLUS))
    return (a + s3_plus.imag) / (math.pi * t)


def density_mu1(cd: ConformalData, n: Optional[int] = None) -> DensityGrid:
    """
    mu1 on Chebyshev nodes of [-x1, x1].

    Raises:
        NegativeDensity: a node value below zero (branch mislabelling)
    """
    n = n or get_settings().quadrature.mu1_nodes
    nodes, weights = chebyshev_sqrt_rule(n, cd.x1)
    values = np.array([mu1_density_at(cd, x) for x in nodes])
    worst = float(values.min())
    if worst < -NEGATIVE_TOL * float(values.max()):
        k = int(values.argmin())
        raise NegativeDensity(f"mu1 density {worst:.3e} at x={nodes[k]:.6g}", x=float(nodes[k]), value=worst)
    values = np.maximum(values, 0.0)
    grid = DensityGrid('mu1', ((-cd.x1, cd.x1),), nodes, values, weights)
    logger.debug(f"mu1 mass {grid.mass():.15g} on {n} nodes")
    return grid


def density_mu2(cd: ConformalData, n: Optional[int] = None) -> DensityGrid:
    """
    mu2 on the whole line: the constant a/(pi t) on [-x2, x2], the S3 jump on
    x2 < |x| <= x_max (geometric panels), and a fitted kappa/x^2 tail beyond.

    Raises:
        ConstraintViolation: density above a/(pi t)
    """
    q = get_settings().quadrature
    n = n or q.mu2_nodes
    a, t = cd.params.a, cd.params.t
    sigma = a / (math.pi * t)
    x_max = q.tail_factor * cd.x2

    outer, outer_w = geometric_panels(n, cd.x2, x_max, first=0.25 * cd.x2)
    outer_v = np.array([mu2_density_at(cd, x) for x in outer])
    worst = float(outer_v.max()) - sigma
    if worst > CONSTRAINT_TOL:
        k = int(outer_v.argmax())
        raise ConstraintViolation(
            f"mu2 density exceeds a/(pi t) by {worst:.3e} at x={outer[k]:.6g}", x=float(outer[k]), excess=worst,
        )
    if outer_v.min() < -NEGATIVE_TOL * sigma:
        raise NegativeDensity(f"mu2 density {outer_v.min():.3e} on Δ2", value=float(outer_v.min()))
    outer_v = np.maximum(outer_v, 0.0)
    kappa = _fit_tail(outer, outer_v, x_max)

    inner, inner_w = gauss_legendre(n, -cd.x2, cd.x2)
    nodes = np.concatenate((-outer[::-1], inner, outer))
    weights = np.concatenate((outer_w[::-1], inner_w, outer_w))
    values = np.concatenate((outer_v[::-1], np.full(n, sigma), outer_v))
    grid = DensityGrid('mu2', ((-math.inf, math.inf),), nodes, values, weights, kappa, x_max)
    logger.debug(f"mu2 mass {grid.mass():.12g}, tail kappa {kappa:.6g}")
    return grid


def mu2_mass_within(cd: ConformalData, X: float, n: Optional[int] = None) -> float:
    """mu2([-X, X])"""
    n = n or get_settings().quadrature.mu2_nodes
    sigma = cd.params.a / (math.pi * cd.params.t)
    if X <= cd.x2:
        return 2.0 * sigma * X
    nodes, weights = geometric_panels(n, cd.x2, X, first=min(0.25 * cd.x2, X - cd.x2))
    outer = float(sum(w * mu2_density_at(cd, x) for x, w in zip(nodes, weights)))
    return 2.0 * (sigma * cd.x2 + outer)


def mu1_cdf(cd: ConformalData, xs: Sequence[float], n: int = 64) -> np.ndarray:
    """
    mu1((-inf, x]) with s = -x1 cos(phi), Gauss-Legendre in phi; the
    integrand rho(-x1 cos phi) x1 sin(phi) is smooth.
    """
    out = []
    for x in xs:
        if x <= -cd.x1:
            out.append(0.0)
            continue
        if x >= cd.x1:
            out.append(1.0)
            continue
        phi_x = math.acos(-x / cd.x1)
        phi, w = gauss_legendre(n, 0.0, phi_x)
        s = -cd.x1 * np.cos(phi)
        dens = np.array([mu1_density_at(cd, v) for v in s])
        out.append(float(np.sum(w * dens * cd.x1 * np.sin(phi))))
    return np.array(out)


def mu2_tail_mass_above(cd: ConformalData, x: float, n: Optional[int] = None) -> float:
    """mu2((x, inf))"""
    q = get_settings().quadrature
    n = n or q.mu2_nodes
    total = (cd.params.t + cd.params.c) / cd.params.t
    if x < 0:
        return total - mu2_tail_mass_above(cd, -x, n)
    return 0.5 * total - 0.5 * mu2_mass_within(cd, x, n)


def endpoint_exponent(density: Callable[[float], float], endpoint: float, inward: float, span: float) -> float:
    """
    Log-log slope of density(endpoint + inward * d) against d for d in the
    innermost ``span`` of the support.
    """
    d = np.geomspace(1e-4, 1.0, 24) * span
    values = np.array([density(endpoint + inward * dk) for dk in d])
    slope, _ = np.polyfit(np.log(d), np.log(values), 1)
    return float(slope)


def endpoint_exponents(cd: ConformalData) -> Tuple[float, float]:
    """Vanishing exponents of mu1 at x1 and of sigma - mu2 at x2"""
    a, t = cd.params.a, cd.params.t
    sigma = a / (math.pi * t)
    e1 = endpoint_exponent(lambda x: mu1_density_at(cd, x), cd.x1, -1.0, 0.1 * cd.x1)
    e2 = endpoint_exponent(lambda x: sigma - mu2_density_at(cd, x), cd.x2, 1.0, 0.1 * cd.x2)
    return e1, e2


# t -> 0 limit measure

def rho_limit_density(a: float, c: float, x: float) -> float:
    """a/pi on [-c/a, c/a], (a/pi) u^2/(1 + sqrt(1 - u^2)) with u = c/(a|x|) outside"""
    if a * abs(x) <= c:
        return a / math.pi
    u = c / (a * abs(x))
    return a / math.pi * u * u / (1.0 + math.sqrt(1.0 - u * u))


def rho_limit_potential(a: float, c: float, x: float) -> float:
    """Logarithmic potential of rho on the real axis"""
    if a * abs(x) >= c:
        return -c * math.log(abs(x))
    r = math.sqrt(c * c - a * a * x * x)
    return r - c * math.log(c + r) + c * math.log(a)


def rho_limit_cauchy(a: float, c: float, z: complex) -> complex:
    """C_rho(z) = -+ia + c/z - (c^2 - a^2 z^2)^(1/2)/z for +-Im z > 0"""
    z = complex(z)
    if z.imag == 0.0:
        raise BranchCutHit("C_rho is evaluated off the real axis", z=z)
    sign = 1.0 if z.imag > 0 else -1.0
    return -sign * 1j * a + c / z - np.sqrt(c * c - a * a * z * z + 0j) / z


def rho_limit_measure(a: float, c: float, n: int = 48, tail_factor: float = 1000.0) -> DensityGrid:
    """The t = 0 limit of t mu2, density in closed form, kappa/x^2 tail with kappa = c^2/(2 pi a)"""
    edge = c / a
    x_max = tail_factor * edge
    inner, inner_w = gauss_legendre(n, -edge, edge)
    outer, outer_w = geometric_panels(n, edge, x_max, first=0.25 * edge)
    outer_v = np.array([rho_limit_density(a, c, x) for x in outer])
    nodes = np.concatenate((-outer[::-1], inner, outer))
    weights = np.concatenate((outer_w[::-1], inner_w, outer_w))
    values = np.concatenate((outer_v[::-1], np.full(n, a / math.pi), outer_v))
    kappa = c * c / (2.0 * math.pi * a)
    return DensityGrid('rho', ((-math.inf, math.inf),), nodes, values, weights, kappa, x_max)


def rho_limit_check(a: float, c: float) -> ValidationReport:
    """Mass c, density a/pi at 0, and U_rho(x) + c log|x| <= 0 with equality for |x| >= c/a"""
    report = ValidationReport('rho limit')
    grid = rho_limit_measure(a, c)
    report.add_check('mass', abs(grid.mass() - c) < 1e-8, abs(grid.mass() - c), 1e-8)
    report.add_check('density at 0', abs(rho_limit_density(a, c, 0.0) - a / math.pi) < 1e-15)

    xs = np.linspace(0.05, 3.0, 60) * (c / a)
    gaps = np.array([rho_limit_potential(a, c, x) + c * math.log(x) for x in xs])
    outside = a * xs >= c
    report.add_check('inequality inside', bool(np.all(gaps[~outside] < 1e-12)), float(gaps[~outside].max()))
    report.add_check('equality outside', bool(np.all(np.abs(gaps[outside]) < 1e-12)), float(np.abs(gaps[outside]).max()))

    # closed-form Cauchy transform against quadrature on the grid
    z = 1j * c / a
    direct = grid.integrate(lambda s: 1.0 / (z - s))
    err = abs(direct - rho_limit_cauchy(a, c, z))
    report.add_check('cauchy transform quadrature', err < 1e-8, err, 1e-8)
    return report


# Cauchy transforms

def _plane_sign(z: complex, side: Optional[str]) -> float:
    if z.imag > 0:
        return 1.0
    if z.imag < 0:
        return -1.0
    if side == PLUS:
        return 1.0
    if side == MINUS:
        return -1.0
    raise BranchCutHit(f"C_mu2 needs a side on the real axis (z={z.real})", z=z)


def cauchy_transforms(cd: ConformalData, z: complex, side: Optional[str] = None) -> Tuple[complex, complex]:
    """
    (C_mu1(z), C_mu2(z)); on the real axis ``side`` selects boundary values.

    Raises:
        BranchCutHit: real z without a side where a transform jumps
        PoleAt: z = 0 or z = ±ia exactly
    """
    a, c, t = cd.params.a, cd.params.c, cd.params.t
    z = complex(z)
    if z.imag == 0.0 and abs(z.real) < cd.x1 and side is None:
        raise BranchCutHit(f"C_mu1 needs a side on [-x1, x1] (z={z.real})", z=z)
    sign = _plane_sign(z, side)
    s1, _, s3 = branch_values(cd, z, side or PLUS)
    c1 = (s1 - 2.0 * c * z / (z * z + a * a)) / t
    c2 = (-s3 + (t + 2.0 * c) / z - sign * 1j * a) / t
    return c1, c2


def cauchy_mu2_via_s2(cd: ConformalData, z: complex, side: Optional[str] = None) -> complex:
    """Second route: t C_mu2 = S2 + t C_mu1 -+ ia"""
    a, c, t = cd.params.a, cd.params.c, cd.params.t
    z = complex(z)
    sign = _plane_sign(z, side)
    s1, s2, _ = branch_values(cd, z, side or PLUS)
    c1 = (s1 - 2.0 * c * z / (z * z + a * a)) / t
    return (s2 + t * c1 - sign * 1j * a) / t


# Potentials

@dataclass
class Measures:
    """Solved measures with cached potential anchors at X, x2, x1 and 0"""
    cd: ConformalData
    mu1: DensityGrid
    mu2: DensityGrid
    anchors: Dict[float, Tuple[float, float]] = field(default_factory=dict)

    @property
    def params(self):
        return self.cd.params

    @property
    def m2(self) -> float:
        return (self.params.t + self.params.c) / self.params.t


def _potential_slopes(cd: ConformalData, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """dU_mu1/ds and dU_mu2/ds at real s > 0, from '+' boundary values"""
    a, c, t = cd.params.a, cd.params.c, cd.params.t
    d1 = np.empty(len(s))
    d2 = np.empty(len(s))
    for k, x in enumerate(s):
        s1, _, s3 = branch_values(cd, complex(x), PLUS)
        d1[k] = -(s1.real - 2.0 * c * x / (x * x + a * a)) / t
        d2[k] = -(-s3.real + (t + 2.0 * c) / x) / t
    return d1, d2


def _far_potentials(ms: Measures, x: float, n: int) -> Tuple[float, float]:
    """U(x) = -m log x - int_x^inf (U'(s) + m/s) ds for x beyond the anchor"""
    nodes, weights = tail_rule(n, x)
    d1, d2 = _potential_slopes(ms.cd, nodes)
    u1 = -math.log(x) - float(np.sum(weights * (d1 + 1.0 / nodes)))
    u2 = -ms.m2 * math.log(x) - float(np.sum(weights * (d2 + ms.m2 / nodes)))
    return u1, u2


def _integrate_slopes(cd: ConformalData, p: float, q: float, n: int) -> Tuple[float, float]:
    """int_p^q of both potential slopes, square-root endpoints allowed"""
    if q <= p:
        return 0.0, 0.0
    nodes, weights = cosine_rule(n, p, q)
    d1, d2 = _potential_slopes(cd, nodes)
    return float(np.sum(weights * d1)), float(np.sum(weights * d2))


def build_measures(cd: ConformalData) -> Measures:
    """Densities plus potential anchors, walking inwards from X = 4 x2"""
    n = get_settings().quadrature.path_nodes
    ms = Measures(cd=cd, mu1=density_mu1(cd), mu2=density_mu2(cd))

    X = ANCHOR_FACTOR * cd.x2
    ms.anchors[X] = _far_potentials(ms, X, n)
    breakpoints = [X, cd.x2, cd.x1, 0.0]
    for q, p in zip(breakpoints[:-1], breakpoints[1:]):
        i1, i2 = _integrate_slopes(cd, p, q, n)
        uq1, uq2 = ms.anchors[q]
        ms.anchors[p] = (uq1 - i1, uq2 - i2)

    logger.info(
        f"📊 measures: mass mu1={ms.mu1.mass():.12g}, mu2={ms.mu2.mass():.10g} "
        f"(target {ms.m2:.10g}), U1(0)={ms.anchors[0.0][0]:.10g}"
    )
    return ms


def potentials(ms: Measures, x: float) -> Tuple[float, float]:
    """(U_mu1(x), U_mu2(x)) for real x, U = -int log|x - s| dmu"""
    n = get_settings().quadrature.path_nodes
    x = abs(float(x))
    if x in ms.anchors:
        return ms.anchors[x]
    X = max(ms.anchors)
    if x > X:
        return _far_potentials(ms, x, n)
    q = min(b for b in ms.anchors if b > x)
    i1, i2 = _integrate_slopes(ms.cd, x, q, n)
    uq1, uq2 = ms.anchors[q]
    return uq1 - i1, uq2 - i2


def potentials_complex(ms: Measures, z: complex) -> Tuple[float, float]:
    """
    Potentials at complex z along the vertical path from Re z:
    U(x + iy) = U(x) + int_0^y Im C(x + i tau) d tau.
    """
    z = complex(z)
    x, y = abs(z.real), abs(z.imag)
    u1, u2 = potentials(ms, x)
    if y == 0.0:
        return u1, u2
    n = get_settings().quadrature.path_nodes
    taus, weights = sqrt_start_rule(n, 0.0, y)
    acc1 = acc2 = 0.0
    for tau, w in zip(taus, weights):
        c1, c2 = cauchy_transforms(ms.cd, complex(x, tau))
        acc1 += w * c1.imag
        acc2 += w * c2.imag
    return u1 + acc1, u2 + acc2


def potential_by_quadrature(grid: DensityGrid, x: float) -> float:
    """-int log|x - s| d(grid) with the tail folded in as kappa/s^2 beyond x_max"""
    value = -grid.integrate(lambda s: np.log(np.abs(x - s)))
    if grid.tail_kappa:
        # far tail: log|x - s| ~ log s; int_X^inf log(s) kappa/s^2 ds = kappa (log X + 1)/X, both sides
        value -= 2.0 * grid.tail_kappa * (math.log(grid.x_max) + 1.0) / grid.x_max
    return value


# g-functions

def g1_value(mu1: DensityGrid, z: complex) -> complex:
    """int log(z - s) dmu1(s) on the Chebyshev grid, principal log per node"""
    z = complex(z)
    return complex(np.sum(mu1.weights * mu1.values * np.log(z - mu1.nodes)))


def g_functions(ms: Measures, z: complex, side: Optional[str] = None) -> Tuple[complex, complex]:
    """
    g1(z) = int log(z - s) dmu1(s) by quadrature (principal log),
    g2(z) = m2 Log z - int_z^inf (C_mu2 - m2/zeta) d zeta along the ray.
    On the real axis g2 is -U_mu2(x) +- i pi mu2((x, inf)).

    Raises:
        BranchCutHit: g1 at real z <= x1
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= ms.cd.x1:
        raise BranchCutHit(f"g1 has a cut on (-inf, x1] (z={z.real})", z=z.real, x1=ms.cd.x1)
    g1 = g1_value(ms.mu1, z)

    if z.imag == 0.0:
        sign = -1.0 if side == MINUS else 1.0
        _, u2 = potentials(ms, z.real)
        return g1, complex(-u2, sign * math.pi * mu2_tail_mass_above(ms.cd, z.real))

    n = get_settings().quadrature.path_nodes
    nodes, weights = tail_rule(n, z)
    acc = 0j
    for zeta, w in zip(nodes, weights):
        _, c2 = cauchy_transforms(ms.cd, zeta)
        acc += w * (c2 - ms.m2 / zeta)
    g2 = ms.m2 * np.log(z) - acc
    return g1, complex(g2)


# Property checks

def measure_checks(ms: Measures) -> ValidationReport:
    """Normalizations, constraint, evenness and endpoint exponents"""
    cd = ms.cd
    a, t = cd.params.a, cd.params.t
    report = ValidationReport('measures')
    m1 = ms.mu1.mass()
    m2 = ms.mu2.mass()
    report.add_check('mu1 mass', abs(m1 - 1.0) < 1e-8, abs(m1 - 1.0), 1e-8)
    report.add_check('mu2 mass', abs(m2 - ms.m2) < 1e-6, abs(m2 - ms.m2), 1e-6)
    excess = float(ms.mu2.values.max() - a / (math.pi * t))
    report.add_check('mu2 constraint', excess <= CONSTRAINT_TOL, excess, CONSTRAINT_TOL)
    asym = float(np.max(np.abs(ms.mu1.values - ms.mu1.values[::-1])))
    report.add_check('mu1 even', asym < 1e-10, asym, 1e-10)
    report.add_check('mu1 positive at 0', mu1_density_at(cd, 0.0) > 0, mu1_density_at(cd, 0.0))

    e1, e2 = endpoint_exponents(cd)
    report.add_check('mu1 exponent at x1', abs(e1 - 0.5) < 0.05, e1, 0.05)
    report.add_check('sigma - mu2 exponent at x2', abs(e2 - 0.5) < 0.05, e2, 0.05)
    return report


def cauchy_checks(ms: Measures, n_points: int = 50, seed: int = 11) -> ValidationReport:
    cd = ms.cd
    report = ValidationReport('cauchy')
    rng = np.random.default_rng(seed)
    zs = cd.scale * rng.uniform(0.2, 3.0, n_points) * np.exp(1j * rng.uniform(0.1, 3.0, n_points))
    zs = np.where(np.arange(n_points) % 2 == 0, zs, np.conj(zs))
    worst = max(
        abs(cauchy_transforms(cd, z)[1] - cauchy_mu2_via_s2(cd, z)) / max(1.0, abs(cauchy_transforms(cd, z)[1]))
        for z in zs
    )
    report.add_check('C_mu2 routes agree', worst < 1e-10, worst, 1e-10)

    x = 3.0 * cd.x2
    direct = ms.mu1.integrate(lambda s: 1.0 / (x - s))
    err = abs(cauchy_transforms(cd, x, PLUS)[0].real - direct)
    report.add_check('C_mu1 against quadrature', err < 1e-8, err, 1e-8)

    z = complex(0.5 * cd.x1, 0.8 * cd.x1)
    direct = ms.mu1.integrate(lambda s: 1.0 / (z - s))
    err = abs(cauchy_transforms(cd, z)[0] - direct)
    report.add_check('C_mu1 against quadrature off the axis', err < 1e-8, err, 1e-8)

    far = 1e6 * cd.scale
    err = abs(cauchy_transforms(cd, far * 1j)[0] * far * 1j - 1.0)
    report.add_check('C_mu1 unit mass', err < 1e-6, err, 1e-6)
    return report


def small_t_errors(a: float, c: float, ts: Sequence[float] = (0.05, 0.02, 0.01), n_grid: int = 81) -> Dict[float, float]:
    """max over [-2c/a, 2c/a] of |t mu2 density - rho density| for each t"""
    xs = np.linspace(-2.0 * c / a, 2.0 * c / a, n_grid)
    errors: Dict[float, float] = {}
    for t in ts:
        cd = conformal.solve_map(ModelParams(a, c, t))
        errors[t] = max(abs(t * mu2_density_at(cd, x) - rho_limit_density(a, c, x)) for x in xs)
        logger.debug(f"t={t}: max |t mu2 - rho| = {errors[t]:.3e}")
    return errors


def monotonicity_check(a: float, c: float, ts: Sequence[float], windows: Sequence[float] = (0.5, 1.0, 2.0)) -> ValidationReport:
    """x1(t), x2(t) and the masses of t mu1, t mu2 on fixed [-X, X] are nondecreasing in t"""
    report = ValidationReport('monotonicity')
    ts = sorted(ts)
    maps = [conformal.solve_map(ModelParams(a, c, t)) for t in ts]
    x1s = [cd.x1 for cd in maps]
    x2s = [cd.x2 for cd in maps]
    report.add_check('x1 increasing', all(p < q for p, q in zip(x1s, x1s[1:])))
    report.add_check('x2 increasing', all(p < q for p, q in zip(x2s, x2s[1:])))
    for X in windows:
        nu1 = [cd.params.t * float(np.diff(mu1_cdf(cd, [-X, X]))[0]) for cd in maps]
        nu2 = [cd.params.t * mu2_mass_within(cd, X) for cd in maps]
        report.add_check(f'nu1 mass on [-{X}, {X}]', all(q >= p - 1e-6 for p, q in zip(nu1, nu1[1:])))
        report.add_check(f'nu2 mass on [-{X}, {X}]', all(q >= p - 1e-6 for p, q in zip(nu2, nu2[1:])))
    return report
