"""
Conformal map of the droplet exterior.

    f(w) = rho w + 2 kappa w / (w^2 + alpha^2)

maps the exterior of the unit disk onto the exterior of the droplet. The same
rational function parametrizes the whole spectral curve: the three preimages
w of a point z label the three sheets,

    sheet 1: exterior of Gamma1    (F1 = inverse of f, w ~ z/rho at infinity)
    sheet 2: between Gamma2 and Gamma1
    sheet 3: inside Gamma2

and the branch values are S_j(z) = f(1/w_j). Gamma1 and Gamma2 are the two
closed curves where f(w) is real off the real axis.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import root as solve_system

from .config import get_settings
from .errors import (
    BranchAmbiguity,
    BranchCutHit,
    NoConvergence,
    PhaseViolation,
    PoleAt,
)
from .model import ModelParams, compute_t_c, require_phase_one
from .report import ValidationReport

logger = logging.getLogger(__name__)

PLUS = 'plus'
MINUS = 'minus'

SEED_FRACTION = 0.01
POLE_GUARD = 1e-300


@dataclass(frozen=True)
class ConformalData:
    params: ModelParams
    rho: float
    kappa: float
    alpha: float
    w1: float
    w2: float
    x1: float
    x2: float
    residual: float

    @property
    def scale(self) -> float:
        return max(self.x2, self.params.a)


@dataclass(frozen=True)
class DropletBoundary:
    theta: np.ndarray
    samples: np.ndarray
    area: float
    harmonic_moments: Tuple[float, ...]  # t_1 .. t_K from the residues of S1
    closed_form_moments: Tuple[float, ...]
    quadrature_moments: Tuple[float, ...]


def map_residuals(a: float, c: float, t: float, rho: float, kappa: float, alpha: float) -> np.ndarray:
    """Residuals of the three equations tying (rho, kappa, alpha) to (a, c, t)"""
    q = 1.0 - alpha ** 4
    return np.array([
        rho / alpha - 2.0 * kappa * alpha / q - a,
        rho * kappa / alpha ** 2 + 2.0 * kappa ** 2 * (1.0 + alpha ** 4) / q ** 2 - c,
        rho ** 2 + 2.0 * rho * kappa / alpha ** 2 - (t + 2.0 * c),
    ])


def _kappa(rho: float, alpha: float, c: float, t: float) -> float:
    return alpha ** 2 * (t + 2.0 * c - rho ** 2) / (2.0 * rho)


def _reduced(x: np.ndarray, a: float, c: float, t: float) -> np.ndarray:
    rho, alpha = x
    kappa = _kappa(rho, alpha, c, t)
    r = map_residuals(a, c, t, rho, kappa, alpha)
    return np.array([r[0] / a, r[1] / c])


def solve_parameters(a: float, c: float, t: float) -> Tuple[float, float, float, float]:
    """
    Solve for (rho, kappa, alpha) without any phase gate.

    kappa is eliminated through the third equation; the remaining 2x2 system
    in (rho, alpha) is solved by a hybrid Powell iteration with continuation
    in t from the small-t limit (sqrt(t0), sqrt(t0)/a).

    Returns:
        (rho, kappa, alpha, residual_norm)
    """
    cfg = get_settings().solver
    t0 = min(t, SEED_FRACTION * compute_t_c(a, c))
    x = np.array([math.sqrt(t0), math.sqrt(t0) / a])
    ladder = [t] if t <= t0 else list(np.geomspace(t0, t, cfg.continuation_steps + 1))

    # the small-t seed is exact to leading order; each step starts from the last solution
    for tk in ladder:
        sol = solve_system(
            _reduced, x, args=(a, c, tk), method='hybr',
            options={'xtol': 1e-15, 'maxfev': 100 * cfg.max_newton},
        )
        rho, alpha = sol.x
        if not (rho > 0 and 0 < alpha < 1) or not np.all(np.isfinite(sol.x)):
            raise NoConvergence(
                f"continuation left the admissible region at t={tk:.6g}",
                a=a, c=c, t=tk, rho=float(rho), alpha=float(alpha),
            )
        x = sol.x

    rho, alpha = (float(v) for v in x)
    kappa = _kappa(rho, alpha, c, t)
    residual = float(np.linalg.norm(map_residuals(a, c, t, rho, kappa, alpha)))
    if residual > cfg.tol * max(1.0, a, c, t):
        raise NoConvergence(f"conformal map residual {residual:.3e} above tolerance", a=a, c=c, t=t)
    return rho, kappa, alpha, residual


def critical_points_from(rho: float, kappa: float, alpha: float) -> Tuple[float, float]:
    """
    Positive critical points w1 > w2 of f: w^2 solves
    rho s^2 + (2 rho alpha^2 - 2 kappa) s + (rho alpha^4 + 2 kappa alpha^2) = 0.
    """
    b = 2.0 * rho * alpha ** 2 - 2.0 * kappa
    k0 = rho * alpha ** 4 + 2.0 * kappa * alpha ** 2
    disc = b * b - 4.0 * rho * k0
    # two positive roots in s = w^2 need b < 0, k0 > 0 and a positive discriminant
    if disc <= 0 or b >= 0 or k0 <= 0:
        raise PhaseViolation(
            "critical points of the conformal map are not real",
            rho=rho, kappa=kappa, alpha=alpha, discriminant=disc,
        )
    s_big = (-b + math.sqrt(disc)) / (2.0 * rho)
    # Vieta for the small root, no cancellation
    s_small = k0 / (rho * s_big)
    return math.sqrt(s_big), math.sqrt(s_small)


def solve_map(params: ModelParams) -> ConformalData:
    """
    Conformal data for phase-1 parameters.

    Raises:
        InvalidParams / PhaseViolation: params outside phase 1
        NoConvergence: the continuation failed
    """
    require_phase_one(params)
    a, c, t = params.a, params.c, params.t
    rho, kappa, alpha, residual = solve_parameters(a, c, t)
    w1, w2 = critical_points_from(rho, kappa, alpha)
    x1 = float((rho * w1 + 2.0 * kappa * w1 / (w1 ** 2 + alpha ** 2)))
    x2 = float((rho * w2 + 2.0 * kappa * w2 / (w2 ** 2 + alpha ** 2)))
    if not 0 < x1 < x2:
        raise PhaseViolation(f"branch points out of order: x1={x1}, x2={x2}", a=a, c=c, t=t)

    logger.info(
        f"🗺️  conformal map a={a} c={c} t={t}: rho={rho:.12g} kappa={kappa:.12g} "
        f"alpha={alpha:.12g} x1={x1:.10g} x2={x2:.10g} residual={residual:.2e}"
    )
    return ConformalData(params, rho, kappa, alpha, w1, w2, x1, x2, residual)


def critical_points(cd: ConformalData) -> Tuple[float, float, float, float]:
    return cd.w1, cd.w2, cd.x1, cd.x2


def eval_f(cd: ConformalData, w):
    """f(w) = rho w + 2 kappa w/(w^2 + alpha^2); scalars or arrays"""
    w_arr = np.asarray(w, dtype=complex)
    den = w_arr ** 2 + cd.alpha ** 2
    if np.any(np.abs(den) <= POLE_GUARD):
        raise PoleAt("f has poles at ±iα", alpha=cd.alpha)
    value = cd.rho * w_arr + 2.0 * cd.kappa * w_arr / den
    return complex(value) if value.ndim == 0 else value


def eval_df(cd: ConformalData, w):
    w_arr = np.asarray(w, dtype=complex)
    den = w_arr ** 2 + cd.alpha ** 2
    if np.any(np.abs(den) <= POLE_GUARD):
        raise PoleAt("f' has poles at ±iα", alpha=cd.alpha)
    value = cd.rho + 2.0 * cd.kappa * (cd.alpha ** 2 - w_arr ** 2) / den ** 2
    return complex(value) if value.ndim == 0 else value


def S_from_w(cd: ConformalData, w: complex) -> complex:
    """Branch value attached to the preimage w: f(1/w)"""
    if w == 0:
        raise PoleAt("S has a pole at the point w=0 (z=0 on sheet 3)")
    return eval_f(cd, 1.0 / w)


def _cubic(cd: ConformalData, z: complex) -> np.ndarray:
    return np.array([cd.rho, -z, cd.rho * cd.alpha ** 2 + 2.0 * cd.kappa, -z * cd.alpha ** 2], dtype=complex)


def preimages(cd: ConformalData, z: complex) -> np.ndarray:
    """The three roots of rho w^3 - z w^2 + (rho alpha^2 + 2 kappa) w - z alpha^2, Newton polished"""
    coeffs = _cubic(cd, complex(z))
    roots = np.roots(coeffs).astype(complex)
    dcoeffs = np.polyder(coeffs)
    for _ in range(get_settings().solver.polish_steps):
        p = np.polyval(coeffs, roots)
        dp = np.polyval(dcoeffs, roots)
        ok = dp != 0
        candidate = roots.copy()
        candidate[ok] = roots[ok] - p[ok] / dp[ok]
        better = np.abs(np.polyval(coeffs, candidate)) < np.abs(p)
        roots = np.where(better, candidate, roots)
    return roots


def _curve_radii(cd: ConformalData, cos2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Squared radii (Gamma2, Gamma1) of the cut preimages at angles with cos(2 theta) = cos2"""
    rho, kappa, alpha = cd.rho, cd.kappa, cd.alpha
    b = 2.0 * rho * alpha ** 2 * cos2 - 2.0 * kappa
    k0 = rho * alpha ** 4 + 2.0 * kappa * alpha ** 2
    disc = np.maximum(b * b - 4.0 * rho * k0, 0.0)
    # Gamma1 is the outer root, Gamma2 its Vieta partner
    s_out = (-b + np.sqrt(disc)) / (2.0 * rho)
    s_in = k0 / (rho * s_out)
    return s_in, s_out


def sheet_of(cd: ConformalData, w: complex) -> Tuple[int, float]:
    """Sheet label of a preimage and its relative distance to the nearest cut curve"""
    s = abs(w) ** 2
    if s == 0:
        return 3, math.inf
    s_in, s_out = _curve_radii(cd, np.asarray((w * w).real / s))
    s_in, s_out = float(s_in), float(s_out)
    margin = min(abs(s - s_in) / s_in, abs(s - s_out) / s_out)
    if s < s_in:
        return 3, margin
    if s < s_out:
        return 2, margin
    return 1, margin


def cut_preimages(cd: ConformalData, n_samples: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    """Closed curves Gamma2 (inner) and Gamma1 (outer) sampled on a uniform angle grid"""
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    s_in, s_out = _curve_radii(cd, np.cos(2.0 * theta))
    phase = np.exp(1j * theta)
    return np.sqrt(s_in) * phase, np.sqrt(s_out) * phase


def cut_curve_check(cd: ConformalData, n_samples: int = 256, tol: float = 1e-10) -> ValidationReport:
    """
    f is real on Gamma1 and Gamma2; Gamma1 covers [-x1, x1], Gamma2 covers |x| >= x2.

    Gamma2 runs through the poles ±i alpha; samples next to them are skipped.
    """
    report = ValidationReport('cut curves')
    inner, outer = cut_preimages(cd, n_samples)
    inner = inner[np.abs(inner ** 2 + cd.alpha ** 2) > 1e-3 * cd.alpha ** 2]
    z_out, z_in = eval_f(cd, outer), eval_f(cd, inner)

    im_out = float(np.max(np.abs(z_out.imag))) / cd.scale
    im_in = float(np.max(np.abs(z_in.imag) / np.maximum(np.abs(z_in), cd.scale)))
    report.add_check('f real on Gamma1', im_out < tol, im_out, tol)
    report.add_check('f real on Gamma2', im_in < tol, im_in, tol)

    reach = float(np.max(np.abs(z_out.real)))
    report.add_check('Gamma1 image is [-x1, x1]', abs(reach - cd.x1) < 1e-6 * cd.x1, reach, cd.x1)
    floor = float(np.min(np.abs(z_in.real)))
    report.add_check('Gamma2 image avoids (-x2, x2)', floor > cd.x2 * (1.0 - 1e-9), floor, cd.x2)
    return report


def sheet_preimages(cd: ConformalData, z: complex, side: str = PLUS) -> Tuple[complex, complex, complex]:
    """
    Preimages (w_1, w_2, w_3) of z ordered by sheet.

    Off the real axis the three roots are labelled by the region they fall in.
    On the real axis the root structure is explicit: on Delta1 = (-x1, x1) the
    pair on Gamma1 carries sheets 1/2, on Delta2 = |x| > x2 the pair on Gamma2
    carries sheets 3/2; the '+' boundary value of sheet 1 (Delta1) or sheet 3
    (Delta2) is the root in the upper half plane. ``side`` only matters on
    the cuts.

    Raises:
        BranchAmbiguity: labels are not a permutation (root clustering)
    """
    z = complex(z)
    roots = preimages(cd, z)

    if z.imag != 0.0:
        labels = [sheet_of(cd, w)[0] for w in roots]
        if sorted(labels) != [1, 2, 3]:
            gaps = [abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3)]
            raise BranchAmbiguity(
                f"cannot label preimages of z={z}", z=z, labels=str(labels), cluster_diameter=min(gaps),
            )
        ordered = [complex(roots[labels.index(sheet)]) for sheet in (1, 2, 3)]
        return ordered[0], ordered[1], ordered[2]

    x = z.real
    if cd.x1 <= abs(x) <= cd.x2:
        # three real roots, ordered by modulus as sheets 3, 2, 1
        real_roots = sorted((complex(w.real, 0.0) for w in roots), key=abs)
        return real_roots[2], real_roots[1], real_roots[0]

    order = np.argsort(np.abs(roots.imag))
    real_root = complex(roots[order[0]].real, 0.0)
    pair = roots[order[1:]]
    # real coefficients: the pair is conjugate
    upper = complex(pair[0] if pair[0].imag >= pair[1].imag else pair[1])
    lower = upper.conjugate()
    first, second = (upper, lower) if side == PLUS else (lower, upper)
    if abs(x) < cd.x1:
        return first, second, real_root
    return real_root, second, first


def on_cut(cd: ConformalData, z: complex, sheet: int) -> bool:
    """True if real z lies on a cut bordering the sheet"""
    z = complex(z)
    if z.imag != 0.0:
        return False
    x = abs(z.real)
    in_delta1, in_delta2 = x < cd.x1, x > cd.x2
    return {1: in_delta1, 2: in_delta1 or in_delta2, 3: in_delta2}[sheet]


def branch_preimage(cd: ConformalData, z: complex, sheet: int, side: Optional[str] = None) -> complex:
    """
    Preimage w of z on the requested sheet.

    Raises:
        BranchCutHit: z on a cut of the requested sheet and no side given
        BranchAmbiguity: labels are not a permutation (root clustering)
    """
    if on_cut(cd, z, sheet) and side not in (PLUS, MINUS):
        cut = 'Δ1' if abs(complex(z).real) < cd.x1 else 'Δ2'
        raise BranchCutHit(f"z={complex(z).real} lies on {cut}, sheet {sheet} needs a side", z=z, sheet=sheet)
    return sheet_preimages(cd, z, side or PLUS)[sheet - 1]


def eval_F1(cd: ConformalData, z: complex) -> complex:
    """
    Exterior inverse F1 of f.

    Raises:
        BranchCutHit: real z with |z| <= x1
    """
    z = complex(z)
    if z.imag == 0.0 and abs(z.real) <= cd.x1:
        raise BranchCutHit(f"F1 is not defined on [-x1, x1] (z={z.real})", z=z.real, x1=cd.x1)
    return branch_preimage(cd, z, 1)


def eval_dF1(cd: ConformalData, z: complex) -> complex:
    return 1.0 / eval_df(cd, eval_F1(cd, z))


def harmonic_moments_closed(a: float, c: float, k_max: int) -> Tuple[float, ...]:
    """t_k = -c/(ia)^k - c/(-ia)^k: zero for odd k, (-1)^(k/2+1) 2c/a^k for even k"""
    values = []
    for k in range(1, k_max + 1):
        values.append((-c / (1j * a) ** k - c / (-1j * a) ** k).real)
    return tuple(values)


def schwarz_poles(cd: ConformalData) -> Tuple[Tuple[complex, complex], ...]:
    """
    Exterior poles of S1 with their residues, as (z0, residue) pairs.

    S1(z) = f(1/F1(z)) is singular where 1/w = ±i alpha, i.e. w0 = ∓i/alpha.
    Near w0, f(1/w) ~ (kappa/alpha^2)/(w - w0), and w - w0 ~ (z - z0)/f'(w0),
    so the residue in z is kappa f'(w0)/alpha^2 at z0 = f(w0).
    """
    poles = []
    for w0 in (1j / cd.alpha, -1j / cd.alpha):
        z0 = eval_f(cd, w0)
        residue = cd.kappa * eval_df(cd, w0) / cd.alpha ** 2
        poles.append((complex(z0), complex(residue)))
    return tuple(poles)


def harmonic_moments_from_residues(cd: ConformalData, k_max: int) -> Tuple[float, ...]:
    """
    t_k = -sum of Res S1(z) z^-k over the exterior poles.

    S1 z^-k decays like z^-(k+1) at infinity, so no residue there for k >= 1.
    """
    poles = schwarz_poles(cd)
    values = []
    for k in range(1, k_max + 1):
        total = sum(residue * z0 ** (-k) for z0, residue in poles)
        values.append(float((-total).real))
    return tuple(values)


def quadrature_moments(z: np.ndarray, dz: np.ndarray, k_max: int) -> Tuple[float, ...]:
    """Trapezoid rule for (1/2 pi i) times the integral of conj(z) z^-k dz on the boundary"""
    step = 2.0 * np.pi / len(z)
    values = []
    for k in range(1, k_max + 1):
        integral = np.sum(np.conj(z) * z ** (-k) * dz) * step
        values.append(float((integral / (2j * np.pi)).real))
    return tuple(values)


def droplet_boundary(cd: ConformalData, n_samples: int = 256, k_max: int = 8) -> DropletBoundary:
    """
    Boundary samples f(e^{i theta}) with area and harmonic moments.

    Area is (1/2) Im of the contour integral of conj(z) dz on the uniform theta
    grid. The moments come from the residues of S1 at its two exterior poles;
    the boundary quadrature is kept alongside as a cross-check. It loses
    accuracy for large k when f has a zero close to the unit circle.
    """
    if n_samples < 64:
        raise ValueError(f"n_samples must be at least 64 (got {n_samples})")
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    w = np.exp(1j * theta)
    z = eval_f(cd, w)
    dz = eval_df(cd, w) * 1j * w  # dz/dtheta

    area = float(0.5 * np.sum(np.imag(np.conj(z) * dz)) * (2.0 * np.pi / n_samples))

    logger.debug(f"droplet area {area:.15g} vs pi t = {math.pi * cd.params.t:.15g}")
    return DropletBoundary(
        theta=theta,
        samples=z,
        area=area,
        harmonic_moments=harmonic_moments_from_residues(cd, k_max),
        closed_form_moments=harmonic_moments_closed(cd.params.a, cd.params.c, k_max),
        quadrature_moments=quadrature_moments(z, dz, k_max),
    )


def schwarz_check(cd: ConformalData, n_samples: int = 256) -> float:
    """max |S1(z) - conj(z)| over boundary samples, S1 from the sheet-1 root"""
    boundary = droplet_boundary(cd, n_samples)
    errors = [
        abs(S_from_w(cd, branch_preimage(cd, z, 1)) - np.conj(z))
        for z in boundary.samples
    ]
    return float(max(errors))


def scaling_check(params: ModelParams, lam: float, tol: float = 1e-9) -> ValidationReport:
    """Covariance under (a, c, t) -> (lam a, lam^2 c, lam^2 t)"""
    report = ValidationReport(f'scaling[{lam}]')
    base = solve_map(params)
    scaled = solve_map(params.scaled(lam))
    pairs = {
        'rho': (scaled.rho, lam * base.rho),
        'kappa': (scaled.kappa, lam * base.kappa),
        'alpha': (scaled.alpha, base.alpha),
        'x1': (scaled.x1, lam * base.x1),
        'x2': (scaled.x2, lam * base.x2),
    }
    for name, (got, expected) in pairs.items():
        err = abs(got - expected) / abs(expected)
        report.add_check(f'{name} scales', err < tol, err, tol)
    return report


@dataclass(frozen=True)
class MergeEstimate:
    t_merge: float          # last t with real critical points (bisection)
    t_extrapolated: float   # zero of (x2 - x1)^(2/3) extrapolated linearly
    gaps: Tuple[Tuple[float, float], ...]


def _phase_one_at(a: float, c: float, t: float) -> Optional[Tuple[float, float]]:
    """(x1, x2) if the map at t has real critical points, else None"""
    try:
        rho, kappa, alpha, _ = solve_parameters(a, c, t)
        w1, w2 = critical_points_from(rho, kappa, alpha)
    except (NoConvergence, PhaseViolation):
        return None
    f1 = rho * w1 + 2.0 * kappa * w1 / (w1 ** 2 + alpha ** 2)
    f2 = rho * w2 + 2.0 * kappa * w2 / (w2 ** 2 + alpha ** 2)
    return f1, f2


def gap_merging_t_star(a: float, c: float, iterations: int = 60) -> MergeEstimate:
    """
    Locate t* from the merging of x1(t) and x2(t).

    Bisection on whether the critical points are real, then a linear
    extrapolation of (x2 - x1)^(2/3), which vanishes linearly at t*.
    """
    t_c = compute_t_c(a, c)
    lo, hi = 1e-6 * t_c, t_c
    if _phase_one_at(a, c, lo) is None:
        raise NoConvergence("no phase-1 solution at the lower bracket", a=a, c=c)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if _phase_one_at(a, c, mid) is None:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break

    gaps: List[Tuple[float, float]] = []
    for k in (2, 3):
        tk = lo * (1.0 - 10.0 ** (-k))
        x1, x2 = _phase_one_at(a, c, tk)
        gaps.append((tk, x2 - x1))
    (ta, ga), (tb, gb) = [(tk, g ** (2.0 / 3.0)) for tk, g in gaps]
    t_extra = ta + (tb - ta) * ga / (ga - gb)
    logger.info(f"🔎 gap merging: bisection t*={lo:.12g}, extrapolated t*={t_extra:.12g}")
    return MergeEstimate(lo, t_extra, tuple(gaps))
