"""
Exact planar orthogonal polynomials for the weight

    w(z) = |z^2 + a^2|^(2M) exp(-N |z|^2),    M = cN a nonnegative integer.

Two independent constructions of the monic P = P_{n,N}:

  kernel route   (d^2/dz^2 + a^2 N^2)^M [P (z^2 + a^2)^M] has no terms below z^n
  moment route   Gram system of the weighted inner products of monomials

Both are solved in exact integer arithmetic (fraction-free Bareiss), so the
two coefficient vectors are compared for equality, not closeness. Zeros and
high-precision evaluations go through mpmath.
"""

import math
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from mpmath.libmp.libhyper import NoConvergence as MpNoConvergence

from .config import get_settings
from .conformal import ConformalData
from .errors import InvalidParams, NonIntegralCharge, PrecisionExhausted, SingularSystem
from .measures import mu1_cdf
from .report import ValidationReport

logger = logging.getLogger(__name__)

KERNEL = 'kernel'
MOMENT = 'moment'
ROUTES = (KERNEL, MOMENT)

DENOMINATOR_LIMIT = 10 ** 9
ZERO_RETRIES = 3
NEWTON_STEPS = 60


@dataclass(frozen=True)
class OracleParams:
    n: int
    N: int
    a2: Fraction
    c: Fraction

    def __post_init__(self):
        if self.n < 0:
            raise InvalidParams(f"degree must be nonnegative, got n={self.n}", n=self.n)
        if self.N < 1:
            raise InvalidParams(f"N must be positive, got N={self.N}", N=self.N)
        if self.a2 <= 0:
            raise InvalidParams(f"a^2 must be positive, got {self.a2}", a2=str(self.a2))
        if self.c < 0:
            raise InvalidParams(f"c must be nonnegative, got {self.c}", c=str(self.c))
        charge = self.c * self.N
        if charge.denominator != 1:
            raise NonIntegralCharge(f"cN = {charge} is not an integer", c=str(self.c), N=self.N)

    @property
    def M(self) -> int:
        return int(self.c * self.N)

    @property
    def t(self) -> float:
        return self.n / self.N

    @property
    def a(self) -> float:
        return math.sqrt(self.a2)

    @classmethod
    def from_floats(cls, n: int, N: int, a: float, c: float) -> 'OracleParams':
        """a^2 and c as the nearest rationals with denominators up to 10^9"""
        a2 = Fraction(a * a).limit_denominator(DENOMINATOR_LIMIT)
        return cls(n=int(n), N=int(N), a2=a2, c=Fraction(c).limit_denominator(DENOMINATOR_LIMIT))


@dataclass(frozen=True)
class ExactPolynomial:
    """Monic P_{n,N}; coeffs ascending, norm h_{n,N} / pi when known"""
    n: int
    N: int
    a2: Fraction
    c: Fraction
    coeffs: Tuple[Fraction, ...]
    route: str
    norm_h_over_pi: Optional[Fraction] = None
    zeros: Tuple[complex, ...] = field(default=())

    @property
    def M(self) -> int:
        return int(self.c * self.N)

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'N': self.N,
            'a': math.sqrt(self.a2),
            'a2': str(self.a2),
            'c': str(self.c),
            'route': self.route,
            'coeffs': [str(p) for p in self.coeffs],
            'norm_h_over_pi': None if self.norm_h_over_pi is None else str(self.norm_h_over_pi),
            'zeros': [[z.real, z.imag] for z in self.zeros],
        }


# Exact linear algebra

def bareiss_solve(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> Tuple[List[Fraction], List[int]]:
    """
    Fraction-free Gaussian elimination on an integer system.

    Returns the exact solution and the elimination pivots; without row swaps
    the k-th pivot is the k-th leading principal minor.

    Raises:
        SingularSystem: no nonzero pivot in some column, or a nonzero residual
    """
    n = len(matrix)
    if n == 0:
        return [], []
    m = [list(row) + [b] for row, b in zip(matrix, rhs)]
    prev = 1
    pivots: List[int] = []
    for k in range(n):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    logger.debug(f"bareiss: swapped rows {k} and {i}")
                    break
            else:
                raise SingularSystem(f"no pivot in column {k} of a {n}x{n} system", column=k, size=n)
        pivot = m[k][k]
        for i in range(k + 1, n):
            lead = m[i][k]
            row_i, row_k = m[i], m[k]
            # exact: the previous pivot divides every 2x2 minor
            for j in range(k + 1, n + 1):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
        pivots.append(pivot)

    x: List[Fraction] = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(m[i][n])
        for j in range(i + 1, n):
            if m[i][j]:
                acc -= m[i][j] * x[j]
        x[i] = acc / m[i][i]

    for i, (row, b) in enumerate(zip(matrix, rhs)):
        if sum(a_ij * x_j for a_ij, x_j in zip(row, x)) != b:
            raise SingularSystem(f"nonzero residual in row {i} after elimination", row=i, size=n)
    return x, pivots


def _parity_indices(n: int) -> List[int]:
    """Indices below n with the parity of n; the others vanish by z -> -z symmetry"""
    return list(range(n % 2, n, 2))


def _beta(op: OracleParams) -> List[Fraction]:
    """(z^2 + a^2)^M = sum_r beta_r z^(2r)"""
    M = op.M
    return [math.comb(M, r) * op.a2 ** (M - r) for r in range(M + 1)]


def _assemble(indices: List[int], unknown: Sequence[Fraction], n: int) -> Tuple[Fraction, ...]:
    coeffs = [Fraction(0)] * (n + 1)
    for j, value in zip(indices, unknown):
        coeffs[j] = value
    coeffs[n] = Fraction(1)
    return tuple(coeffs)


# Kernel route

def _kernel_coefficient(op: OracleParams, k: int, j: int) -> int:
    """
    Coefficient of p_j in the z^k coefficient of
    sum_m C(M,m) (a^2 N^2)^(M-m) d^(2m)/dz^(2m) [P (z^2 + a^2)^M], scaled by q^(2M)
    where a^2 = p/q.
    """
    M, N = op.M, op.N
    p, q = op.a2.numerator, op.a2.denominator
    total = 0
    for m in range(M + 1):
        two_r = k + 2 * m - j
        if two_r < 0 or two_r % 2:
            continue
        r = two_r // 2
        if r > M:
            continue
        total += (
            math.comb(M, m) * N ** (2 * (M - m)) * math.perm(k + 2 * m, 2 * m)
            * math.comb(M, r) * p ** (2 * M - m - r) * q ** (m + r)
        )
    return total


def solve_kernel_route(op: OracleParams) -> ExactPolynomial:
    """
    Raises:
        SingularSystem
    """
    n = op.n
    indices = _parity_indices(n)
    matrix = [[_kernel_coefficient(op, k, j) for j in indices] for k in indices]
    rhs = [-_kernel_coefficient(op, k, n) for k in indices]
    unknown, _ = bareiss_solve(matrix, rhs)
    poly = ExactPolynomial(n=n, N=op.N, a2=op.a2, c=op.c, coeffs=_assemble(indices, unknown, n), route=KERNEL)
    logger.info(f"🧮 kernel route: n={n}, N={op.N}, M={op.M}, {len(indices)} unknowns")
    return poly


# Moment route

def gram_entry(op: OracleParams, k: int, j: int, beta: Optional[List[Fraction]] = None) -> Fraction:
    """
    <z^j, z^k> / pi for the weight, through the Ginibre moments
    int z^p conj(z)^q e^(-N|z|^2) dA = delta_pq pi p! / N^(p+1).
    """
    beta = beta if beta is not None else _beta(op)
    M, N = op.M, op.N
    total = Fraction(0)
    for m in range(M + 1):
        two_r = k + 2 * m - j
        if two_r < 0 or two_r % 2:
            continue
        r = two_r // 2
        if r > M:
            continue
        p = k + 2 * m
        total += beta[m] * beta[r] * Fraction(math.factorial(p), N ** (p + 1))
    return total


def gram_entry_scaled(op: OracleParams, k: int, j: int) -> int:
    """
    q^(2M) N^(k+2M+1) <z^j, z^k> / pi with a^2 = p/q, an integer.

    Row k of the Gram system scaled by a positive factor; leading minors keep
    their sign and no rational arithmetic is needed.
    """
    M, N = op.M, op.N
    p, q = op.a2.numerator, op.a2.denominator
    total = 0
    for m in range(M + 1):
        two_r = k + 2 * m - j
        if two_r < 0 or two_r % 2:
            continue
        r = two_r // 2
        if r > M:
            continue
        total += (
            math.comb(M, m) * math.comb(M, r) * p ** (2 * M - m - r) * q ** (m + r)
            * math.factorial(k + 2 * m) * N ** (2 * (M - m))
        )
    return total


def solve_moment_route(op: OracleParams) -> ExactPolynomial:
    """
    Orthogonality against conj(z)^k, k < n, plus the norm
    h_{n,N} / pi = sum_j p_j <z^j, z^n> / pi.

    Raises:
        SingularSystem: including a non-positive leading Gram minor
    """
    n = op.n
    indices = _parity_indices(n)
    matrix = [[gram_entry_scaled(op, k, j) for j in indices] for k in indices]
    rhs = [-gram_entry_scaled(op, k, n) for k in indices]
    unknown, pivots = bareiss_solve(matrix, rhs)
    # Gram matrix of a positive weight: leading minors are positive
    for k, pivot in enumerate(pivots):
        if pivot <= 0:
            raise SingularSystem(f"leading Gram minor {k} is not positive", minor=k)

    coeffs = _assemble(indices, unknown, n)
    row_scale = op.a2.denominator ** (2 * op.M) * op.N ** (n + 2 * op.M + 1)
    norm = sum(
        (coeffs[j] * gram_entry_scaled(op, n, j) for j in range(n % 2, n + 1, 2)),
        Fraction(0),
    ) / row_scale
    if norm <= 0:
        raise SingularSystem(f"norm h/pi = {norm} is not positive", n=n)
    logger.info(f"🧮 moment route: n={n}, N={op.N}, M={op.M}, h/pi ~ {float(norm):.6e}")
    return ExactPolynomial(n=n, N=op.N, a2=op.a2, c=op.c, coeffs=coeffs, route=MOMENT, norm_h_over_pi=norm)


def solve(op: OracleParams, route: str = MOMENT, with_zeros: bool = True) -> ExactPolynomial:
    if route not in ROUTES:
        raise InvalidParams(f"unknown route {route!r}", route=route)
    poly = solve_kernel_route(op) if route == KERNEL else solve_moment_route(op)
    if with_zeros:
        poly = replace(poly, zeros=zeros(poly))
    return poly


def cross_check(op: OracleParams) -> ValidationReport:
    """Both routes, exact equality of coefficients, parity and norm sign"""
    report = ValidationReport(f'oracle n={op.n} N={op.N}')
    kernel = solve_kernel_route(op)
    moment = solve_moment_route(op)
    mismatched = [j for j, (p, q) in enumerate(zip(kernel.coeffs, moment.coeffs)) if p != q]
    report.add_check('routes identical', not mismatched, float(len(mismatched)), 0.0)
    parity = all(p == 0 for j, p in enumerate(moment.coeffs) if (op.n - j) % 2)
    report.add_check('parity', parity)
    report.add_check('norm positive', moment.norm_h_over_pi is not None and moment.norm_h_over_pi > 0)
    return report


# Zeros and evaluation

def working_dps(n: int) -> int:
    return 30 + get_settings().runtime.extra_dps + 2 * n


def _mp_coeffs(poly: ExactPolynomial) -> List:
    """Descending mpf coefficients; call inside a workdps block"""
    return [mpmath.mpf(p.numerator) / p.denominator for p in reversed(poly.coeffs)]


def _root_residual(coeffs: List, root) -> float:
    value, deriv = mpmath.polyval(coeffs, root, derivative=True)
    if value == 0:
        return 0.0
    if deriv == 0:
        return math.inf
    return float(abs(value) / (abs(deriv) * max(abs(root), 1)))


def _seeded_roots(reduced: Sequence[Fraction], dps: int) -> Optional[List]:
    """
    Roots in u from double precision seeds, Newton polished at the working
    precision. None when a seed fails to converge or two roots coincide;
    the caller then falls back to polyroots.
    """
    seeds = np.roots([float(p) for p in reversed(reduced)])
    # zeros sit on a short real segment, double precision separates them for moderate n
    if len(seeds) != len(reduced) - 1 or not np.all(np.isfinite(seeds)):
        return None
    coeffs = [mpmath.mpf(p.numerator) / p.denominator for p in reversed(reduced)]
    tol = mpmath.mpf(10) ** (-(dps - 5))
    polished = []
    for seed in seeds:
        u = mpmath.mpc(complex(seed))
        for _ in range(NEWTON_STEPS):
            value, deriv = mpmath.polyval(coeffs, u, derivative=True)
            if deriv == 0:
                return None
            step = value / deriv
            u -= step
            if abs(step) <= tol * max(1, abs(u)):
                break
        else:
            return None
        polished.append(u)

    scale = max([abs(u) for u in polished] + [mpmath.mpf(1)])
    separation = mpmath.mpf(10) ** (-(dps // 4)) * scale
    for i in range(len(polished)):
        for j in range(i + 1, len(polished)):
            if abs(polished[i] - polished[j]) < separation:
                return None
    return polished


def zeros(poly: ExactPolynomial, dps: Optional[int] = None) -> Tuple[complex, ...]:
    """
    All n zeros. P(z) = z^(n mod 2) R(z^2); roots of R in u = z^2 are
    Newton-polished from double precision seeds, with mpmath.polyroots as
    the fallback, and paired as +-sqrt(u). Each zero is then checked against
    P with a relative Newton-step residual.

    Raises:
        PrecisionExhausted: polyroots fails or residuals stay large after doubling precision
    """
    n = poly.n
    if n == 0:
        return ()
    dps = dps or working_dps(n)
    odd = n % 2
    reduced = poly.coeffs[odd::2]   # ascending in u
    seeded = True
    for attempt in range(ZERO_RETRIES + 1):
        with mpmath.workdps(dps):
            tol = mpmath.mpf(10) ** (-(dps // 2))
            full = _mp_coeffs(poly)
            roots: List = [mpmath.mpc(0)] if odd else []
            u_roots = _seeded_roots(reduced, dps) if seeded and len(reduced) > 1 else None
            try:
                if u_roots is None and len(reduced) > 1:
                    u_coeffs = [mpmath.mpf(p.numerator) / p.denominator for p in reversed(reduced)]
                    u_roots = mpmath.polyroots(u_coeffs, maxsteps=200 + 10 * n, extraprec=dps)
            except MpNoConvergence:
                logger.warning(f"⚠️ polyroots did not converge for n={n} at dps={dps}")
                dps *= 2
                continue
            for u in u_roots or ():
                s = mpmath.sqrt(u)
                roots.extend([s, -s])
            worst = max((_root_residual(full, r) for r in roots), default=0.0)
            if worst < tol:
                found = sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))
                logger.debug(f"zeros n={n}: dps={dps}, worst residual {worst:.2e}")
                return tuple(found)
            logger.warning(f"⚠️ zero residual {worst:.2e} for n={n} at dps={dps}, retrying")
            seeded = False
            dps *= 2
    raise PrecisionExhausted(f"zeros of P_{n} not resolved after {ZERO_RETRIES} precision doublings", n=n, dps=dps)


def log_eval(poly: ExactPolynomial, z: complex, dps: Optional[int] = None) -> complex:
    """Principal log P(z) evaluated in high precision"""
    dps = dps or working_dps(poly.n)
    with mpmath.workdps(dps):
        value = mpmath.polyval(_mp_coeffs(poly), mpmath.mpc(z))
        if value == 0:
            raise PrecisionExhausted(f"P vanishes at z={z} to {dps} digits", z=z, dps=dps)
        return complex(mpmath.log(value))


# Zero counting measure

@dataclass(frozen=True)
class ZeroStatistics:
    n: int
    ks: float
    delta: float
    max_imag: float
    mean: complex
    nodes: Tuple[float, ...]
    cdf: Tuple[float, ...]


def support_distance(zs: Sequence[complex], x1: float) -> np.ndarray:
    z = np.asarray(zs, dtype=complex)
    return np.abs(z - np.clip(z.real, -x1, x1))


def zero_counting_measure(zs: Sequence[complex], cd: ConformalData) -> ZeroStatistics:
    """
    Empirical CDF of the real parts and its Kolmogorov distance to mu1;
    delta is the largest distance of a zero to [-x1, x1].
    """
    n = len(zs)
    if n == 0:
        return ZeroStatistics(0, 0.0, 0.0, 0.0, 0j, (), ())
    xs = np.sort(np.array([z.real for z in zs]))
    F = mu1_cdf(cd, xs)
    i = np.arange(1, n + 1)
    ks = float(np.max(np.maximum(F - (i - 1) / n, i / n - F)))
    return ZeroStatistics(
        n=n,
        ks=ks,
        delta=float(support_distance(zs, cd.x1).max()),
        max_imag=float(max(abs(z.imag) for z in zs)),
        mean=complex(sum(zs) / n),
        nodes=tuple(float(x) for x in xs),
        cdf=tuple(float(f) for f in F),
    )
