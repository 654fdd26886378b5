"""
Quadrature rules used across the package.

All rules return ``(nodes, weights)`` arrays such that ``sum(weights * g(nodes))``
approximates the integral of ``g``. Segment rules accept complex endpoints
and then integrate along the straight segment.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_legendre

Rule = Tuple[np.ndarray, np.ndarray]


@lru_cache(maxsize=64)
def _legendre01(n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


def gauss_legendre(n: int, p: complex, q: complex) -> Rule:
    """Gauss-Legendre rule on the segment [p, q]"""
    u, w = _legendre01(n)
    return p + (q - p) * u, (q - p) * w


def chebyshev_sqrt_rule(n: int, half_width: float) -> Rule:
    """
    Rule for densities on [-L, L] vanishing like a square root at both ends.

    Nodes x_k = L cos(k pi/(n+1)), k = 1..n. With x = L cos(theta) the integrand
    becomes a smooth periodic function of theta and the trapezoid rule is
    spectrally accurate.
    """
    theta = np.arange(1, n + 1) * np.pi / (n + 1)
    nodes = half_width * np.cos(theta)
    weights = half_width * np.sin(theta) * np.pi / (n + 1)
    return nodes[::-1].copy(), weights[::-1].copy()


def cosine_rule(n: int, p: complex, q: complex) -> Rule:
    """
    Rule on [p, q] for integrands with square-root behaviour at both ends.

    s = (p+q)/2 - (q-p)/2 cos(phi), Gauss-Legendre in phi on [0, pi].
    """
    phi, w = _legendre01(n)
    phi = np.pi * phi
    w = np.pi * w
    nodes = (p + q) / 2.0 - (q - p) / 2.0 * np.cos(phi)
    weights = (q - p) / 2.0 * np.sin(phi) * w
    return nodes, weights


def sqrt_start_rule(n: int, p: complex, q: complex) -> Rule:
    """Rule on [p, q] for integrands with square-root behaviour at p only"""
    tau, w = _legendre01(n)
    nodes = p + (q - p) * tau ** 2
    weights = 2.0 * (q - p) * tau * w
    return nodes, weights


def tail_rule(n: int, start: complex) -> Rule:
    """
    Rule for the integral from ``start`` to infinity along the ray through it.

    s = start/u, u in (0, 1]; suited to integrands decaying at least like s^-2.
    """
    u, w = _legendre01(n)
    return start / u, start / u ** 2 * w


def geometric_panels(n: int, p: float, q: float, first: float, ratio: float = 4.0) -> Rule:
    """
    Composite rule on [p, q] with panels growing geometrically away from p.

    The first panel [p, p+first] uses ``sqrt_start_rule``; the others are
    Gauss-Legendre. Used for slowly decaying tails with a square-root onset.
    """
    nodes, weights = [], []
    left, width = p, first
    rule = sqrt_start_rule
    while left < q:
        right = min(q, left + width)
        x, w = rule(n, left, right)
        nodes.append(x)
        weights.append(w)
        rule = gauss_legendre
        left, width = right, width * ratio
    return np.concatenate(nodes), np.concatenate(weights)
