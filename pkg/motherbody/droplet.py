"""
Logarithmic potential of the normalized area measure (1/pi) dA on the droplet.

Two routes:
  * boundary reduction: log r = Laplacian of (r^2/4)(log r - 1), so the area
    integral becomes a trapezoid sum over the parametrized boundary
  * midpoint cells inside the boundary polygon, capped by a cell budget
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .conformal import ConformalData, eval_df, eval_f
from .config import get_settings
from .errors import QuadratureBudgetExceeded
from .measures import Measures, potentials_complex
from .report import ValidationReport

logger = logging.getLogger(__name__)

MIN_CELLS = 1_000_000


def area_potential(cd: ConformalData, s: complex, n_samples: int = 2048) -> float:
    """U(s) = -(1/pi) int_Omega log|z - s| dA(z) through the boundary flux of (2 log r - 1)(z - s)/4"""
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    w = np.exp(1j * theta)
    z = eval_f(cd, w)
    dz = eval_df(cd, w) * 1j * w
    diff = z - complex(s)
    r = np.abs(diff)
    with np.errstate(divide='ignore', invalid='ignore'):
        kernel = np.where(r > 0, (2.0 * np.log(r) - 1.0) / 4.0, 0.0)
    flux = kernel * np.real(diff * np.conj(-1j * dz))
    integral = float(np.sum(flux) * (2.0 * np.pi / n_samples))
    return -integral / math.pi


def points_inside(polygon: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Even-odd test of complex points against a closed polygon"""
    xs, ys = polygon.real, polygon.imag
    xe, ye = np.roll(xs, -1), np.roll(ys, -1)
    inside = np.zeros(len(points), dtype=bool)
    for k, p in enumerate(points):
        straddle = (ys <= p.imag) != (ye <= p.imag)
        with np.errstate(divide='ignore', invalid='ignore'):
            x_cross = xs + (p.imag - ys) * (xe - xs) / (ye - ys)
        inside[k] = np.count_nonzero(straddle & (x_cross > p.real)) % 2 == 1
    return inside


@dataclass(frozen=True)
class AreaCells:
    centers: np.ndarray
    cell_area: float

    @property
    def area(self) -> float:
        return self.cell_area * len(self.centers)


def area_cells(
    cd: ConformalData,
    resolution: Optional[int] = None,
    budget: Optional[int] = None,
    n_samples: int = 4096,
    min_cells: int = MIN_CELLS,
) -> AreaCells:
    """
    Midpoint cells of a square grid; a cell counts if its center is inside.

    ``resolution`` fixes the number of cells along the wider side of the
    droplet bounding box. Without it the spacing is chosen so that about
    ``min_cells`` cells fall inside the droplet.

    Raises:
        QuadratureBudgetExceeded: the bounding-box grid needs more cells than the budget
    """
    budget = budget or get_settings().quadrature.cell_budget
    polygon = eval_f(cd, np.exp(2j * np.pi * np.arange(n_samples) / n_samples))
    half_w, half_h = float(np.abs(polygon.real).max()), float(np.abs(polygon.imag).max())
    if resolution:
        h = 2.0 * max(half_w, half_h) / resolution
    else:
        h = math.sqrt(math.pi * cd.params.t / (1.01 * min_cells))
    nx, ny = int(math.ceil(2.0 * half_w / h)), int(math.ceil(2.0 * half_h / h))
    if nx * ny > budget:
        raise QuadratureBudgetExceeded(
            f"{nx * ny} cells requested, budget {budget}", cells=nx * ny, budget=budget,
        )

    xc = -half_w + (np.arange(nx) + 0.5) * h
    xs, ys = polygon.real, polygon.imag
    xe, ye = np.roll(xs, -1), np.roll(ys, -1)
    rows: List[np.ndarray] = []
    for j in range(ny):
        y = -half_h + (j + 0.5) * h
        straddle = (ys <= y) != (ye <= y)
        # even-odd rule along the row
        crossings = np.sort(xs[straddle] + (y - ys[straddle]) * (xe[straddle] - xs[straddle]) / (ye[straddle] - ys[straddle]))
        inside = np.searchsorted(crossings, xc) % 2 == 1
        rows.append(xc[inside] + 1j * y)
    centers = np.concatenate(rows) if rows else np.empty(0, dtype=complex)
    logger.debug(f"area cells: {len(centers)} of {nx * ny}, h={h:.3e}")
    return AreaCells(centers=centers, cell_area=h * h)


def area_potential_cells(cells: AreaCells, s: complex) -> float:
    return float(-cells.cell_area / math.pi * np.sum(np.log(np.abs(cells.centers - complex(s)))))


def _test_points(cd: ConformalData, n_points: int):
    theta = 2.0 * np.pi * (np.arange(n_points) + 0.25) / n_points
    exterior = eval_f(cd, 1.35 * np.exp(1j * theta))
    boundary = eval_f(cd, np.exp(1j * theta))
    candidates = np.concatenate([lam * boundary for lam in (0.25, 0.5, 0.75)])
    polygon = eval_f(cd, np.exp(2j * np.pi * np.arange(4096) / 4096))
    interior = candidates[points_inside(polygon, candidates)][:n_points]
    return exterior, interior


def interior_combination(cd: ConformalData, z: complex) -> float:
    """2 U_area(z) + |z|^2 - 2c log|z^2 + a^2|"""
    a, c = cd.params.a, cd.params.c
    z = complex(z)
    return 2.0 * area_potential(cd, z) + abs(z) ** 2 - 2.0 * c * math.log(abs(z * z + a * a))


def droplet_potential_check(
    cd: ConformalData,
    ms: Measures,
    n_points: int = 20,
    resolution: Optional[int] = None,
    budget: Optional[int] = None,
) -> ValidationReport:
    """
    Area potential equals t U_mu1 outside the droplet; the combination
    2 U_area + |z|^2 - 2c log|z^2 + a^2| is constant inside and not smaller
    outside.

    Raises:
        QuadratureBudgetExceeded
    """
    t = cd.params.t
    report = ValidationReport('droplet potential')
    exterior, interior = _test_points(cd, n_points)

    far = 3.0 * cd.x2
    err_far = abs(area_potential(cd, far) - t * potentials_complex(ms, far)[0])
    report.add_check('far field', err_far < 1e-6, err_far, 1e-6)

    errors = [abs(area_potential(cd, z) - t * potentials_complex(ms, z)[0]) for z in exterior]
    report.add_check('exterior identity', max(errors) < 1e-5, max(errors), 1e-5)

    inner = np.array([interior_combination(cd, z) for z in interior])
    level = float(inner.mean())
    report.add_check('interior constancy', inner.std() < 1e-4, float(inner.std()), 1e-4, points=len(inner))
    outer = np.array([interior_combination(cd, z) for z in exterior])
    report.add_check('exterior not below', float(outer.min()) >= level - 1e-8, float(outer.min() - level), 0.0)

    cells = area_cells(cd, resolution, budget)
    area_err = abs(cells.area - math.pi * t) / (math.pi * t)
    area_tol = 1e-3 if resolution is None else 1e-2
    report.add_check('cell area', area_err < area_tol, area_err, area_tol)
    oracle = [abs(area_potential_cells(cells, z) - area_potential(cd, z)) for z in exterior]
    # coarse explicit resolutions only get the loose bound
    oracle_tol = 1e-4 if resolution is None else 1e-3
    report.add_check('cell oracle agrees', max(oracle) < oracle_tol, max(oracle), oracle_tol, cells=len(cells.centers))
    return report
