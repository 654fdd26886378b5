import math

import numpy as np
import pytest

from motherbody.droplet import (
    area_cells,
    area_potential,
    droplet_potential_check,
    interior_combination,
    points_inside,
)
from motherbody.conformal import eval_f
from motherbody.errors import QuadratureBudgetExceeded
from motherbody.measures import potentials


def test_points_inside_square():
    square = np.array([0, 1, 1 + 1j, 1j], dtype=complex)
    inside = points_inside(square, np.array([0.5 + 0.5j, 2.0 + 0.5j, 0.5 - 0.1j]))
    assert inside.tolist() == [True, False, False]


def test_cell_budget(cd):
    with pytest.raises(QuadratureBudgetExceeded):
        area_cells(cd, resolution=1000, budget=10)


def test_cell_area(cd):
    cells = area_cells(cd, resolution=400)
    assert cells.area == pytest.approx(math.pi * cd.params.t, rel=2e-2)


def test_area_potential_far_field(cd, ms):
    # outside the droplet the area measure has the potential of t mu1
    x = 3.0 * cd.x2
    assert area_potential(cd, x) == pytest.approx(cd.params.t * potentials(ms, x)[0], abs=1e-6)


def test_interior_combination_is_flat(cd):
    boundary = eval_f(cd, np.exp(2j * np.pi * np.arange(8) / 8))
    values = [interior_combination(cd, z) for z in 0.4 * boundary]
    assert np.std(values) < 1e-4


def test_default_grid_reaches_a_million_cells(cd):
    cells = area_cells(cd)
    assert len(cells.centers) >= 1_000_000
    assert cells.area == pytest.approx(math.pi * cd.params.t, rel=1e-3)


@pytest.mark.slow
def test_droplet_potential(cd, ms):
    report = droplet_potential_check(cd, ms)
    assert report.is_valid(), report.errors
    assert report.check('cell oracle agrees').threshold == 1e-4
