import cmath
import math

import numpy as np
import pytest

from motherbody import conformal
from motherbody.conformal import (
    PLUS,
    MINUS,
    branch_preimage,
    cut_curve_check,
    cut_preimages,
    droplet_boundary,
    eval_dF1,
    eval_df,
    eval_F1,
    eval_f,
    harmonic_moments_closed,
    map_residuals,
    schwarz_check,
    scaling_check,
    schwarz_poles,
    sheet_preimages,
    solve_map,
)
from motherbody.errors import BranchCutHit, PhaseViolation
from motherbody.model import ModelParams, compute_t_star

from conftest import PHASE_ONE_POINTS


@pytest.mark.parametrize('a, c, t', PHASE_ONE_POINTS)
def test_map_residuals(a, c, t):
    cd = solve_map(ModelParams(a, c, t))
    r = map_residuals(a, c, t, cd.rho, cd.kappa, cd.alpha)
    assert np.linalg.norm(r) < 1e-12
    assert 0 < cd.x1 < cd.x2
    assert cd.w1 > cd.w2 > 0
    assert 0 < cd.alpha < 1


@pytest.mark.parametrize('a, c, t', PHASE_ONE_POINTS)
def test_droplet_identities(a, c, t):
    cd = solve_map(ModelParams(a, c, t))
    boundary = droplet_boundary(cd, 256)
    assert boundary.area == pytest.approx(math.pi * t, abs=1e-8)
    for got, want in zip(boundary.harmonic_moments, boundary.closed_form_moments):
        assert abs(got - want) < 1e-10
    assert schwarz_check(cd, 256) < 1e-8


def test_moments_near_singular_boundary():
    # f has a zero just inside the unit circle here, high moments by quadrature drift
    cd = solve_map(ModelParams(math.sqrt(2.0), 1.0, 0.05))
    boundary = droplet_boundary(cd, 256, k_max=12)
    for got, want in zip(boundary.harmonic_moments, boundary.closed_form_moments):
        assert abs(got - want) < 1e-10 * max(1.0, abs(want))
    assert boundary.quadrature_moments[0] == pytest.approx(0.0, abs=1e-10)


def test_schwarz_poles(cd):
    poles = schwarz_poles(cd)
    a, c = cd.params.a, cd.params.c
    assert sorted(round(z0.imag, 10) for z0, _ in poles) == [round(-a, 10), round(a, 10)]
    for z0, residue in poles:
        assert abs(z0.real) < 1e-12
        assert residue == pytest.approx(c, rel=1e-10)


def test_quadrature_moments_cross_check(cd):
    boundary = droplet_boundary(cd, 256)
    for got, want in zip(boundary.quadrature_moments, boundary.harmonic_moments):
        assert abs(got - want) < 1e-6


def test_second_moment_value():
    assert harmonic_moments_closed(2.0, 1.0, 8)[1] == pytest.approx(0.5)
    assert harmonic_moments_closed(2.0, 1.0, 8)[0] == 0.0


def test_critical_values_are_branch_points(cd):
    assert abs(eval_df(cd, cd.w1)) < 1e-10
    assert abs(eval_df(cd, cd.w2)) < 1e-10
    assert eval_f(cd, cd.w1).real == pytest.approx(cd.x1, rel=1e-13)
    assert eval_f(cd, cd.w2).real == pytest.approx(cd.x2, rel=1e-13)


def test_F1_inverts_f(cd):
    for w in (1.5 * cmath.exp(0.7j), 3.0j, -2.2 + 0.4j):
        assert abs(eval_F1(cd, eval_f(cd, w)) - w) < 1e-10


def test_F1_derivative(cd):
    z, h = 1.3 + 0.8j, 1e-6
    numeric = (eval_F1(cd, z + h) - eval_F1(cd, z - h)) / (2 * h)
    assert abs(numeric - eval_dF1(cd, z)) < 1e-6


def test_F1_cut(cd):
    with pytest.raises(BranchCutHit):
        eval_F1(cd, 0.5 * cd.x1)
    with pytest.raises(BranchCutHit):
        branch_preimage(cd, 2.0 * cd.x2, 3)


def test_cut_sides_are_conjugate(cd):
    x = 0.4 * cd.x1
    upper = branch_preimage(cd, x, 1, PLUS)
    lower = branch_preimage(cd, x, 1, MINUS)
    assert abs(upper - lower.conjugate()) < 1e-12
    assert upper.imag > 0


def test_sheet_preimages_cover_all_roots(cd):
    z = 0.7 + 0.9j
    roots = sheet_preimages(cd, z)
    for w in roots:
        assert abs(eval_f(cd, w) - z) < 1e-10
    assert abs(roots[0]) > abs(roots[2])


def test_scaling_covariance(params):
    report = scaling_check(params, 1.5)
    assert report.is_valid(), report.errors


def test_boundary_needs_enough_samples(cd):
    with pytest.raises(ValueError):
        droplet_boundary(cd, 32)


def test_solve_map_rejects_phase_two():
    with pytest.raises(PhaseViolation):
        solve_map(ModelParams(2.0, 1.0, 0.5))


@pytest.mark.slow
def test_gap_merging_matches_quintic():
    estimate = conformal.gap_merging_t_star(2.0, 1.0)
    t_star = compute_t_star(2.0, 1.0)
    assert abs(estimate.t_extrapolated - t_star) / t_star < 1e-3
    assert estimate.t_merge <= t_star * (1 + 1e-6)


def test_cut_curves(cd):
    report = cut_curve_check(cd)
    assert report.is_valid(), report.errors
    inner, outer = cut_preimages(cd, 64)
    assert np.all(np.abs(inner) < np.abs(outer))
    assert abs(outer[0] - cd.w1) < 1e-10
    assert abs(inner[0] - cd.w2) < 1e-10
