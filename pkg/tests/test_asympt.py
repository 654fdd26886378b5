import cmath
import math

import pytest

from motherbody.asympt import (
    LadderPoint,
    LadderResult,
    asymptotics_report,
    fit_slope,
    ladder,
    ladder_sizes,
    loop_phase_change,
    n_step_consistency,
    panel_points,
    predict,
    prefactor,
    prefactor_square_error,
    wrap_phase,
    zero_report,
)
from motherbody.errors import BranchCutHit, InvalidParams
from motherbody.measures import density_mu1
from motherbody.model import ModelParams
from motherbody.oracle import ZeroStatistics


@pytest.fixture(scope='module')
def mu1(cd):
    return density_mu1(cd)


def test_prefactor_normalized_at_infinity(cd):
    assert abs(prefactor(cd, 1e6 * (1 + 1j)) - 1.0) < 1e-6


def test_prefactor_positive_on_real_axis(cd):
    m = prefactor(cd, 2.0 * cd.x2)
    assert m.real > 0
    assert abs(m.imag) < 1e-12


def test_prefactor_squares_to_map_derivative(cd):
    for z in (2.0 * cd.x2, 0.5 + 0.7j, -0.2 - 1.1j):
        assert prefactor_square_error(cd, z) < 1e-10


def test_prefactor_single_valued(cd):
    assert abs(loop_phase_change(cd)) < 1e-6


def test_step_in_n_adds_g1(cd, mu1):
    assert n_step_consistency(cd, mu1, 20, 0.3 + 0.4j) < 1e-12


def test_prediction_far_field(cd, mu1):
    z = 1e4 * cmath.exp(0.7j)
    pred = predict(cd, mu1, 12, z)
    assert abs(pred.log_modulus - 12 * math.log(abs(z))) < 1e-5


def test_prediction_undefined_on_cut(cd, mu1):
    with pytest.raises(BranchCutHit):
        predict(cd, mu1, 8, 0.5 * cd.x1)


def test_panel_avoids_cut(cd):
    points = panel_points(cd)
    assert len(points) == 5
    assert all(p.imag != 0.0 or abs(p.real) > cd.x1 for p in points)


def test_ladder_sizes():
    assert ladder_sizes(0.125, [8, 16]) == [(8, 64), (16, 128)]
    with pytest.raises(InvalidParams):
        ladder_sizes(0.15, [8])


def test_fit_slope():
    ns = [8, 16, 32, 64]
    assert fit_slope(ns, [1.0 / n for n in ns]) == pytest.approx(-1.0)


def test_wrap_phase():
    assert wrap_phase(complex(0.25, 2.0 * math.pi + 0.5)) == pytest.approx(complex(0.25, 0.5))


def test_short_ladder_is_reported():
    report = asymptotics_report(LadderResult(params=ModelParams(2.0, 1.0, 0.125)))
    assert not report.is_valid()


@pytest.mark.slow
def test_ladder_converges():
    result = ladder(ModelParams(a=2.0, c=1.0, t=0.125), [8, 16, 32])
    assert result.ns == [8, 16, 32]
    report = asymptotics_report(result)
    assert report.is_valid(), report.errors
    zeros = zero_report(result)
    assert zeros.check('zeros centred').passed
    assert len(result.error_table()) == 15
    assert zeros.has_warnings()


@pytest.mark.slow
def test_ladder_reaches_degree_64():
    result = ladder(ModelParams(a=2.0, c=1.0, t=0.125), [8, 16, 32, 64])
    zeros = zero_report(result)
    assert zeros.check('KS at n=64').passed, zeros.check('KS at n=64').value
    assert not zeros.has_warnings()
    assert result.points[-1].N == 512


def _zero_point(n: int, ks: float) -> LadderPoint:
    stats = ZeroStatistics(n=n, ks=ks, delta=1.0 / n, max_imag=0.0, mean=0j, nodes=(), cdf=())
    return LadderPoint(n=n, N=8 * n, poly=None, errors=[], zeros=stats)


@pytest.mark.parametrize('ks, passed', [(0.05, True), (0.09, False)])
def test_ks_bound_at_degree_64(ks, passed):
    result = LadderResult(params=ModelParams(2.0, 1.0, 0.125))
    result.points = [_zero_point(16, 0.2), _zero_point(32, 0.1), _zero_point(64, ks)]
    report = zero_report(result)
    assert report.check('KS at n=64').passed is passed
    assert not report.has_warnings()


def test_short_ladder_warns_about_ks_bound():
    result = LadderResult(params=ModelParams(2.0, 1.0, 0.125))
    result.points = [_zero_point(8, 0.3), _zero_point(16, 0.2), _zero_point(32, 0.1)]
    report = zero_report(result)
    assert report.is_valid(), report.errors
    assert report.has_warnings()
    with pytest.raises(KeyError):
        report.check('KS at n=64')
