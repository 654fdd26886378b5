import math

import numpy as np
import pytest

from motherbody.errors import BranchCutHit
from motherbody.measures import (
    cauchy_checks,
    cauchy_mu2_via_s2,
    cauchy_transforms,
    endpoint_exponents,
    g1_value,
    g_functions,
    measure_checks,
    monotonicity_check,
    mu1_cdf,
    mu1_density_at,
    mu2_density_at,
    potential_by_quadrature,
    potentials,
    potentials_complex,
    rho_limit_cauchy,
    rho_limit_check,
    rho_limit_density,
    rho_limit_measure,
    rho_limit_potential,
    small_t_errors,
)


def test_measure_checks(ms):
    report = measure_checks(ms)
    assert report.is_valid(), report.errors


def test_masses(ms):
    assert ms.mu1.mass() == pytest.approx(1.0, abs=1e-8)
    assert ms.m2 == pytest.approx(11.0)
    assert ms.mu2.mass() == pytest.approx(11.0, abs=1e-6)


def test_mu2_saturates_constraint_inside(cd):
    a, t = cd.params.a, cd.params.t
    assert mu2_density_at(cd, 0.5 * cd.x2) == pytest.approx(a / (math.pi * t))
    assert mu2_density_at(cd, 1.5 * cd.x2) < a / (math.pi * t)


def test_mu1_vanishes_outside(cd):
    assert mu1_density_at(cd, 1.01 * cd.x1) == 0.0
    assert mu1_density_at(cd, 0.0) > 0


def test_endpoint_exponents(cd):
    e1, e2 = endpoint_exponents(cd)
    assert e1 == pytest.approx(0.5, abs=0.05)
    assert e2 == pytest.approx(0.5, abs=0.05)


def test_mu1_cdf(cd):
    F = mu1_cdf(cd, [-2 * cd.x1, 0.0, 2 * cd.x1])
    assert F[0] == 0.0
    assert F[1] == pytest.approx(0.5, abs=1e-8)
    assert F[2] == 1.0


def test_cauchy_checks(ms):
    report = cauchy_checks(ms)
    assert report.is_valid(), report.errors


def test_cauchy_on_cut_needs_side(cd):
    with pytest.raises(BranchCutHit):
        cauchy_transforms(cd, 0.5 * cd.x1)
    c_plus, _ = cauchy_transforms(cd, 0.5 * cd.x1, 'plus')
    assert c_plus.imag == pytest.approx(-math.pi * mu1_density_at(cd, 0.5 * cd.x1), rel=1e-8)


def test_cauchy_routes(cd):
    z = 0.4 + 1.1j
    assert abs(cauchy_transforms(cd, z)[1] - cauchy_mu2_via_s2(cd, z)) < 1e-10


def test_potential_far_field(ms):
    x = 1e3 * ms.cd.x2
    u1, u2 = potentials(ms, x)
    assert u1 == pytest.approx(-math.log(x), abs=1e-5)
    # heavy mu2 tail: correction of order kappa log(x)/x
    assert u2 == pytest.approx(-ms.m2 * math.log(x), abs=0.05)


def test_potential_routes_agree(ms):
    x = 3.0 * ms.cd.x2
    assert potentials(ms, x)[0] == pytest.approx(potential_by_quadrature(ms.mu1, x), abs=1e-6)


def test_potentials_are_even(ms):
    assert potentials(ms, -0.3) == potentials(ms, 0.3)
    z = 0.7 + 0.5j
    assert potentials_complex(ms, z) == pytest.approx(potentials_complex(ms, -z.conjugate()))


def test_g1_far_field(ms):
    z = 1e3 + 0.0j
    assert abs(g1_value(ms.mu1, z) - math.log(1e3)) < 1e-6


def test_g_functions(ms):
    z = 0.6 + 0.9j
    g1, g2 = g_functions(ms, z)
    u1, u2 = potentials_complex(ms, z)
    assert g1.real == pytest.approx(-u1, abs=1e-8)
    assert g2.real == pytest.approx(-u2, abs=1e-5)
    with pytest.raises(BranchCutHit):
        g_functions(ms, 0.5 * ms.cd.x1)


def test_rho_limit():
    assert rho_limit_density(2.0, 1.0, 0.0) == pytest.approx(2.0 / math.pi)
    assert rho_limit_potential(2.0, 1.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    report = rho_limit_check(2.0, 1.0)
    assert report.is_valid(), report.errors


@pytest.mark.slow
def test_small_t_degeneration():
    errors = small_t_errors(2.0, 1.0, (0.05, 0.02, 0.01))
    values = [errors[t] for t in (0.05, 0.02, 0.01)]
    assert values[0] > values[1] > values[2]


@pytest.mark.slow
def test_monotonicity_in_t():
    report = monotonicity_check(2.0, 1.0, [0.02, 0.05, 0.1, 0.15])
    assert report.is_valid(), report.errors


def test_integrate_keeps_imaginary_part(ms):
    z = complex(0.3 * ms.cd.x1, 0.7 * ms.cd.x1)
    direct = ms.mu1.integrate(lambda s: 1.0 / (z - s))
    assert isinstance(direct, complex)
    assert abs(direct - cauchy_transforms(ms.cd, z)[0]) < 1e-8
    assert isinstance(ms.mu1.integrate(lambda s: s * s), float)


def test_rho_limit_cauchy_on_imaginary_axis():
    value = rho_limit_cauchy(2.0, 1.0, 0.5j)
    assert abs(value - (-(4.0 - 2.0 * math.sqrt(2.0)) * 1j)) < 1e-14
    grid = rho_limit_measure(2.0, 1.0)
    direct = grid.integrate(lambda s: 1.0 / (0.5j - s))
    assert abs(direct - value) < 1e-8
