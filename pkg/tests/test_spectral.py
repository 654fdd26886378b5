import numpy as np
import pytest

from motherbody.errors import BranchCutHit, PoleAt
from motherbody.measures import density_mu1
from motherbody.spectral import (
    Sheet,
    SheetPoint,
    Side,
    branch_values,
    build_curve,
    closed_form_symmetric,
    curve_symmetry_check,
    discriminant,
    discriminant_pattern,
    scaling_check,
    eval_S,
    P_residual,
    symmetric_functions,
    verify_curve,
    zs_critical_values,
    zs_value_solutions,
)


def test_verify_curve(curve):
    report = verify_curve(curve)
    assert report.is_valid(), report.errors
    assert len(report.checks) >= 10


def test_branches_solve_the_cubic(curve):
    for z in (1.0 + 2.0j, -0.3 + 0.1j, 5.0 - 4.0j):
        for s in branch_values(curve.cd, z):
            assert P_residual(curve, s, z) < 1e-9


def test_symmetric_functions_match_closed_form(curve):
    z = 0.9 - 1.7j
    got = symmetric_functions(curve, z)
    want = closed_form_symmetric(curve, z)
    assert abs(got[0] - want[0]) < 1e-10
    assert abs(got[1] - want[1]) < 1e-9 * max(1.0, abs(want[1]))
    assert abs(got[2] - want[2]) < 1e-9 * max(1.0, abs(want[2]))


def test_constants(curve, params):
    a, c, t = params.a, params.c, params.t
    assert curve.C1 > a ** 4 + 4 * c * c
    assert abs(curve.C2 - a * a * (t + 2 * c) * curve.b0 ** 2) < 1e-6 * max(1.0, curve.C2)


def test_constants_with_mu1_route(cd):
    sc = build_curve(cd, density_mu1(cd))
    assert sc.C1 > 0


def test_nodes_ordering(curve, params):
    assert 0 < curve.b0 <= curve.b1 < params.a < curve.b2


def test_discriminant_pattern(curve):
    disc = discriminant(curve)
    assert disc.degree == 12
    assert disc.coeffs[12] == pytest.approx(-4 * curve.params.a ** 6)
    assert all(v == 0.0 for v in disc.coeffs[1::2])
    report = discriminant_pattern(curve, disc)
    assert report.is_valid(), report.errors


def test_curve_symmetries(curve):
    assert curve_symmetry_check(curve).is_valid()


def test_zs_critical_structure(curve, params):
    zs = zs_critical_values(curve)
    assert 0 < zs.s2 < zs.s1 < params.t + 2 * params.c
    assert zs.p1 > curve.cd.x1
    assert 0 < zs.p2 < curve.b0


def test_zs_counts_are_even(curve):
    count = zs_value_solutions(curve, 0.5 * (curve.params.t + 2 * curve.params.c))
    assert count.total % 2 == 0
    assert set(count.by_sheet) == {1, 2, 3}


def test_eval_S_on_cut_needs_side(curve):
    x = 0.3 * curve.cd.x1
    with pytest.raises(BranchCutHit):
        eval_S(curve, SheetPoint(x, Sheet.FIRST))
    upper = eval_S(curve, SheetPoint(x, Sheet.FIRST, Side.PLUS))
    lower = eval_S(curve, SheetPoint(x, Sheet.FIRST, Side.MINUS))
    assert abs(upper - lower.conjugate()) < 1e-12


def test_gluing_across_delta1(curve):
    x = -0.6 * curve.cd.x1
    s1 = eval_S(curve, SheetPoint(x, Sheet.FIRST, Side.PLUS))
    s2 = eval_S(curve, SheetPoint(x, Sheet.SECOND, Side.MINUS))
    assert abs(s1 - s2) < 1e-8


def test_poles(curve):
    with pytest.raises(PoleAt):
        eval_S(curve, SheetPoint(2.0j, Sheet.FIRST))
    with pytest.raises(PoleAt):
        eval_S(curve, SheetPoint(0.0, Sheet.THIRD, Side.PLUS))


def test_branches_are_odd(cd):
    z = 0.8 + 0.6j
    for s, m in zip(branch_values(cd, z), branch_values(cd, -z)):
        assert abs(s + m) < 1e-9 * max(1.0, abs(s))


def test_far_field_of_first_branch(cd):
    # S1(z) = O(1/z) on the first sheet
    z = 1e4 * (1 + 1j)
    s1, _, _ = branch_values(cd, z)
    assert abs(s1 * z) < 10.0
    assert np.isfinite(abs(s1))


@pytest.mark.parametrize('shift', [1.0, None])
def test_zs_four_solutions_outside_critical_range(curve, shift):
    v = curve.params.t + 2 * curve.params.c + shift if shift else -1.0
    count = zs_value_solutions(curve, v)
    assert count.total == 4


def test_nodes_are_fixed_points(curve):
    s1 = eval_S(curve, SheetPoint(1j * curve.b1, Sheet.FIRST))
    s2 = eval_S(curve, SheetPoint(1j * curve.b2, Sheet.FIRST))
    assert abs(s1 - 1j * curve.b1) < 1e-8 * curve.params.a
    assert abs(s2 + 1j * curve.b2) < 1e-8 * curve.params.a


def test_nodes_scale_with_map(params):
    report = scaling_check(params, 1.5)
    assert report.is_valid(), report.errors
    assert {'b0 scales', 'b1 scales', 'b2 scales', 'x2 scales'} <= {r.name for r in report.checks}
