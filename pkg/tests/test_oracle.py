import cmath
import math
from fractions import Fraction

import pytest

from motherbody.errors import InvalidParams, NonIntegralCharge, SingularSystem
from motherbody.oracle import (
    KERNEL,
    MOMENT,
    OracleParams,
    bareiss_solve,
    cross_check,
    gram_entry,
    log_eval,
    solve,
    zero_counting_measure,
    zeros,
)


def test_bareiss_small_system():
    x, pivots = bareiss_solve([[2, 1], [1, 3]], [3, 5])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    assert pivots == [2, 5]


def test_bareiss_singular():
    with pytest.raises(SingularSystem):
        bareiss_solve([[1, 2], [2, 4]], [1, 2])


def test_bareiss_row_swap():
    x, _ = bareiss_solve([[0, 1], [1, 0]], [2, 3])
    assert x == [3, 2]


def test_hand_computed_degree_two():
    # weight |z^2 + 1|^2 e^{-|z|^2}
    op = OracleParams(n=2, N=1, a2=Fraction(1), c=Fraction(1))
    for route in (KERNEL, MOMENT):
        poly = solve(op, route, with_zeros=False)
        assert poly.coeffs == (Fraction(-2, 3), 0, 1)
    assert solve(op, MOMENT, with_zeros=False).norm_h_over_pi == Fraction(74, 3)


def test_gram_entries_vanish_off_parity():
    op = OracleParams(n=4, N=2, a2=Fraction(3), c=Fraction(1))
    assert gram_entry(op, 3, 0) == 0
    assert gram_entry(op, 2, 0) > 0


def test_ginibre_case():
    op = OracleParams(n=3, N=5, a2=Fraction(4), c=Fraction(0))
    poly = solve(op)
    assert poly.coeffs == (0, 0, 0, 1)
    assert poly.norm_h_over_pi == Fraction(6, 625)
    assert all(abs(z) < 1e-20 for z in poly.zeros)


def test_degree_zero_and_one():
    p0 = solve(OracleParams(n=0, N=4, a2=Fraction(4), c=Fraction(1)))
    assert p0.coeffs == (1,)
    assert p0.zeros == ()
    assert p0.norm_h_over_pi > 0

    p1 = solve(OracleParams(n=1, N=4, a2=Fraction(4), c=Fraction(1)))
    assert p1.coeffs == (0, 1)
    assert p1.zeros == (0j,)


@pytest.mark.parametrize('n, N', [(4, 40), (6, 12), (10, 20)])
def test_routes_agree_exactly(n, N):
    report = cross_check(OracleParams.from_floats(n, N, 2.0, 1.0))
    assert report.is_valid(), report.errors


def test_odd_charge():
    op = OracleParams(n=5, N=3, a2=Fraction(2), c=Fraction(1, 3))
    assert op.M == 1
    assert cross_check(op).is_valid()


def test_parameter_errors():
    with pytest.raises(NonIntegralCharge):
        OracleParams.from_floats(2, 3, 2.0, 0.5)
    with pytest.raises(InvalidParams):
        OracleParams(n=-1, N=2, a2=Fraction(4), c=Fraction(1))
    with pytest.raises(InvalidParams):
        OracleParams(n=2, N=2, a2=Fraction(0), c=Fraction(1))
    with pytest.raises(InvalidParams):
        solve(OracleParams(n=2, N=2, a2=Fraction(4), c=Fraction(1)), route='svd')


def test_from_floats_rationalizes():
    op = OracleParams.from_floats(4, 8, math.sqrt(2.0), 0.25)
    assert op.a2 == 2
    assert op.c == Fraction(1, 4)
    assert op.t == 0.5


def test_zeros_are_symmetric():
    poly = solve(OracleParams.from_floats(8, 16, 2.0, 1.0))
    zs = poly.zeros
    assert len(zs) == 8
    for z in zs:
        assert min(abs(w + z) for w in zs) < 1e-12
        assert min(abs(w - z.conjugate()) for w in zs) < 1e-12


def test_zeros_match_evaluation():
    poly = solve(OracleParams.from_floats(6, 12, 2.0, 1.0), with_zeros=False)
    for z in zeros(poly):
        value = sum(float(p) * z ** j for j, p in enumerate(poly.coeffs))
        assert abs(value) < 1e-10


def test_log_eval():
    poly = solve(OracleParams(n=2, N=1, a2=Fraction(1), c=Fraction(1)), with_zeros=False)
    assert log_eval(poly, 2.0) == pytest.approx(math.log(10.0 / 3.0), abs=1e-15)
    z = 1.0 + 1.0j
    assert log_eval(poly, z) == pytest.approx(cmath.log(z * z - 2.0 / 3.0), abs=1e-15)


def test_zero_counting_single_zero(cd):
    stats = zero_counting_measure((0j,), cd)
    assert stats.ks == pytest.approx(0.5, abs=1e-8)
    assert stats.delta == 0.0


def test_to_dict_uses_exact_strings():
    poly = solve(OracleParams(n=2, N=1, a2=Fraction(1), c=Fraction(1)))
    data = poly.to_dict()
    assert data['coeffs'] == ['-2/3', '0', '1']
    assert data['norm_h_over_pi'] == '74/3'
    assert len(data['zeros']) == 2
