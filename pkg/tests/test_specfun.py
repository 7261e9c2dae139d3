import math

import pytest
from hypothesis import given, settings, strategies as st

from udn_sg import specfun
from udn_sg.errors import ConvergenceError, DomainError

# oracle values: mpmath at 40 digits (zeta(s, a), nsum)
HURWITZ = [
    (1.5, 0.3, 8.2377616714597234206),
    (2.0, 1.0, 1.6449340668482264365),
    (3.7, 2.5, 0.051956943742509778333),
    (6.0, 0.05, 64000000.761254402555),
    (1.01, 1.0, 100.57794333849678367),
    (4.0, 100.0, 3.3836666500022217224e-7),
]

INV_POWER = [
    (0.01, 1, 1.6448258446972819652),
    (0.5, 1, 1.4253771499192955112),
    (2.0, 1, 0.66040364132111511419),
    (30.0, 1, 0.051804322004274331752),
    (0.3, 2, 0.92097773400917062373),
    (1.5, 2, 0.13433674196124205693),
    (0.2, 3, 0.9058595306569412755),
    (4.0, 3, 0.0004531724862687302024),
    (1.0, 1.5, 0.5124349215502030648),
    (2.5, 2.7, 0.0076681972964835929987),
]

RING = [
    (0, 0.3, 2, 1.0372870893490996784),
    (1, 1.0, 2, 0.14711677137965943279),
    (5, 4.0, 2, 0.010779332034919975778),
    (40, 0.7, 2, 0.00030469414546856911355),
    (0, 1.0, 1.5, 0.9005247353481259243),
    (2, 0.5, 3, 0.0052950107979259205272),
    (1, 2.0, 2.5, 0.020954630566753676615),
]


@pytest.mark.parametrize("s, a, expected", HURWITZ)
def test_hurwitz_matches_oracle(s, a, expected):
    assert specfun.hurwitz_zeta(s, a) == pytest.approx(expected, rel=1e-12)


def test_hurwitz_zeta2_is_pi2_over_6():
    assert specfun.hurwitz_zeta(2.0, 1.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.05, 12.0), st.floats(0.01, 50.0))
def test_hurwitz_recurrence(s, a):
    lhs = specfun.hurwitz_zeta(s, a)
    rhs = specfun.hurwitz_zeta(s, a + 1.0) + a ** -s
    assert lhs == pytest.approx(rhs, rel=1e-11)


@pytest.mark.parametrize("s, a", [(1.0, 1.0), (0.5, 1.0), (2.0, 0.0), (2.0, -1.0)])
def test_hurwitz_domain(s, a):
    with pytest.raises(DomainError):
        specfun.hurwitz_zeta(s, a)


def test_hurwitz_budget_exhausted():
    with pytest.raises(ConvergenceError):
        specfun.hurwitz_zeta(1.5, 1.0, specfun.SeriesControl(rel_tol=1e-30, max_terms=1000), order=2)


@pytest.mark.parametrize("c, p, expected", INV_POWER)
def test_sum_inv_power(c, p, expected):
    assert specfun.sum_inv_power(c, p) == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("c, p, expected", [r for r in INV_POWER if r[1] == 1])
def test_sum_inv_quadratic(c, p, expected):
    assert specfun.sum_inv_quadratic(c) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("c", [1e-9, 1e-4, 0.049, 0.051, 0.2])
def test_sum_inv_quadratic_small_c_continuity(c):
    # series branch and closed form agree around the switch and approach zeta(2)
    direct = sum(1.0 / (k * k + c * c) for k in range(1, 200_001)) + 1.0 / 200_000.5
    assert specfun.sum_inv_quadratic(c) == pytest.approx(direct, rel=1e-10)


def test_sum_inv_quadratic_domain():
    with pytest.raises(DomainError):
        specfun.sum_inv_quadratic(0.0)
    with pytest.raises(DomainError):
        specfun.sum_inv_power(1.0, 0.5)


@pytest.mark.parametrize("n, c, p, expected", RING)
def test_sum_ring_power(n, c, p, expected):
    assert specfun.sum_ring_power(n, c, p) == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("n, c, p, expected", [r for r in RING if r[2] == 2])
def test_tail_sum_quartic(n, c, p, expected):
    assert specfun.tail_sum_quartic(n, c) == pytest.approx(expected, rel=1e-12)


def test_tail_sum_quartic_telescopes():
    c = 0.8
    for n in range(0, 30, 3):
        diff = specfun.tail_sum_quartic(n, c) - specfun.tail_sum_quartic(n + 1, c)
        assert diff == pytest.approx((n + 1) / ((n + 1) ** 2 + c * c) ** 2, rel=1e-10)


def test_tail_sum_quartic_domain():
    with pytest.raises(DomainError):
        specfun.tail_sum_quartic(-1, 1.0)
    with pytest.raises(DomainError):
        specfun.sum_ring_power(0, 1.0, 1.0)


@pytest.mark.parametrize("alpha", [2.0, 3.5, 4.0])
def test_zeta_tail_asymptotic(alpha):
    t = 1e4
    exact = specfun.hurwitz_zeta(alpha, 1.0 + t)
    assert specfun.zeta_tail_asymptotic(alpha, t) == pytest.approx(exact, rel=10 * t ** -2)
