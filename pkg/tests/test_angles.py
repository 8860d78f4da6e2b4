from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from mating_lab.angles import (
    angle_from_itinerary,
    circular_distance,
    exact_period,
    fixed_angles,
    format_angle,
    itinerary_md,
    md_step,
    mod1,
    parse_angle,
    periodic_angles,
    preimages,
    symbol_md,
    two_cycles,
    unlinked,
)

rationals = st.fractions(min_value=0, max_value=1).map(mod1)


def test_md_step_examples():
    assert md_step(3, Fraction(1, 4)) == Fraction(1, 4)
    assert md_step(3, Fraction(1, 8)) == Fraction(5, 8)
    assert md_step(7, Fraction(0)) == Fraction(0)


@given(st.integers(2, 9), rationals)
def test_md_step_exact(d, theta):
    assert md_step(d, theta) == mod1(-d * theta)


def test_fixed_angles():
    assert fixed_angles(3) == [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]


def test_periodic_angles_period_one():
    for d in (2, 3, 4, 5):
        angles = periodic_angles(d, 1)
        assert angles == fixed_angles(d)
        assert len(angles) == d + 1


def test_periodic_angles_period_two():
    assert periodic_angles(3, 2) == [
        Fraction(1, 8),
        Fraction(3, 8),
        Fraction(5, 8),
        Fraction(7, 8),
    ]
    assert two_cycles(3) == [
        (Fraction(1, 8), Fraction(5, 8)),
        (Fraction(3, 8), Fraction(7, 8)),
    ]


@given(st.integers(2, 6), rationals)
def test_preimages_map_forward(d, theta):
    for q in preimages(d, theta):
        assert md_step(d, q) == theta


def test_symbol_boundaries_take_lower_piece():
    assert symbol_md(3, Fraction(0)) == 0
    assert symbol_md(3, Fraction(1, 4)) == 0
    assert symbol_md(3, Fraction(1, 2)) == 1
    assert symbol_md(3, Fraction(1, 8)) == 0
    assert symbol_md(3, Fraction(5, 8)) == 2


def test_itinerary_example():
    # orbit 1/8 -> 5/8 -> 1/8 alternates the first and third pieces
    assert itinerary_md(3, Fraction(1, 8), 4) == [0, 2, 0, 2]


@given(st.integers(2, 6), rationals, st.integers(1, 8))
def test_itinerary_pullback_encloses_angle(d, theta, n):
    symbols = itinerary_md(d, theta, n)
    assume(all(a != b for a, b in zip(symbols, symbols[1:])))
    lo, hi = angle_from_itinerary(d, symbols)
    assert hi - lo == Fraction(1, (d + 1) * d ** (n - 1))
    assert lo <= mod1(theta) <= hi


def test_exact_period():
    assert exact_period(3, Fraction(1, 8)) == 2
    assert exact_period(3, Fraction(1, 4)) == 1
    assert exact_period(2, Fraction(1, 9)) == 3  # 1/9 -> 7/9 -> 4/9 -> 1/9
    assert exact_period(2, Fraction(1, 3)) == 1
    assert periodic_angles(2, 2) == []  # no exact 2-cycles in degree 2


def test_unlinked():
    assert unlinked((Fraction(1, 8), Fraction(5, 8)), (Fraction(1, 4), Fraction(3, 8)))
    assert not unlinked((Fraction(1, 8), Fraction(5, 8)), (Fraction(1, 4), Fraction(7, 8)))
    # shared endpoints never count as crossing
    assert unlinked((Fraction(1, 8), Fraction(5, 8)), (Fraction(1, 8), Fraction(1, 4)))


def test_parse_format_roundtrip():
    assert parse_angle("3/8") == Fraction(3, 8)
    assert parse_angle("9/8") == Fraction(1, 8)
    assert format_angle(Fraction(-1, 8)) == "7/8"


def test_circular_distance():
    assert circular_distance(Fraction(1, 8), Fraction(7, 8)) == pytest.approx(0.25)
    assert circular_distance(0.99, 0.01) == pytest.approx(0.02)
