import cmath
import math

import pytest
from hypothesis import given, strategies as st

from mating_lab.geom import (
    AntiMoebius,
    AntipodalPointsError,
    CenterInputError,
    Circle,
    CircleRelation,
    Orientation,
    PoleInputError,
    apply,
    circle_relation,
    circle_through_points,
    compose,
    fixed_points,
    map_circle,
    orthogonal_chord_circle,
    reflect,
)

UNIT = Circle(0j, 1.0)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)
radii = st.floats(min_value=0.05, max_value=50, allow_nan=False)


def test_reflect_unit_circle_real_point():
    assert reflect(UNIT, 2.0 + 0j) == pytest.approx(0.5 + 0j)


def test_reflect_fixes_boundary():
    for k in range(16):
        z = cmath.exp(2j * math.pi * k / 16)
        assert abs(reflect(UNIT, z) - z) < 1e-12


def test_reflect_center_raises():
    with pytest.raises(CenterInputError):
        reflect(Circle(1 + 1j, 2.0), 1 + 1j)


@given(finite, finite, radii, finite, finite)
def test_reflect_involution(cx, cy, r, zx, zy):
    c = Circle(complex(cx, cy), r)
    z = complex(zx, zy)
    # double precision cannot survive extreme center-distance/radius ratios
    if not 1e-6 < abs(z - c.center) < 20 * r:
        return
    back = reflect(c, reflect(c, z))
    assert abs(back - z) < 1e-10 * (1 + abs(z))


def test_circle_relation_tangent():
    rel, point = circle_relation(UNIT, Circle(3 + 0j, 2.0))
    assert rel is CircleRelation.EXTERNALLY_TANGENT
    assert point == pytest.approx(1 + 0j)


def test_circle_relation_disjoint_overlap_nested():
    assert circle_relation(UNIT, Circle(4 + 0j, 1.0))[0] is CircleRelation.DISJOINT
    assert circle_relation(UNIT, Circle(0.5 + 0j, 1.0))[0] is CircleRelation.OVERLAPPING
    assert circle_relation(UNIT, Circle(0.1 + 0j, 0.2))[0] is CircleRelation.NESTED


@given(finite, finite, radii, finite, finite, radii)
def test_circle_relation_symmetric(ax, ay, ar, bx, by, br):
    c1, c2 = Circle(complex(ax, ay), ar), Circle(complex(bx, by), br)
    assert circle_relation(c1, c2)[0] is circle_relation(c2, c1)[0]


def test_orthogonal_chord_circle_third_roots():
    # boundary points 1 and e^{2 pi i/3}: center 2 e^{i pi/3}, radius sqrt(3)
    c = orthogonal_chord_circle(0.0, 2 * math.pi / 3)
    assert abs(c.center - 2 * cmath.exp(1j * math.pi / 3)) < 1e-12
    assert c.radius == pytest.approx(math.sqrt(3))


def test_orthogonal_chord_circle_quarter():
    c = orthogonal_chord_circle(0.0, math.pi / 2)
    assert abs(c.center - math.sqrt(2) * cmath.exp(1j * math.pi / 4)) < 1e-12
    assert c.radius == pytest.approx(1.0)


@given(st.floats(0, 2 * math.pi), st.floats(0.05, math.pi - 0.05))
def test_orthogonal_chord_circle_identity_and_endpoints(t1, gap):
    t2 = t1 + gap
    c = orthogonal_chord_circle(t1, t2)
    assert abs(abs(c.center) ** 2 - 1 - c.radius**2) < 1e-12
    for t in (t1, t2):
        assert abs(abs(cmath.exp(1j * t) - c.center) - c.radius) < 1e-10


def test_orthogonal_chord_circle_antipodal_rejected():
    with pytest.raises(AntipodalPointsError):
        orthogonal_chord_circle(0.0, math.pi)


def test_antimoebius_identity():
    m = AntiMoebius.identity()
    assert apply(m, 1 + 1j) == pytest.approx(1 + 1j)


def test_antimoebius_pole():
    m = AntiMoebius(0, 1, 1, 0)  # z -> 1/z
    with pytest.raises(PoleInputError):
        apply(m, 0j)


def test_reflection_squares_to_identity():
    c = Circle(0.3 - 0.2j, 1.7)
    m = AntiMoebius.circle_reflection(c)
    mm = compose(m, m)
    assert mm.orientation is Orientation.PRESERVING
    for k in range(10):
        z = complex(0.3 * k - 1, 0.1 * k)
        if abs(z - c.center) < 1e-3:
            continue
        assert abs(apply(mm, z) - z) < 1e-12 * (1 + abs(z))


def test_reflection_matches_direct_formula():
    import random

    rng = random.Random(42)
    for _ in range(100):
        c = Circle(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), rng.uniform(0.1, 3))
        m = AntiMoebius.circle_reflection(c)
        z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        if abs(z - c.center) < 1e-3:
            continue
        assert abs(apply(m, z) - reflect(c, z)) < 1e-10


def test_compose_orientation_parity():
    c = Circle(0j, 2.0)
    refl = AntiMoebius.circle_reflection(c)
    rot = AntiMoebius(cmath.exp(0.7j), 0, 0, 1)
    assert compose(refl, rot).orientation is Orientation.REVERSING
    assert compose(refl, refl).orientation is Orientation.PRESERVING
    # composites act like function composition
    z = 1.3 - 0.4j
    assert abs(apply(compose(refl, rot), z) - apply(refl, apply(rot, z))) < 1e-12


def test_inverse():
    m = AntiMoebius(2 + 1j, 0.5j, 1 - 0.5j, 3.0, Orientation.REVERSING)
    z = 0.7 + 0.2j
    assert abs(apply(m.inverse(), apply(m, z)) - z) < 1e-12


def test_fixed_points_of_loxodromic():
    # z -> 4z has fixed points 0 (and infinity, not reported)
    m = AntiMoebius(2, 0, 0, 0.5)
    assert fixed_points(m) == (0j,)


def test_circle_through_points_and_map_circle():
    c = circle_through_points(1 + 0j, 1j, -1 + 0j)
    assert abs(c.center) < 1e-12 and c.radius == pytest.approx(1.0)
    m = AntiMoebius(1, 1 + 2j, 0, 1)  # translation
    image = map_circle(m, Circle(0.5j, 2.0))
    assert abs(image.center - (1 + 2.5j)) < 1e-9
    assert image.radius == pytest.approx(2.0)


def test_from_three_points():
    src = (1 + 0j, 1j, -1 + 0j)
    dst = (0j, 1 + 0j, 4j)
    m = AntiMoebius.from_three_points(src, dst)
    for s, t in zip(src, dst):
        assert abs(apply(m, s) - t) < 1e-9
